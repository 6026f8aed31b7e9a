#pragma once

// Artificial zero-shot datasets. Every value (X, S and every coefficient) is drawn
// from the gap distribution (-2, -1] U [1, 2), and
//
//   y = sum_i alpha_i(s) * x_i + beta
//
// S-kind: alpha_i(s) = sum_k tau_ik delta(s, mu_k) / sum_k delta(s, mu_k)
// R-kind: alpha_i(s) = sum_j gamma_ij s_j + beta_i
//
// The generators are noiseless.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "zsreg/dataset.hpp"
#include "zsreg/methods.hpp"
#include "zsreg/random.hpp"

namespace zsreg {

enum class GenKind { S, R };

/// dense: every instance is valued for every target (the n-by-m Y matrix).
/// round_robin: instance i belongs to target i mod m only.
enum class Assignment { dense, round_robin };

/// How delta turns a side-information distance into the S-kind weight.
enum class SimilarityMode { inverse_distance, raw_distance };

struct GenSpec {
  GenKind kind = GenKind::R;
  std::size_t instances = 5000;
  std::size_t features = 50;
  std::size_t targets = 5;
  std::size_t side = 5;
  std::size_t anchors = 5;  // S-kind only
  std::uint64_t seed = 0;
  Assignment assignment = Assignment::dense;
  SimilarityMode similarity = SimilarityMode::inverse_distance;

  /// "S_50_15" / "R_100_25": kind, targets, side size.
  std::string name() const;
  void validate() const;
};

struct SGroundTruth {
  Matrix tau;  // features x anchors
  Matrix mu;   // anchors x side
  Distance delta_kind = Distance::manhattan;
  SimilarityMode mode = SimilarityMode::inverse_distance;
  double beta = 0.0;
};

struct RGroundTruth {
  Matrix gamma;   // features x side
  Vector beta_i;  // features
  double beta = 0.0;
};

using GroundTruth = std::variant<SGroundTruth, RGroundTruth>;

/// alpha(s), one coefficient per feature.
Vector coefficients(const GroundTruth& truth, const VectorRef& s);
double global_offset(const GroundTruth& truth);
double true_value(const GroundTruth& truth, const VectorRef& s, const VectorRef& x);

/// Entries are +/- U[1, 2): sign and magnitude drawn independently.
Matrix draw_uniform_gap(Eigen::Index rows, Eigen::Index cols, Rng& rng);

struct GeneratedDataset {
  ZeroShotDataset dataset;
  GroundTruth truth;
};

GeneratedDataset generate(const GenSpec& spec);

/// Builds the dataset for given X, S and ground truth (no randomness).
ZeroShotDataset realize(const Matrix& X, const Matrix& S, const GroundTruth& truth,
                        Assignment assignment);

/// Writes features.csv, side.csv, targets.csv and ground_truth.json into dir.
void save_generated(const GenSpec& spec, const GeneratedDataset& generated,
                    const std::filesystem::path& dir);

GroundTruth load_ground_truth(const std::filesystem::path& json_path);

}  // namespace zsreg
