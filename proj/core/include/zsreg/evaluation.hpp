#pragma once

// Zero-shot cross-validation. Per repetition, instances and targets are shuffled
// independently into the same number of folds. Fold f tests on (instances in f) x
// (targets in f) and trains on the complement x complement; the two mixed blocks
// are blanked and used by neither side.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zsreg/dataset.hpp"
#include "zsreg/methods.hpp"

namespace zsreg {

struct CVPlan {
  int folds = 3;
  int repetitions = 3;
  std::vector<std::vector<int>> instance_folds;  // [repetition][instance]
  std::vector<std::vector<int>> target_folds;    // [repetition][target]
  std::uint64_t seed = 0;

  SplitView view(int repetition, int fold) const;
  std::size_t n_units() const noexcept { return static_cast<std::size_t>(folds * repetitions); }
};

CVPlan make_plan(const ZeroShotDataset& dataset, std::uint64_t seed, int folds = 3,
                 int repetitions = 3);

/// Squared-error sums for one fold.
struct FoldScore {
  double mse = 0.0;
  double default_mse = 0.0;  // observed-mean predictor on the same cells
  std::size_t n_test = 0;
};

/// Fits on the observed side of the fold and scores the unobserved cells. A fold
/// without unobserved cells returns n_test = 0 and is skipped by aggregate().
FoldScore evaluate_fold(const ZeroShotDataset& dataset, const MethodSpec& method, const CVPlan& plan,
                        int repetition, int fold);

struct ScoreRecord {
  std::string dataset;
  std::string method;
  std::string learner;
  double relative_mse = 0.0;  // percent
  std::vector<double> fold_mses;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

/// 100 * mean(fold MSE) / mean(fold default MSE) over the non-empty folds.
ScoreRecord aggregate(std::string dataset, const MethodSpec& method,
                      const std::vector<FoldScore>& folds);

ScoreRecord evaluate(const ZeroShotDataset& dataset, std::string dataset_name,
                     const MethodSpec& method, const CVPlan& plan);

/// Header: dataset,method,learner,relative_mse,fold_mses (';'-separated).
inline constexpr const char* kScoresHeader = "dataset,method,learner,relative_mse,fold_mses";
std::string format_score_row(const ScoreRecord& record);
void write_scores(const std::vector<ScoreRecord>& records, const std::filesystem::path& path);
std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);

}  // namespace zsreg
