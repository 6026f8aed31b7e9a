#pragma once

// Zero-shot task data: instance features X, per-target side information S and
// the observed (instance, target, value) cells of the prediction matrix Y.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "zsreg/regression.hpp"

namespace zsreg {

/// One defined cell of the prediction matrix.
struct Cell {
  std::size_t instance = 0;
  std::size_t target = 0;
  double value = 0.0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct DatasetOptions {
  /// Accept targets with identical side information. Their inverse-distance
  /// similarity is infinite, so SR falls back to its zero-distance rule.
  bool allow_duplicate_side = false;
};

/// Immutable after construction; the constructor enforces the invariants:
/// cell indices in range, every target has at least one cell, no duplicate
/// (instance, target) pair, finite X/S/values, distinct S rows (unless allowed).
///
/// Y is stored as cells. A dataset where each instance belongs to one target
/// and one where every instance is valued for every target are both valid.
class ZeroShotDataset {
 public:
  ZeroShotDataset() = default;
  ZeroShotDataset(Matrix features, Matrix side, std::vector<Cell> cells,
                  std::vector<std::string> instance_ids = {},
                  std::vector<std::string> target_ids = {}, DatasetOptions options = {});

  const Matrix& features() const noexcept { return x_; }
  const Matrix& side() const noexcept { return s_; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const std::vector<std::string>& instance_ids() const noexcept { return instance_ids_; }
  const std::vector<std::string>& target_ids() const noexcept { return target_ids_; }
  const DatasetOptions& options() const noexcept { return options_; }

  std::size_t n_instances() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::size_t n_targets() const noexcept { return static_cast<std::size_t>(s_.rows()); }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(x_.cols()); }
  std::size_t side_dim() const noexcept { return static_cast<std::size_t>(s_.cols()); }

  /// Number of cells per target.
  std::vector<std::size_t> target_counts() const;

  friend bool operator==(const ZeroShotDataset& a, const ZeroShotDataset& b);

 private:
  Matrix x_;
  Matrix s_;
  std::vector<Cell> cells_;
  std::vector<std::string> instance_ids_;
  std::vector<std::string> target_ids_;
  DatasetOptions options_;
};

/// Which instances and targets play the observed and unobserved roles. Cells that
/// pair an observed instance with an unobserved target (or vice versa) are blanked.
struct SplitView {
  std::vector<std::size_t> observed_targets;
  std::vector<std::size_t> unobserved_targets;
  std::vector<std::size_t> observed_instances;
  std::vector<std::size_t> unobserved_instances;

  /// Every instance and target observed.
  static SplitView all_observed(const ZeroShotDataset& dataset);

  /// Throws InvalidArgument on out-of-range indices, duplicates, or overlap
  /// between the observed and unobserved sets.
  void validate(const ZeroShotDataset& dataset) const;
};

/// One side of a projected split. Cell indices are local: cell.instance indexes
/// rows of X, cell.target indexes rows of S.
struct SplitSide {
  Matrix X;
  Matrix S;
  std::vector<Cell> cells;
  std::vector<std::size_t> instance_index;  // local row -> dataset instance
  std::vector<std::size_t> target_index;    // local row -> dataset target

  Vector y() const;
  std::size_t n_cells() const noexcept { return cells.size(); }
};

struct Projection {
  SplitSide observed;
  SplitSide unobserved;
};

/// Restricts the dataset to the view. Rows and cells keep dataset order; blanked
/// cells never appear on either side.
Projection project(const ZeroShotDataset& dataset, const SplitView& view);

/// features.csv, side.csv, targets.csv inside one directory.
struct CsvPaths {
  std::filesystem::path features;
  std::filesystem::path side;
  std::filesystem::path targets;

  static CsvPaths in_directory(const std::filesystem::path& dir);
};

/// Throws LoadError naming the file and line on malformed input.
ZeroShotDataset load_csv(const CsvPaths& paths, DatasetOptions options = {});

/// Writes values with shortest round-trip formatting, so load_csv(save_csv(d)) == d.
void save_csv(const ZeroShotDataset& dataset, const CsvPaths& paths);

}  // namespace zsreg
