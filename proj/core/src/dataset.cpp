#include "zsreg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "zsreg/error.hpp"

namespace zsreg {

namespace {

std::vector<std::string> default_ids(std::size_t count) {
  std::vector<std::string> ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = std::to_string(i);
  return ids;
}

bool has_duplicate_rows(const Matrix& s) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(s.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (s(a, j) != s(b, j)) return s(a, j) < s(b, j);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!row_less(order[i - 1], order[i])) return true;
  }
  return false;
}

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

}  // namespace

ZeroShotDataset::ZeroShotDataset(Matrix features, Matrix side, std::vector<Cell> cells,
                                 std::vector<std::string> instance_ids,
                                 std::vector<std::string> target_ids, DatasetOptions options)
    : x_(std::move(features)),
      s_(std::move(side)),
      cells_(std::move(cells)),
      instance_ids_(std::move(instance_ids)),
      target_ids_(std::move(target_ids)),
      options_(options) {
  const std::size_t n = n_instances();
  const std::size_t m = n_targets();
  if (instance_ids_.empty()) instance_ids_ = default_ids(n);
  if (target_ids_.empty()) target_ids_ = default_ids(m);
  if (instance_ids_.size() != n) throw InvalidArgument("instance id count does not match rows of X");
  if (target_ids_.size() != m) throw InvalidArgument("target id count does not match rows of S");
  if (!x_.allFinite()) throw InvalidArgument("features contain non-finite values");
  if (!s_.allFinite()) throw InvalidArgument("side information contains non-finite values");

  std::vector<std::size_t> counts(m, 0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(cells_.size());
  for (const Cell& c : cells_) {
    if (c.instance >= n) throw InvalidArgument("cell references instance " + std::to_string(c.instance) + " out of range");
    if (c.target >= m) throw InvalidArgument("cell references target " + std::to_string(c.target) + " out of range");
    if (!std::isfinite(c.value)) throw InvalidArgument("cell value is not finite");
    ++counts[c.target];
    pairs.emplace_back(c.instance, c.target);
  }
  for (std::size_t t = 0; t < m; ++t) {
    if (counts[t] == 0) throw InvalidArgument("target '" + target_ids_[t] + "' has no instances");
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    throw InvalidArgument("duplicate (instance, target) cell");
  if (!options_.allow_duplicate_side && has_duplicate_rows(s_))
    throw InvalidArgument("two targets share identical side information");
}

std::vector<std::size_t> ZeroShotDataset::target_counts() const {
  std::vector<std::size_t> counts(n_targets(), 0);
  for (const Cell& c : cells_) ++counts[c.target];
  return counts;
}

bool operator==(const ZeroShotDataset& a, const ZeroShotDataset& b) {
  return a.x_.rows() == b.x_.rows() && a.x_.cols() == b.x_.cols() && a.s_.rows() == b.s_.rows() &&
         a.s_.cols() == b.s_.cols() && a.x_ == b.x_ && a.s_ == b.s_ && a.cells_ == b.cells_ &&
         a.instance_ids_ == b.instance_ids_ && a.target_ids_ == b.target_ids_;
}

SplitView SplitView::all_observed(const ZeroShotDataset& dataset) {
  SplitView view;
  view.observed_instances.resize(dataset.n_instances());
  std::iota(view.observed_instances.begin(), view.observed_instances.end(), std::size_t{0});
  view.observed_targets.resize(dataset.n_targets());
  std::iota(view.observed_targets.begin(), view.observed_targets.end(), std::size_t{0});
  return view;
}

void SplitView::validate(const ZeroShotDataset& dataset) const {
  auto check = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                  std::size_t bound, const char* what) {
    std::vector<char> seen(bound, 0);
    for (const auto* list : {&a, &b}) {
      for (std::size_t idx : *list) {
        if (idx >= bound) throw InvalidArgument(std::string(what) + " index out of range");
        if (seen[idx]) throw InvalidArgument(std::string(what) + " index listed twice or on both sides");
        seen[idx] = 1;
      }
    }
  };
  check(observed_targets, unobserved_targets, dataset.n_targets(), "target");
  check(observed_instances, unobserved_instances, dataset.n_instances(), "instance");
}

Vector SplitSide::y() const {
  Vector out(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) out(static_cast<Eigen::Index>(i)) = cells[i].value;
  return out;
}

Projection project(const ZeroShotDataset& dataset, const SplitView& view) {
  view.validate(dataset);

  auto sorted = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  Projection p;
  p.observed.instance_index = sorted(view.observed_instances);
  p.observed.target_index = sorted(view.observed_targets);
  p.unobserved.instance_index = sorted(view.unobserved_instances);
  p.unobserved.target_index = sorted(view.unobserved_targets);

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  auto local_map = [&](const std::vector<std::size_t>& ids, std::size_t bound) {
    std::vector<std::size_t> map(bound, kNone);
    for (std::size_t r = 0; r < ids.size(); ++r) map[ids[r]] = r;
    return map;
  };
  const auto obs_inst = local_map(p.observed.instance_index, dataset.n_instances());
  const auto obs_tgt = local_map(p.observed.target_index, dataset.n_targets());
  const auto uno_inst = local_map(p.unobserved.instance_index, dataset.n_instances());
  const auto uno_tgt = local_map(p.unobserved.target_index, dataset.n_targets());

  for (const Cell& c : dataset.cells()) {
    if (obs_inst[c.instance] != kNone && obs_tgt[c.target] != kNone) {
      p.observed.cells.push_back({obs_inst[c.instance], obs_tgt[c.target], c.value});
    } else if (uno_inst[c.instance] != kNone && uno_tgt[c.target] != kNone) {
      p.unobserved.cells.push_back({uno_inst[c.instance], uno_tgt[c.target], c.value});
    }
  }

  p.observed.X = take_rows(dataset.features(), p.observed.instance_index);
  p.observed.S = take_rows(dataset.side(), p.observed.target_index);
  p.unobserved.X = take_rows(dataset.features(), p.unobserved.instance_index);
  p.unobserved.S = take_rows(dataset.side(), p.unobserved.target_index);
  return p;
}

}  // namespace zsreg
