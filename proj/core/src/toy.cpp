#include "zsreg/toy.hpp"

namespace zsreg {

ZeroShotDataset gen_toy() {
  Matrix X(7, 2);
  X << 1.0, 2.0,
       2.0, 1.0,
       1.0, 1.0,
       2.0, 2.0,
       1.5, 1.2,
       1.2, 1.5,
       1.2, 1.3;  // u1
  Matrix S(3, 2);
  S << 1.0, 0.0,
       0.0, 1.0,
       1.0, 1.0;

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    cells.push_back({i, 0, X(r, 0)});
    cells.push_back({i, 1, X(r, 1)});
  }
  cells.push_back({6, 2, X(6, 0) + X(6, 1)});

  return ZeroShotDataset(std::move(X), std::move(S), std::move(cells),
                         {"a1", "a2", "a3", "a4", "a5", "a6", "u1"}, {"t1", "t2", "tu"});
}

SplitView toy_view(const ZeroShotDataset& toy) {
  SplitView v;
  v.observed_targets = {0, 1};
  v.unobserved_targets = {2};
  for (std::size_t i = 0; i + 1 < toy.n_instances(); ++i) v.observed_instances.push_back(i);
  v.unobserved_instances = {toy.n_instances() - 1};
  return v;
}

RegressorSpec toy_learner() {
  RegressorSpec spec = RegressorSpec::ridge();
  spec.grid = {1e-9};
  spec.fit_intercept = false;
  return spec;
}

}  // namespace zsreg
