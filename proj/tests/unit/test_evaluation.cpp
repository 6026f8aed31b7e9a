#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "cv_checks.hpp"
#include "test_util.hpp"
#include "zsreg/error.hpp"
#include "zsreg/evaluation.hpp"
#include "zsreg/synthetic.hpp"

namespace zsreg {
namespace {

using testing::random_sparse;
using testing::scratch_dir;

ZeroShotDataset plan_dataset(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 10 + uniform_index(rng, 50);
  const std::size_t m = 3 + uniform_index(rng, 10);
  return random_sparse(n, m, seed);
}

TEST(Plan, DeterministicAndSeedSensitive) {
  const ZeroShotDataset d = random_sparse(40, 7, 1);
  const CVPlan a = make_plan(d, 5);
  const CVPlan b = make_plan(d, 5);
  const CVPlan c = make_plan(d, 6);
  EXPECT_EQ(a.instance_folds, b.instance_folds);
  EXPECT_EQ(a.target_folds, b.target_folds);
  EXPECT_NE(a.instance_folds, c.instance_folds);
  EXPECT_EQ(a.n_units(), 9u);
}

TEST(Plan, RepetitionsDrawIndependentSplits) {
  const ZeroShotDataset d = random_sparse(60, 12, 2);
  const CVPlan p = make_plan(d, 3);
  EXPECT_NE(p.instance_folds[0], p.instance_folds[1]);
  EXPECT_NE(p.target_folds[0], p.target_folds[1]);
}

TEST(Plan, ThreeTargetsGiveOneUnobservedTargetPerFold) {
  const ZeroShotDataset d = random_sparse(12, 3, 3);
  const CVPlan p = make_plan(d, 0);
  for (int r = 0; r < 3; ++r)
    for (int f = 0; f < 3; ++f) EXPECT_EQ(p.view(r, f).unobserved_targets.size(), 1u);
}

TEST(Plan, TooFewTargets) {
  const ZeroShotDataset d = random_sparse(12, 2, 4);
  try {
    make_plan(d, 0);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "too few targets for 3-fold target split");
  }
}

TEST(Plan, PartitionIsExhaustiveOnRandomPlans) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ZeroShotDataset d = plan_dataset(seed);
    EXPECT_TRUE(testing::partition_is_exhaustive(d, make_plan(d, seed))) << "seed " << seed;
  }
}

TEST(Plan, BlankedCellsNeverUsed) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ZeroShotDataset d = plan_dataset(seed);
    EXPECT_TRUE(testing::blanked_cells_excluded(d, make_plan(d, seed))) << "seed " << seed;
  }
}

TEST(Evaluate, NoLeakageIntoFittedModels) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ZeroShotDataset d = plan_dataset(100 + seed);
    const CVPlan plan = make_plan(d, seed);
    for (const char* name : {"baseline", "sr-euclidean", "mplc", "mean"})
      EXPECT_TRUE(testing::no_leakage(d, plan, MethodSpec::from_name(name, RegressorSpec::ridge()),
                                      static_cast<int>(seed % 3), static_cast<int>((seed / 3) % 3)));
  }
}

TEST(Evaluate, MeanMethodScoresAboutOneHundred) {
  GenSpec spec;
  spec.instances = 600;
  spec.features = 5;
  spec.targets = 12;
  spec.side = 3;
  const ZeroShotDataset d = generate(spec).dataset;
  const ScoreRecord r = evaluate(d, spec.name(), MethodSpec::from_name("mean", RegressorSpec::ridge()), make_plan(d, 0));
  EXPECT_NEAR(r.relative_mse, 100.0, 5.0);
  EXPECT_EQ(r.fold_mses.size(), 9u);
}

TEST(Evaluate, RelativeMseIsRatioOfMeans) {
  std::vector<FoldScore> folds = {{1.0, 4.0, 3}, {3.0, 4.0, 2}, {0.0, 0.0, 0}};
  const ScoreRecord r = aggregate("d", MethodSpec::from_name("mplc", RegressorSpec::ridge()), folds);
  EXPECT_DOUBLE_EQ(r.relative_mse, 50.0);
  EXPECT_EQ(r.fold_mses, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(r.method, "mplc");
  EXPECT_EQ(r.learner, "ridge");
}

TEST(Evaluate, FoldScoreMatchesDirectComputation) {
  const ZeroShotDataset d = random_sparse(30, 6, 8);
  const CVPlan plan = make_plan(d, 2);
  const MethodSpec mean = MethodSpec::from_name("mean", RegressorSpec::ridge());
  const FoldScore f = evaluate_fold(d, mean, plan, 1, 2);
  const Projection p = project(d, plan.view(1, 2));
  const double mu = p.observed.y().mean();
  const Vector y = p.unobserved.y();
  EXPECT_NEAR(f.mse, (y.array() - mu).square().mean(), 1e-12);
  EXPECT_NEAR(f.default_mse, f.mse, 1e-12);
  EXPECT_EQ(f.n_test, p.unobserved.n_cells());
}

TEST(Evaluate, Deterministic) {
  const ZeroShotDataset d = random_sparse(50, 8, 9);
  const CVPlan plan = make_plan(d, 4);
  const MethodSpec spec = MethodSpec::from_name("sr-manhattan", RegressorSpec::ridge());
  EXPECT_EQ(evaluate(d, "x", spec, plan), evaluate(d, "x", spec, plan));
}

TEST(Evaluate, PlanShapeMustMatch) {
  const ZeroShotDataset d = random_sparse(50, 8, 9);
  const CVPlan plan = make_plan(random_sparse(51, 8, 9), 4);
  EXPECT_THROW(evaluate(d, "x", MethodSpec::from_name("mean", RegressorSpec::ridge()), plan), InvalidArgument);
}

TEST(Scores, RoundTripExactly) {
  const auto dir = scratch_dir("scores");
  std::vector<ScoreRecord> records = {
      {"R_50_5", "mplc", "ridge", 0.1 + 0.2, {1e-17, 3.14159, 2.0 / 3.0}},
      {"S_5_5", "sr-euclidean", "lsvr", 98.43, {1.0}},
  };
  write_scores(records, dir / "scores.csv");
  EXPECT_EQ(read_scores(dir / "scores.csv"), records);
}

TEST(Scores, RowFormat) {
  const ScoreRecord r{"R_5_5", "baseline", "ridge", 12.5, {0.25, 0.5}};
  EXPECT_EQ(format_score_row(r), "R_5_5,baseline,ridge,12.5,0.25;0.5");
  EXPECT_STREQ(kScoresHeader, "dataset,method,learner,relative_mse,fold_mses");
}

TEST(Scores, MalformedFileNamesTheLine) {
  const auto dir = scratch_dir("bad_scores");
  std::ofstream(dir / "scores.csv") << kScoresHeader << "\nR,mplc,ridge,abc,1\n";
  try {
    read_scores(dir / "scores.csv");
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

}  // namespace
}  // namespace zsreg
