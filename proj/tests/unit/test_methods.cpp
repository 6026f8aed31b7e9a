#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "zsreg/error.hpp"
#include "zsreg/methods.hpp"
#include "zsreg/random.hpp"
#include "zsreg/toy.hpp"

namespace zsreg {
namespace {

using testing::gaussian;

Projection toy_projection() {
  const ZeroShotDataset toy = gen_toy();
  return project(toy, toy_view(toy));
}

// Observed side with n instances per target, y = x . theta_t + b_t + small noise.
SplitSide random_observed(std::size_t m, std::size_t per_target, Eigen::Index ax, Eigen::Index as,
                          std::uint64_t seed) {
  SplitSide side;
  side.X = gaussian(static_cast<Eigen::Index>(m * per_target), ax, seed);
  side.S = gaussian(static_cast<Eigen::Index>(m), as, seed + 1);
  const Matrix theta = gaussian(static_cast<Eigen::Index>(m), ax + 1, seed + 2);
  const Matrix noise = gaussian(static_cast<Eigen::Index>(m * per_target), 1, seed + 3);
  for (std::size_t t = 0; t < m; ++t) {
    side.target_index.push_back(t);
    for (std::size_t r = 0; r < per_target; ++r) {
      const auto i = static_cast<Eigen::Index>(t * per_target + r);
      const auto tt = static_cast<Eigen::Index>(t);
      const double y = side.X.row(i).dot(theta.row(tt).head(ax)) + theta(tt, ax) + 0.1 * noise(i, 0);
      side.cells.push_back({static_cast<std::size_t>(i), t, y});
    }
  }
  for (std::size_t i = 0; i < m * per_target; ++i) side.instance_index.push_back(i);
  return side;
}

TargetModels random_models(std::size_t m, Eigen::Index ax, std::uint64_t seed) {
  const Matrix p = gaussian(static_cast<Eigen::Index>(m), ax + 1, seed);
  TargetModels out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out.models.push_back(LinearModel::from_parameters(p.row(i).transpose()));
    out.diagnostics.emplace_back();
  }
  return out;
}

TEST(Toy, PerTargetModelsRecoverTheta) {
  const Projection p = toy_projection();
  const TargetModels models = fit_per_target(p.observed, toy_learner(), 0);
  ASSERT_EQ(models.size(), 2u);
  EXPECT_NEAR(models.models[0].weights(0), 1.0, 1e-6);
  EXPECT_NEAR(models.models[0].weights(1), 0.0, 1e-6);
  EXPECT_NEAR(models.models[1].weights(0), 0.0, 1e-6);
  EXPECT_NEAR(models.models[1].weights(1), 1.0, 1e-6);
  EXPECT_NEAR(models.models[0].intercept, 0.0, 1e-6);
}

TEST(Toy, SrGivesTheAverageOfBothModels) {
  const Projection p = toy_projection();
  const Vector x = p.unobserved.X.row(0).transpose();
  const Vector s = p.unobserved.S.row(0).transpose();
  for (const char* name : {"sr-euclidean", "sr-manhattan"}) {
    const FittedMethod f = fit_method(MethodSpec::from_name(name, toy_learner()), p.observed, 0);
    EXPECT_NEAR(f.predict(x, s), 1.25, 1e-6) << name;
  }
}

TEST(Toy, MplcParameterModelsFollowSideInformation) {
  const Projection p = toy_projection();
  const TargetModels models = fit_per_target(p.observed, toy_learner(), 0);
  const MPLCModels g = fit_mplc(models, p.observed.S, toy_learner(), 0);
  ASSERT_EQ(g.param_models.size(), 3u);
  // g_theta1(s) = s1, g_theta2(s) = s2, intercept parameter identically 0.
  EXPECT_NEAR(g.param_models[0].weights(0), 1.0, 1e-6);
  EXPECT_NEAR(g.param_models[0].weights(1), 0.0, 1e-6);
  EXPECT_NEAR(g.param_models[1].weights(0), 0.0, 1e-6);
  EXPECT_NEAR(g.param_models[1].weights(1), 1.0, 1e-6);
  EXPECT_NEAR(g.param_models[2].weights.norm(), 0.0, 1e-6);

  // Inverting the two weight g fits by least squares recovers the observed side rows.
  Matrix A(2, 2);
  A.row(0) = g.param_models[0].weights.transpose();
  A.row(1) = g.param_models[1].weights.transpose();
  for (std::size_t t = 0; t < 2; ++t) {
    Vector theta(2);
    theta << models.models[t].weights(0) - g.param_models[0].intercept,
        models.models[t].weights(1) - g.param_models[1].intercept;
    const Vector s = A.colPivHouseholderQr().solve(theta);
    EXPECT_LT((s - p.observed.S.row(static_cast<Eigen::Index>(t)).transpose()).norm(), 1e-6);
  }

  const Vector x = p.unobserved.X.row(0).transpose();
  const Vector s = p.unobserved.S.row(0).transpose();
  EXPECT_NEAR(mplc_predict(g, s, x), 2.5, 1e-6);
}

TEST(Toy, BaselineMissesTheTrueValue) {
  const Projection p = toy_projection();
  const LinearModel m = fit_baseline(p.observed, toy_learner(), 0);
  const Vector x = p.unobserved.X.row(0).transpose();
  const Vector s = p.unobserved.S.row(0).transpose();
  EXPECT_GT(std::abs(baseline_predict(m, x, s) - 2.5), 1.0);
}

TEST(Baseline, SideColumnsGetNearZeroWeightOnToy) {
  const Projection p = toy_projection();
  const LinearModel m = fit_baseline(p.observed, toy_learner(), 0);
  ASSERT_EQ(m.weights.size(), 4);
  // The fit averages the features; the side columns barely matter.
  EXPECT_NEAR(m.weights(0), m.weights(1), 0.1);
  EXPECT_LT(std::abs(m.weights(2)), 0.1 * std::abs(m.weights(0)));
  EXPECT_LT(std::abs(m.weights(3)), 0.1 * std::abs(m.weights(0)));
}

TEST(Baseline, WithoutSideInformationEqualsPlainRegression) {
  SplitSide obs = random_observed(4, 20, 3, 1, 1);
  obs.S = Matrix(4, 0);
  const RegressorSpec spec = RegressorSpec::ridge();
  const LinearModel b = fit_baseline(obs, spec, 5);
  const LinearModel plain = grid_search_fit(obs.X, obs.y(), spec, 5).model;
  EXPECT_LT((b.weights - plain.weights).norm(), 1e-12);
  EXPECT_NEAR(b.intercept, plain.intercept, 1e-12);
}

TEST(PerTarget, ConstantTargetGivesConstantModel) {
  SplitSide obs = random_observed(2, 10, 2, 1, 2);
  for (Cell& c : obs.cells)
    if (c.target == 1) c.value = 3.5;
  const TargetModels models = fit_per_target(obs, RegressorSpec::ridge(), 0);
  for (Eigen::Index i = 0; i < obs.X.rows(); ++i)
    EXPECT_NEAR(models.models[1].predict(obs.X.row(i).transpose()), 3.5, 1e-12);
}

TEST(PerTarget, SingleCellTargetIsInterceptOnly) {
  SplitSide obs = random_observed(2, 10, 2, 1, 3);
  obs.cells.erase(std::remove_if(obs.cells.begin(), obs.cells.end(),
                                 [](const Cell& c) { return c.target == 1 && c.instance != 10; }),
                  obs.cells.end());
  const TargetModels models = fit_per_target(obs, RegressorSpec::ridge(), 0);
  EXPECT_TRUE(models.diagnostics[1].intercept_only);
  EXPECT_EQ(models.models[1].weights.norm(), 0.0);
  EXPECT_EQ(models.models[1].intercept, obs.cells.back().value);
  EXPECT_FALSE(models.diagnostics[0].intercept_only);
}

TEST(PerTarget, EmptyTargetIsAnError) {
  SplitSide obs = random_observed(2, 10, 2, 1, 4);
  obs.cells.erase(std::remove_if(obs.cells.begin(), obs.cells.end(), [](const Cell& c) { return c.target == 1; }),
                  obs.cells.end());
  EXPECT_THROW(fit_per_target(obs, RegressorSpec::ridge(), 0), InvalidArgument);
}

TEST(PerTarget, ShapesAndDeterminism) {
  const SplitSide obs = random_observed(6, 15, 4, 2, 5);
  const TargetModels a = fit_per_target(obs, RegressorSpec::ridge(), 9);
  const TargetModels b = fit_per_target(obs, RegressorSpec::ridge(), 9);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a.models[t].weights.size(), 4);
    EXPECT_EQ(a.models[t], b.models[t]);
  }
}

TEST(SR, MatchesScalarWeightedAverage) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TargetModels models = random_models(5, 3, 100 + seed);
    const Matrix So = gaussian(5, 4, 200 + seed);
    const Vector s = gaussian(4, 1, 300 + seed).col(0);
    const Vector x = gaussian(3, 1, 400 + seed).col(0);
    for (Distance kind : {Distance::euclidean, Distance::manhattan}) {
      double num = 0.0;
      double den = 0.0;
      for (int i = 0; i < 5; ++i) {
        double d = 0.0;
        for (int j = 0; j < 4; ++j) {
          const double diff = So(i, j) - s(j);
          d += kind == Distance::manhattan ? std::abs(diff) : diff * diff;
        }
        if (kind == Distance::euclidean) d = std::sqrt(d);
        double f = models.models[static_cast<std::size_t>(i)].intercept;
        for (int j = 0; j < 3; ++j) f += models.models[static_cast<std::size_t>(i)].weights(j) * x(j);
        num += f / d;
        den += 1.0 / d;
      }
      SRConfig cfg;
      cfg.distance = kind;
      EXPECT_NEAR(sr_predict(models, So, s, x, cfg), num / den, 1e-12);
    }
  }
}

TEST(SR, SingleTargetReturnsItsPrediction) {
  const TargetModels models = random_models(1, 2, 1);
  const Matrix So = gaussian(1, 2, 2);
  const Vector x = gaussian(2, 1, 3).col(0);
  for (double scale : {1e-6, 1.0, 1e6}) {
    const Vector s = scale * Vector::Ones(2);
    EXPECT_NEAR(sr_predict(models, So, s, x, {}), models.models[0].predict(x), 1e-12);
  }
}

TEST(SR, PredictionIsConvexCombinationOfSelectedModels) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TargetModels models = random_models(7, 3, 10 + seed);
    const Matrix So = gaussian(7, 2, 20 + seed);
    const Vector s = gaussian(2, 1, 30 + seed).col(0);
    const Vector x = gaussian(3, 1, 40 + seed).col(0);
    for (std::size_t k : {1u, 3u, 7u}) {
      SRConfig cfg;
      cfg.k = k;
      const auto weights = sr_weights(So, s, cfg);
      ASSERT_EQ(weights.size(), k);
      double lo = INFINITY;
      double hi = -INFINITY;
      for (const auto& [row, w] : weights) {
        const double f = models.models[row].predict(x);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
      }
      const double p = sr_predict(models, So, s, x, cfg);
      EXPECT_GE(p, lo - 1e-12);
      EXPECT_LE(p, hi + 1e-12);
    }
  }
}

TEST(SR, KEqualsOneIsTheNearestTarget) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TargetModels models = random_models(6, 2, 50 + seed);
    const Matrix So = gaussian(6, 3, 60 + seed);
    const Vector s = gaussian(3, 1, 70 + seed).col(0);
    const Vector x = gaussian(2, 1, 80 + seed).col(0);
    Eigen::Index nearest = 0;
    (So.rowwise() - s.transpose()).rowwise().norm().minCoeff(&nearest);
    SRConfig cfg;
    cfg.k = 1;
    EXPECT_DOUBLE_EQ(sr_predict(models, So, s, x, cfg), models.models[static_cast<std::size_t>(nearest)].predict(x));
  }
}

TEST(SR, ExactMatchesTakeOver) {
  const TargetModels models = random_models(4, 2, 5);
  Matrix So = gaussian(4, 2, 6);
  const Vector s = So.row(1).transpose();
  So.row(3) = s.transpose();
  const Vector x = gaussian(2, 1, 7).col(0);
  const double expected = 0.5 * (models.models[1].predict(x) + models.models[3].predict(x));
  EXPECT_NEAR(sr_predict(models, So, s, x, {}), expected, 1e-12);
}

TEST(SR, AllRowsEqualGiveUnweightedMean) {
  const TargetModels models = random_models(5, 2, 8);
  const Vector s = gaussian(3, 1, 9).col(0);
  const Matrix So = s.transpose().replicate(5, 1);
  const Vector x = gaussian(2, 1, 10).col(0);
  double mean = 0.0;
  for (const LinearModel& m : models.models) mean += m.predict(x) / 5.0;
  EXPECT_NEAR(sr_predict(models, So, s, x, {}), mean, 1e-12);
}

TEST(SR, RejectsBadK) {
  const TargetModels models = random_models(3, 2, 1);
  SRConfig cfg;
  cfg.k = 4;
  EXPECT_THROW(sr_predict(models, gaussian(3, 2, 2), Vector::Zero(2), Vector::Zero(2), cfg), InvalidArgument);
  cfg.k = 0;
  EXPECT_THROW(sr_predict(models, gaussian(3, 2, 2), Vector::Zero(2), Vector::Zero(2), cfg), InvalidArgument);
}

TEST(MPLC, PredictMatchesTwoStepScalarEvaluation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int ax = 4;
    const int as = 3;
    MPLCModels g;
    const Matrix p = gaussian(ax + 1, as + 1, 500 + seed);
    for (int j = 0; j <= ax; ++j) g.param_models.push_back(LinearModel::from_parameters(p.row(j).transpose()));
    const Vector s = gaussian(as, 1, 600 + seed).col(0);
    const Vector x = gaussian(ax, 1, 700 + seed).col(0);
    double theta[ax + 1];
    for (int j = 0; j <= ax; ++j) {
      theta[j] = p(j, as);
      for (int k = 0; k < as; ++k) theta[j] += p(j, k) * s(k);
    }
    double expected = theta[ax];
    for (int j = 0; j < ax; ++j) expected += theta[j] * x(j);
    EXPECT_NEAR(mplc_predict(g, s, x), expected, 1e-12);
  }
}

TEST(MPLC, SharedParametersAreAFixedPoint) {
  TargetModels models;
  Vector theta(4);
  theta << 0.5, -1.25, 2.0, 0.75;
  for (int i = 0; i < 5; ++i) {
    models.models.push_back(LinearModel::from_parameters(theta));
    models.diagnostics.emplace_back();
  }
  const Matrix distinct = gaussian(5, 2, 1);
  const Matrix identical = distinct.row(0).replicate(5, 1);
  for (const Matrix* So : {&distinct, &identical}) {
    const MPLCModels g = fit_mplc(models, *So, RegressorSpec::ridge(), 0);
    ASSERT_EQ(g.param_models.size(), 4u);
    for (const LinearModel& gm : g.param_models) EXPECT_EQ(gm.weights.size(), 2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Vector s = gaussian(2, 1, 10 + seed).col(0);
      EXPECT_LT((g.parameters_for(s) - theta).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(MPLC, NeedsTwoTargets) {
  EXPECT_THROW(fit_mplc(random_models(1, 2, 1), gaussian(1, 2, 2), RegressorSpec::ridge(), 0), InvalidArgument);
}

// Reverses the order of observed targets, keeping every target's global id.
SplitSide reverse_targets(const SplitSide& obs) {
  SplitSide out = obs;
  const auto m = static_cast<std::size_t>(obs.S.rows());
  for (std::size_t t = 0; t < m; ++t) {
    out.S.row(static_cast<Eigen::Index>(m - 1 - t)) = obs.S.row(static_cast<Eigen::Index>(t));
    out.target_index[m - 1 - t] = obs.target_index[t];
  }
  for (Cell& c : out.cells) c.target = m - 1 - c.target;
  return out;
}

TEST(Methods, TargetOrderDoesNotMatter) {
  const SplitSide obs = random_observed(6, 12, 3, 2, 11);
  const SplitSide rev = reverse_targets(obs);
  const Vector s = gaussian(2, 1, 12).col(0);
  const Vector x = gaussian(3, 1, 13).col(0);
  for (const char* name : {"baseline", "sr-euclidean", "sr-manhattan", "mplc", "mean"}) {
    const MethodSpec spec = MethodSpec::from_name(name, RegressorSpec::ridge());
    EXPECT_NEAR(fit_method(spec, obs, 3).predict(x, s), fit_method(spec, rev, 3).predict(x, s), 1e-9) << name;
  }
}

TEST(Methods, BatchPredictionMatchesPerCell) {
  const SplitSide obs = random_observed(5, 10, 3, 2, 21);
  SplitSide unobs = random_observed(2, 4, 3, 2, 22);
  for (const char* name : {"baseline", "sr-euclidean", "sr-manhattan-k2", "mplc", "mean"}) {
    const FittedMethod f = fit_method(MethodSpec::from_name(name, RegressorSpec::ridge()), obs, 1);
    const Vector batch = f.predict(unobs);
    ASSERT_EQ(batch.size(), static_cast<Eigen::Index>(unobs.cells.size()));
    for (std::size_t c = 0; c < unobs.cells.size(); ++c) {
      const Cell& cell = unobs.cells[c];
      const Vector x = unobs.X.row(static_cast<Eigen::Index>(cell.instance)).transpose();
      const Vector s = unobs.S.row(static_cast<Eigen::Index>(cell.target)).transpose();
      EXPECT_NEAR(batch(static_cast<Eigen::Index>(c)), f.predict(x, s), 1e-12) << name;
    }
  }
}

TEST(Methods, MeanPredictsObservedMean) {
  const SplitSide obs = random_observed(3, 7, 2, 2, 31);
  const FittedMethod f = fit_method(MethodSpec::from_name("mean", RegressorSpec::ridge()), obs, 0);
  EXPECT_NEAR(f.predict(Vector::Zero(2), Vector::Ones(2)), obs.y().mean(), 1e-12);
}

TEST(MethodSpec, NamesRoundTrip) {
  for (const char* name : {"baseline", "sr-euclidean", "sr-manhattan", "mplc", "mean", "sr-euclidean-k3"})
    EXPECT_EQ(MethodSpec::from_name(name, RegressorSpec::ridge()).name(), name);
  EXPECT_THROW(MethodSpec::from_name("sr-cosine", RegressorSpec::ridge()), InvalidArgument);
}

}  // namespace
}  // namespace zsreg
