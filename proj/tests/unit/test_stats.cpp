#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "zsreg/error.hpp"
#include "zsreg/stats.hpp"

namespace zsreg {
namespace {

using testing::gaussian;

Vector row(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

// Two-sided exact p by enumerating every sign assignment of the ranked |d|.
double brute_force_exact_p(const Vector& a, const Vector& b) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) d.push_back(a(i) - b(i));
  const std::size_t n = d.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0.0;
    double equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) less += 1.0;
      if (std::abs(d[j]) == std::abs(d[i])) equal += 1.0;
    }
    rank[i] = less + (equal + 1.0) / 2.0;
  }
  double tp = 0.0;
  double tm = 0.0;
  for (std::size_t i = 0; i < n; ++i) (d[i] > 0 ? tp : tm) += rank[i];
  const double w = std::min(tp, tm);
  std::size_t at_most = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) t += rank[i];
    if (t <= w + 1e-9) ++at_most;
  }
  return std::min(1.0, 2.0 * static_cast<double>(at_most) / std::ldexp(1.0, static_cast<int>(n)));
}

TEST(Ranks, SimpleAndTiedRows) {
  EXPECT_EQ(rank_values(row({1, 2, 3, 4})), row({1, 2, 3, 4}));
  EXPECT_EQ(rank_values(row({0.83, 0.83, 0.83, 98.43})), row({2, 2, 2, 4}));
  EXPECT_EQ(rank_values(row({5, 1, 5, 0})), row({3.5, 2, 3.5, 1}));
}

TEST(Ranks, RowSumsAndIdempotence) {
  const Matrix scores = gaussian(30, 6, 1).array().round();  // plenty of ties
  const RankTable t = rank_rows(scores);
  for (Eigen::Index i = 0; i < t.ranks.rows(); ++i) EXPECT_DOUBLE_EQ(t.ranks.row(i).sum(), 21.0);
  EXPECT_EQ(rank_rows(t.ranks).ranks, t.ranks);
  EXPECT_EQ(t.raw_scores, scores);
  EXPECT_TRUE(t.average_ranks().isApprox(t.ranks.colwise().mean().transpose()));
}

TEST(Ranks, RejectNonFinite) {
  Matrix m = Matrix::Ones(2, 2);
  m(1, 1) = INFINITY;
  EXPECT_THROW(rank_rows(m), InvalidArgument);
}

TEST(Friedman, UniformOrderingOverTwelveDatasets) {
  Matrix s(12, 4);
  for (int i = 0; i < 12; ++i) s.row(i) << 4, 3, 2, 1;
  const FriedmanResult f = friedman(rank_rows(s));
  EXPECT_NEAR(f.statistic, 36.0, 1e-12);
  EXPECT_EQ(f.df, 3);
  // Chi-square survival with 3 df: erfc(sqrt(x/2)) + sqrt(2x/pi) exp(-x/2).
  const double x = 36.0;
  const double sf = std::erfc(std::sqrt(x / 2)) + std::sqrt(2 * x / std::numbers::pi) * std::exp(-x / 2);
  EXPECT_NEAR(f.p_value, sf, 1e-12);
}

TEST(Friedman, ExchangeableColumnsGiveZero) {
  const FriedmanResult f = friedman(rank_rows(Matrix::Constant(8, 5, 2.5)));
  EXPECT_EQ(f.statistic, 0.0);
  EXPECT_EQ(f.p_value, 1.0);
}

TEST(Friedman, InvariantUnderRowPermutationAndMonotoneMaps) {
  const Matrix s = gaussian(10, 4, 2);
  const double base = friedman(rank_rows(s)).statistic;
  const Matrix reversed = s.colwise().reverse();
  EXPECT_DOUBLE_EQ(friedman(rank_rows(reversed)).statistic, base);
  const Matrix mapped = (s.array() * 3.0).exp() + 7.0;
  EXPECT_DOUBLE_EQ(friedman(rank_rows(mapped)).statistic, base);
}

TEST(Friedman, NeedsTwoRowsAndColumns) {
  EXPECT_THROW(friedman(rank_rows(Matrix::Ones(1, 3))), InvalidArgument);
  EXPECT_THROW(friedman(rank_rows(Matrix::Ones(3, 1))), InvalidArgument);
}

TEST(Nemenyi, TableValues) {
  EXPECT_NEAR(nemenyi_cd(4, 12, 0.05), 2.569 * std::sqrt(20.0 / 72.0), 1e-12);
  EXPECT_NEAR(nemenyi_cd(2, 9, 0.05), 1.960 / 3.0, 1e-12);
  EXPECT_NEAR(nemenyi_cd(10, 5, 0.10), 2.920 * std::sqrt(110.0 / 30.0), 1e-12);
}

TEST(Nemenyi, DecreasesWithMoreDatasets) {
  for (int n = 1; n < 50; ++n) EXPECT_LT(nemenyi_cd(5, n + 1, 0.05), nemenyi_cd(5, n, 0.05));
}

TEST(Nemenyi, UnsupportedArguments) {
  EXPECT_THROW(nemenyi_cd(11, 5, 0.05), InvalidArgument);
  EXPECT_THROW(nemenyi_cd(1, 5, 0.05), InvalidArgument);
  EXPECT_THROW(nemenyi_cd(4, 5, 0.01), InvalidArgument);
}

TEST(Wilcoxon, IdenticalSamples) {
  const Vector a = gaussian(10, 1, 3).col(0);
  const WilcoxonResult r = wilcoxon_signed_rank(a, a);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.n_effective, 0);
}

TEST(Wilcoxon, UnanimousPairs) {
  const Vector one = Vector::Ones(24);
  const Vector two = Vector::Constant(24, 2.0);
  const WilcoxonResult r24 = wilcoxon_signed_rank(one, two);
  EXPECT_LT(r24.p_value, 0.001);
  EXPECT_TRUE(r24.exact);
  EXPECT_EQ(r24.t_plus, 0.0);
  EXPECT_EQ(r24.t_minus, 300.0);
  // All 12 signs agree: 2 / 2^12.
  const WilcoxonResult r12 = wilcoxon_signed_rank(Vector::Ones(12), Vector::Constant(12, 2.0));
  EXPECT_DOUBLE_EQ(r12.p_value, 2.0 / 4096.0);
}

TEST(Wilcoxon, KnownSmallSampleValue) {
  // n = 10, W = 8: P(T <= 8) = 25 / 1024.
  Vector a(10);
  Vector b = Vector::Zero(10);
  a << 1, 2, 3, 4, 5, 6, 7, -8, 9, 10;
  const WilcoxonResult r = wilcoxon_signed_rank(a, b);
  EXPECT_EQ(r.w, 8.0);
  EXPECT_DOUBLE_EQ(r.p_value, 50.0 / 1024.0);
}

TEST(Wilcoxon, ExactMatchesSubsetEnumeration) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(seed % 12);
    // Rounded values give ties among |d| and some zero differences.
    const Vector a = (gaussian(n, 1, 10 + seed).col(0) * 2.0).array().round();
    const Vector b = (gaussian(n, 1, 60 + seed).col(0) * 2.0).array().round();
    const WilcoxonResult r = wilcoxon_signed_rank(a, b, WilcoxonMethod::exact);
    EXPECT_NEAR(r.p_value, brute_force_exact_p(a, b), 1e-12) << "seed " << seed;
  }
}

TEST(Wilcoxon, SymmetricInArguments) {
  const Vector a = gaussian(15, 1, 4).col(0);
  const Vector b = gaussian(15, 1, 5).col(0);
  const WilcoxonResult ab = wilcoxon_signed_rank(a, b);
  const WilcoxonResult ba = wilcoxon_signed_rank(b, a);
  EXPECT_EQ(ab.p_value, ba.p_value);
  EXPECT_EQ(ab.t_plus, ba.t_minus);
  EXPECT_EQ(ab.t_minus, ba.t_plus);
}

TEST(Wilcoxon, ExactAndNormalAgreeAtTwentyFive) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Vector a = gaussian(25, 1, 100 + seed).col(0);
    const Vector b = gaussian(25, 1, 200 + seed).col(0) * 0.8 + Vector::Constant(25, 0.2);
    const double exact = wilcoxon_signed_rank(a, b, WilcoxonMethod::exact).p_value;
    const double normal = wilcoxon_signed_rank(a, b, WilcoxonMethod::normal).p_value;
    EXPECT_NEAR(exact, normal, 0.01) << "seed " << seed;
  }
}

TEST(Wilcoxon, AutomaticSwitchesAboveTwentyFive) {
  const Vector a = gaussian(26, 1, 7).col(0);
  const Vector b = gaussian(26, 1, 8).col(0);
  EXPECT_FALSE(wilcoxon_signed_rank(a, b).exact);
  EXPECT_TRUE(wilcoxon_signed_rank(a.head(25), b.head(25)).exact);
}

TEST(Wilcoxon, Preconditions) {
  EXPECT_THROW(wilcoxon_signed_rank(Vector::Ones(4), Vector::Zero(4)), InvalidArgument);
  EXPECT_THROW(wilcoxon_signed_rank(Vector::Ones(6), Vector::Zero(5)), InvalidArgument);
}

}  // namespace
}  // namespace zsreg
