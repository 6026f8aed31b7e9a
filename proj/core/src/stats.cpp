#include "zsreg/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "zsreg/error.hpp"

namespace zsreg {

namespace {

// Studentized range statistic divided by sqrt(2), k = 2..10.
constexpr std::array<double, 9> kQ05 = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
constexpr std::array<double, 9> kQ10 = {1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920};

constexpr int kExactLimit = 25;

}  // namespace

Vector RankTable::average_ranks() const {
  if (ranks.rows() == 0) return Vector::Zero(ranks.cols());
  return ranks.colwise().mean().transpose();
}

Vector rank_values(const VectorRef& values) {
  const auto k = static_cast<std::size_t>(values.size());
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values(static_cast<Eigen::Index>(a)) < values(static_cast<Eigen::Index>(b));
  });
  Vector ranks(values.size());
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i + 1;
    while (j < k && values(static_cast<Eigen::Index>(order[j])) == values(static_cast<Eigen::Index>(order[i]))) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of positions i+1 .. j
    for (std::size_t t = i; t < j; ++t) ranks(static_cast<Eigen::Index>(order[t])) = avg;
    i = j;
  }
  return ranks;
}

RankTable rank_rows(const Matrix& scores, std::vector<std::string> rows, std::vector<std::string> cols) {
  if (!scores.allFinite()) throw InvalidArgument("scores must be finite");
  RankTable t;
  t.rows = std::move(rows);
  t.cols = std::move(cols);
  t.raw_scores = scores;
  t.ranks.resize(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) t.ranks.row(r) = rank_values(scores.row(r).transpose()).transpose();
  return t;
}

FriedmanResult friedman(const RankTable& table) {
  const Eigen::Index n = table.ranks.rows();
  const Eigen::Index k = table.ranks.cols();
  if (n < 2 || k < 2) throw InvalidArgument("friedman needs at least 2 rows and 2 columns");
  const double kd = static_cast<double>(k);
  const Vector mean_ranks = table.average_ranks();
  const double centre = (kd + 1.0) / 2.0;
  FriedmanResult res;
  res.df = static_cast<int>(k - 1);
  res.statistic = 12.0 * static_cast<double>(n) / (kd * (kd + 1.0)) * (mean_ranks.array() - centre).square().sum();
  if (res.statistic <= 0.0) {
    res.statistic = 0.0;
    res.p_value = 1.0;
  } else {
    boost::math::chi_squared dist(static_cast<double>(res.df));
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  }
  return res;
}

double nemenyi_cd(int k, int n, double alpha) {
  if (k < 2 || k > 10) throw InvalidArgument("nemenyi_cd supports 2 to 10 methods");
  if (n < 1) throw InvalidArgument("nemenyi_cd needs at least one dataset");
  const std::array<double, 9>* table = nullptr;
  if (std::abs(alpha - 0.05) < 1e-12) table = &kQ05;
  else if (std::abs(alpha - 0.10) < 1e-12) table = &kQ10;
  else throw InvalidArgument("nemenyi_cd supports alpha 0.05 or 0.10");
  const double q = (*table)[static_cast<std::size_t>(k - 2)];
  return q * std::sqrt(static_cast<double>(k) * (k + 1) / (6.0 * n));
}

WilcoxonResult wilcoxon_signed_rank(const VectorRef& a, const VectorRef& b, WilcoxonMethod method) {
  if (a.size() != b.size()) throw InvalidArgument("wilcoxon needs paired samples of equal length");
  if (a.size() < 5) throw InvalidArgument("wilcoxon needs at least 5 pairs");
  std::vector<double> diffs;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a(i) - b(i);
    if (!std::isfinite(d)) throw InvalidArgument("wilcoxon needs finite samples");
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult res;
  res.n_effective = static_cast<int>(diffs.size());
  if (diffs.empty()) return res;

  Vector abs_d(static_cast<Eigen::Index>(diffs.size()));
  for (std::size_t i = 0; i < diffs.size(); ++i) abs_d(static_cast<Eigen::Index>(i)) = std::abs(diffs[i]);
  const Vector ranks = rank_values(abs_d);
  for (std::size_t i = 0; i < diffs.size(); ++i)
    (diffs[i] > 0 ? res.t_plus : res.t_minus) += ranks(static_cast<Eigen::Index>(i));
  res.w = std::min(res.t_plus, res.t_minus);

  const int n = res.n_effective;
  const bool exact = method == WilcoxonMethod::exact ||
                     (method == WilcoxonMethod::automatic && n <= kExactLimit);
  res.exact = exact;
  if (exact) {
    // Doubled average ranks are integers, so the null distribution of 2*T+ is a
    // subset-sum count over them.
    std::vector<int> r2(diffs.size());
    int total = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      r2[i] = static_cast<int>(std::lround(2.0 * ranks(static_cast<Eigen::Index>(i))));
      total += r2[i];
    }
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    int reach = 0;
    for (int r : r2) {
      for (int s = reach; s >= 0; --s) count[static_cast<std::size_t>(s + r)] += count[static_cast<std::size_t>(s)];
      reach += r;
    }
    const auto w2 = static_cast<int>(std::lround(2.0 * res.w));
    double tail = 0.0;
    for (int s = 0; s <= w2; ++s) tail += count[static_cast<std::size_t>(s)];
    res.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, n));
    return res;
  }

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted(ranks.data(), ranks.data() + ranks.size());
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::abs(res.w - mean) - 0.5) / std::sqrt(var);
  boost::math::normal normal;
  res.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(normal, z)));
  return res;
}

}  // namespace zsreg
