#pragma once

// Rank-based comparison of methods over datasets: Friedman test, Nemenyi
// critical difference and the Wilcoxon signed-rank test.

#include <string>
#include <vector>

#include "zsreg/regression.hpp"

namespace zsreg {

/// Rows are datasets, columns are methods. Lower score means better rank.
struct RankTable {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  Matrix raw_scores;
  Matrix ranks;

  /// Column means of ranks (the "Avg. Rank" row).
  Vector average_ranks() const;
};

/// Rank 1 is the smallest value; ties share the average of their positions.
Vector rank_values(const VectorRef& values);

RankTable rank_rows(const Matrix& scores, std::vector<std::string> rows = {},
                    std::vector<std::string> cols = {});

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int df = 0;
};

FriedmanResult friedman(const RankTable& table);

/// q_alpha(k) * sqrt(k (k + 1) / (6 n)). Supports k in [2, 10], alpha 0.05 or 0.10.
double nemenyi_cd(int k, int n, double alpha);

enum class WilcoxonMethod { automatic, exact, normal };

struct WilcoxonResult {
  double w = 0.0;  // min(T+, T-)
  double t_plus = 0.0;
  double t_minus = 0.0;
  int n_effective = 0;  // pairs with a non-zero difference
  double p_value = 1.0;
  bool exact = false;
};

/// Two-sided, at least 5 pairs. automatic: exact null distribution up to 25 non-zero differences
/// (ties included), normal approximation with tie and continuity correction above.
WilcoxonResult wilcoxon_signed_rank(const VectorRef& a, const VectorRef& b,
                                    WilcoxonMethod method = WilcoxonMethod::automatic);

}  // namespace zsreg
