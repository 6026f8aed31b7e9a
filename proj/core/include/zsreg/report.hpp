#pragma once

// Tables from score records: per-learner rank tables with an Avg. Rank row,
// Friedman/Nemenyi summaries and pairwise Wilcoxon tests.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zsreg/evaluation.hpp"
#include "zsreg/stats.hpp"

namespace zsreg {

/// Scores are rounded to two decimals before ranking, as they are displayed.
double displayed_score(double relative_mse);

struct LearnerTable {
  std::string learner;
  RankTable table;  // complete rows only
  std::vector<std::string> incomplete;  // datasets missing some method
};

/// One table per learner, rows and columns in first-appearance order.
std::vector<LearnerTable> learner_tables(const std::vector<ScoreRecord>& records);

struct PairTest {
  std::string a;
  std::string b;
  int wins_a = 0;
  int wins_b = 0;
  int ties = 0;
  std::optional<WilcoxonResult> result;  // empty with fewer than 5 pairs
};

/// Per-pair ranks (1 better, 2 worse, 1.5 tie) pooled over every learner and
/// dataset where both methods have a score.
std::vector<PairTest> pairwise_wilcoxon(const std::vector<ScoreRecord>& records);

/// Writes ranks.csv, friedman.txt, wilcoxon.csv and report.md into dir and
/// returns the markdown.
std::string write_reports(const std::vector<ScoreRecord>& records, const std::filesystem::path& dir);

}  // namespace zsreg
