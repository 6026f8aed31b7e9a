#include "zsreg/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "zsreg/error.hpp"

namespace zsreg {

namespace {

template <typename T>
std::size_t index_of(std::vector<T>& list, const T& value) {
  const auto it = std::find(list.begin(), list.end(), value);
  if (it != list.end()) return static_cast<std::size_t>(it - list.begin());
  list.push_back(value);
  return list.size() - 1;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string rank_text(double r) { return fmt::format("{:.1f}", r); }

}  // namespace

double displayed_score(double relative_mse) {
  if (!std::isfinite(relative_mse)) return relative_mse;
  return std::round(relative_mse * 100.0) / 100.0;
}

std::vector<LearnerTable> learner_tables(const std::vector<ScoreRecord>& records) {
  std::vector<std::string> learners;
  std::vector<std::string> methods;
  for (const ScoreRecord& r : records) {
    index_of(learners, r.learner);
    index_of(methods, r.method);
  }
  std::vector<LearnerTable> out;
  for (const std::string& learner : learners) {
    std::vector<std::string> datasets;
    std::map<std::pair<std::size_t, std::size_t>, double> score;
    for (const ScoreRecord& r : records) {
      if (r.learner != learner) continue;
      const std::size_t d = index_of(datasets, r.dataset);
      const std::size_t m = index_of(methods, r.method);
      score[{d, m}] = r.relative_mse;
    }
    LearnerTable lt;
    lt.learner = learner;
    std::vector<std::string> complete;
    std::vector<std::vector<double>> rows;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      std::vector<double> row;
      bool ok = true;
      for (std::size_t m = 0; m < methods.size() && ok; ++m) {
        const auto it = score.find({d, m});
        if (it == score.end() || !std::isfinite(it->second)) ok = false;
        else row.push_back(displayed_score(it->second));
      }
      if (ok) {
        complete.push_back(datasets[d]);
        rows.push_back(std::move(row));
      } else {
        lt.incomplete.push_back(datasets[d]);
      }
    }
    Matrix scores(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(methods.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < methods.size(); ++j)
        scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    lt.table = rank_rows(scores, std::move(complete), methods);
    out.push_back(std::move(lt));
  }
  return out;
}

std::vector<PairTest> pairwise_wilcoxon(const std::vector<ScoreRecord>& records) {
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> by_row;  // (learner, dataset)
  for (const ScoreRecord& r : records) {
    index_of(methods, r.method);
    if (std::isfinite(r.relative_mse)) by_row[{r.learner, r.dataset}][r.method] = displayed_score(r.relative_mse);
  }
  std::vector<PairTest> out;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      PairTest pt;
      pt.a = methods[i];
      pt.b = methods[j];
      std::vector<double> ra;
      std::vector<double> rb;
      for (const auto& [key, scores] : by_row) {
        const auto ia = scores.find(pt.a);
        const auto ib = scores.find(pt.b);
        if (ia == scores.end() || ib == scores.end()) continue;
        if (ia->second < ib->second) {
          ++pt.wins_a;
          ra.push_back(1.0);
          rb.push_back(2.0);
        } else if (ib->second < ia->second) {
          ++pt.wins_b;
          ra.push_back(2.0);
          rb.push_back(1.0);
        } else {
          ++pt.ties;
          ra.push_back(1.5);
          rb.push_back(1.5);
        }
      }
      if (ra.size() >= 5) {
        pt.result = wilcoxon_signed_rank(Eigen::Map<const Vector>(ra.data(), static_cast<Eigen::Index>(ra.size())),
                                         Eigen::Map<const Vector>(rb.data(), static_cast<Eigen::Index>(rb.size())));
      }
      out.push_back(std::move(pt));
    }
  }
  return out;
}

std::string write_reports(const std::vector<ScoreRecord>& records, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::vector<LearnerTable> tables = learner_tables(records);

  std::string ranks_csv;
  std::string friedman_txt;
  std::string md = "# Relative MSE (%)\n\nRanks in brackets; lower is better.\n";
  for (const LearnerTable& lt : tables) {
    const RankTable& t = lt.table;
    if (ranks_csv.empty()) {
      ranks_csv = "learner,dataset";
      for (const std::string& m : t.cols) ranks_csv += "," + m;
      ranks_csv += "\n";
    }
    md += fmt::format("\n## {}\n\n| Dataset |", lt.learner);
    for (const std::string& m : t.cols) md += fmt::format(" {} |", m);
    md += "\n|---|";
    for (std::size_t j = 0; j < t.cols.size(); ++j) md += "---|";
    md += "\n";
    for (Eigen::Index i = 0; i < t.ranks.rows(); ++i) {
      const std::string& name = t.rows[static_cast<std::size_t>(i)];
      ranks_csv += lt.learner + "," + name;
      md += fmt::format("| {} |", name);
      for (Eigen::Index j = 0; j < t.ranks.cols(); ++j) {
        ranks_csv += "," + rank_text(t.ranks(i, j));
        md += fmt::format(" {:.2f}({}) |", t.raw_scores(i, j), rank_text(t.ranks(i, j)));
      }
      ranks_csv += "\n";
      md += "\n";
    }
    const Vector avg = t.average_ranks();
    ranks_csv += lt.learner + ",Avg. Rank";
    md += "| Avg. Rank |";
    for (Eigen::Index j = 0; j < avg.size(); ++j) {
      ranks_csv += "," + rank_text(avg(j));
      md += fmt::format(" ({}) |", rank_text(avg(j)));
    }
    ranks_csv += "\n";
    md += "\n";
    if (!lt.incomplete.empty()) {
      md += "\nLeft out (missing scores):";
      for (const std::string& d : lt.incomplete) md += " " + d;
      md += "\n";
    }

    const auto n = static_cast<int>(t.ranks.rows());
    const auto k = static_cast<int>(t.ranks.cols());
    friedman_txt += fmt::format("[{}]\ndatasets: {}\nmethods: {}\n", lt.learner, n, k);
    if (n >= 2 && k >= 2) {
      const FriedmanResult f = friedman(t);
      friedman_txt += fmt::format("friedman_chi2: {:.4f}\ndf: {}\np_value: {:.6g}\n", f.statistic, f.df, f.p_value);
      md += fmt::format("\nFriedman chi2 = {:.4f} (df {}), p = {:.4g}", f.statistic, f.df, f.p_value);
      if (k <= 10) {
        const double cd05 = nemenyi_cd(k, n, 0.05);
        const double cd10 = nemenyi_cd(k, n, 0.10);
        friedman_txt += fmt::format("nemenyi_cd_0.05: {:.4f}\nnemenyi_cd_0.10: {:.4f}\n", cd05, cd10);
        md += fmt::format("; Nemenyi CD(0.05) = {:.3f}, CD(0.10) = {:.3f}", cd05, cd10);
      }
      md += "\n";
    } else {
      friedman_txt += "friedman: not enough datasets or methods\n";
    }
    friedman_txt += "\n";
  }

  const std::vector<PairTest> pairs = pairwise_wilcoxon(records);
  std::string wilcoxon_csv = "method_a,method_b,pairs,wins_a,wins_b,ties,w,p_value\n";
  md += "\n## Wilcoxon signed-rank (pairwise ranks, all learners)\n\n| A | B | wins A | wins B | ties | p |\n|---|---|---|---|---|---|\n";
  for (const PairTest& p : pairs) {
    const int total = p.wins_a + p.wins_b + p.ties;
    if (p.result) {
      wilcoxon_csv += fmt::format("{},{},{},{},{},{},{},{:.6g}\n", p.a, p.b, total, p.wins_a, p.wins_b, p.ties,
                                  p.result->w, p.result->p_value);
      md += fmt::format("| {} | {} | {} | {} | {} | {:.4g} |\n", p.a, p.b, p.wins_a, p.wins_b, p.ties,
                        p.result->p_value);
    } else {
      wilcoxon_csv += fmt::format("{},{},{},{},{},{},NA,NA\n", p.a, p.b, total, p.wins_a, p.wins_b, p.ties);
      md += fmt::format("| {} | {} | {} | {} | {} | n/a |\n", p.a, p.b, p.wins_a, p.wins_b, p.ties);
    }
  }

  write_text(dir / "ranks.csv", ranks_csv);
  write_text(dir / "friedman.txt", friedman_txt);
  write_text(dir / "wilcoxon.csv", wilcoxon_csv);
  write_text(dir / "report.md", md);
  return md;
}

}  // namespace zsreg
