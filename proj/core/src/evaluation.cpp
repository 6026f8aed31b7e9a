#include "zsreg/evaluation.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "zsreg/error.hpp"
#include "zsreg/random.hpp"

namespace zsreg {

namespace {

std::vector<int> balanced_labels(std::size_t count, int folds, Rng& rng) {
  const std::vector<std::size_t> order = random_permutation(count, rng);
  std::vector<int> labels(count);
  for (std::size_t pos = 0; pos < count; ++pos)
    labels[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
  return labels;
}

double parse_double(std::string_view text, const std::string& file, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw LoadError(file, line, "non-numeric value '" + std::string(text) + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

SplitView CVPlan::view(int repetition, int fold) const {
  if (repetition < 0 || repetition >= repetitions || fold < 0 || fold >= folds)
    throw InvalidArgument("fold index out of range");
  const auto& inst = instance_folds[static_cast<std::size_t>(repetition)];
  const auto& tgt = target_folds[static_cast<std::size_t>(repetition)];
  SplitView v;
  for (std::size_t i = 0; i < inst.size(); ++i)
    (inst[i] == fold ? v.unobserved_instances : v.observed_instances).push_back(i);
  for (std::size_t t = 0; t < tgt.size(); ++t)
    (tgt[t] == fold ? v.unobserved_targets : v.observed_targets).push_back(t);
  return v;
}

CVPlan make_plan(const ZeroShotDataset& dataset, std::uint64_t seed, int folds, int repetitions) {
  if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  if (repetitions < 1) throw InvalidArgument("cross-validation needs at least 1 repetition");
  const auto k = static_cast<std::size_t>(folds);
  if (dataset.n_targets() < k)
    throw InvalidArgument(fmt::format("too few targets for {}-fold target split", folds));
  if (dataset.n_instances() < k)
    throw InvalidArgument(fmt::format("too few instances for {}-fold instance split", folds));

  CVPlan plan;
  plan.folds = folds;
  plan.repetitions = repetitions;
  plan.seed = seed;
  for (int r = 0; r < repetitions; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    plan.instance_folds.push_back(balanced_labels(dataset.n_instances(), folds, rng));
    plan.target_folds.push_back(balanced_labels(dataset.n_targets(), folds, rng));
  }
  return plan;
}

FoldScore evaluate_fold(const ZeroShotDataset& dataset, const MethodSpec& method, const CVPlan& plan,
                        int repetition, int fold) {
  const Projection proj = project(dataset, plan.view(repetition, fold));
  FoldScore score;
  score.n_test = proj.unobserved.n_cells();
  if (score.n_test == 0) return score;
  if (proj.observed.n_cells() == 0) throw Error("fold has no observed cells");

  const std::uint64_t seed =
      derive_seed(plan.seed, 0x100000ULL + static_cast<std::uint64_t>(repetition * plan.folds + fold));
  const FittedMethod fitted = fit_method(method, proj.observed, seed);
  const Vector predicted = fitted.predict(proj.unobserved);
  const Vector actual = proj.unobserved.y();
  if (!predicted.allFinite()) throw Error("non-finite predictions");

  const double mean = proj.observed.y().mean();
  score.mse = mean_squared_error(predicted, actual);
  score.default_mse = (actual.array() - mean).square().mean();
  return score;
}

ScoreRecord aggregate(std::string dataset, const MethodSpec& method, const std::vector<FoldScore>& folds) {
  ScoreRecord rec;
  rec.dataset = std::move(dataset);
  rec.method = method.name();
  rec.learner = method.learner.name();
  double num = 0.0;
  double den = 0.0;
  for (const FoldScore& f : folds) {
    if (f.n_test == 0) continue;
    rec.fold_mses.push_back(f.mse);
    num += f.mse;
    den += f.default_mse;
  }
  if (rec.fold_mses.empty()) throw Error("no fold has unobserved cells");
  if (den <= 0.0) {
    // Constant test values equal to the training mean: any exact method scores 0.
    rec.relative_mse = num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    rec.relative_mse = 100.0 * num / den;
  }
  return rec;
}

ScoreRecord evaluate(const ZeroShotDataset& dataset, std::string dataset_name, const MethodSpec& method,
                     const CVPlan& plan) {
  if (plan.instance_folds.empty() || plan.instance_folds.front().size() != dataset.n_instances() ||
      plan.target_folds.front().size() != dataset.n_targets())
    throw InvalidArgument("plan does not match dataset shape");
  std::vector<FoldScore> folds;
  for (int r = 0; r < plan.repetitions; ++r) {
    for (int f = 0; f < plan.folds; ++f) folds.push_back(evaluate_fold(dataset, method, plan, r, f));
  }
  return aggregate(std::move(dataset_name), method, folds);
}

std::string format_score_row(const ScoreRecord& r) {
  std::string folds;
  for (std::size_t i = 0; i < r.fold_mses.size(); ++i) {
    if (i > 0) folds += ';';
    folds += fmt::format("{}", r.fold_mses[i]);
  }
  return fmt::format("{},{},{},{},{}", r.dataset, r.method, r.learner, r.relative_mse, folds);
}

void write_scores(const std::vector<ScoreRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << kScoresHeader << '\n';
  for (const ScoreRecord& r : records) out << format_score_row(r) << '\n';
}

std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path);
  if (!in) throw LoadError(name, 0, "cannot open file");
  std::string line;
  std::size_t line_no = 0;
  std::vector<ScoreRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kScoresHeader) throw LoadError(name, 1, std::string("expected header ") + kScoresHeader);
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 5)
      throw LoadError(name, line_no, fmt::format("expected 5 fields, found {}", fields.size()));
    ScoreRecord r;
    r.dataset = fields[0];
    r.method = fields[1];
    r.learner = fields[2];
    r.relative_mse = parse_double(fields[3], name, line_no);
    if (!fields[4].empty()) {
      for (const std::string& v : split(fields[4], ';')) r.fold_mses.push_back(parse_double(v, name, line_no));
    }
    out.push_back(std::move(r));
  }
  if (line_no == 0) throw LoadError(name, 0, "empty file");
  return out;
}

}  // namespace zsreg
