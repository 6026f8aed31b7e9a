#include "zsreg/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "zsreg/error.hpp"
#include "zsreg/random.hpp"
#include "zsreg/report.hpp"

namespace zsreg {

namespace {

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  if (threads == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
}

std::uint64_t name_stream(const std::string& name) {
  return fnv1a(std::span<const char>(name.data(), name.size()));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Triple {
  std::size_t dataset = 0;
  std::size_t learner = 0;
  std::size_t method = 0;
  MethodSpec spec;
  std::vector<FoldScore> folds;
  std::atomic<std::size_t> remaining{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::optional<ScoreRecord> record;
};

}  // namespace

std::size_t worker_threads() {
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("ZSREG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return hw;
}

RunSummary run_experiment(const ExperimentConfig& config, const std::string& config_text, const RunOptions& options) {
  config.validate();
  const std::size_t threads = options.threads > 0 ? options.threads : worker_threads();
  std::ostream* log = options.log;
  std::mutex io_mutex;
  auto note = [&](const std::string& line) {
    if (log == nullptr) return;
    const std::lock_guard lock(io_mutex);
    *log << line << '\n' << std::flush;
  };

  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir);
  const std::filesystem::path scores_path = dir / "scores.csv";
  const std::filesystem::path hash_path = dir / "config.hash";
  const std::filesystem::path errors_path = dir / "errors.log";
  const std::string hash =
      fmt::format("{:016x}\n", fnv1a(std::span<const char>(config_text.data(), config_text.size())));

  RunSummary summary;
  std::vector<ScoreRecord> previous;
  if (std::filesystem::exists(hash_path) && read_file(hash_path) == hash && std::filesystem::exists(scores_path)) {
    try {
      previous = read_scores(scores_path);
    } catch (const LoadError& e) {
      note(fmt::format("ignoring unreadable previous scores: {}", e.what()));
      previous.clear();
    }
  }
  {
    std::ofstream h(hash_path, std::ios::binary | std::ios::trunc);
    h << hash;
  }
  std::filesystem::remove(errors_path);
  // Keep only rows we can reuse; rows for a different config never survive.
  write_scores(previous, scores_path);

  // Datasets and their plans.
  const std::size_t nd = config.datasets.size();
  std::vector<std::optional<ZeroShotDataset>> datasets(nd);
  std::vector<std::optional<CVPlan>> plans(nd);
  std::vector<std::string> dataset_errors(nd);
  parallel_for(nd, threads, [&](std::size_t d) {
    const DatasetEntry& e = config.datasets[d];
    try {
      datasets[d] = e.generate ? generate(*e.generate).dataset : load_csv(*e.load, e.options);
      plans[d] = make_plan(*datasets[d], derive_seed(config.seed, name_stream(e.name)), config.folds,
                           config.repetitions);
    } catch (const std::exception& ex) {
      dataset_errors[d] = ex.what();
      datasets[d].reset();
    }
  });

  // Work units: one per fold of every (dataset, learner, method) still to score.
  std::vector<std::unique_ptr<Triple>> triples;
  struct Unit {
    Triple* triple;
    int repetition;
    int fold;
  };
  std::vector<Unit> units;
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t l = 0; l < config.learners.size(); ++l) {
      for (std::size_t m = 0; m < config.methods.size(); ++m) {
        auto t = std::make_unique<Triple>();
        t->dataset = d;
        t->learner = l;
        t->method = m;
        t->spec = MethodSpec::from_name(config.methods[m], config.learners[l]);
        const std::string& dname = config.datasets[d].name;
        const std::string mname = t->spec.name();
        const std::string lname = config.learners[l].name();
        for (const ScoreRecord& r : previous) {
          if (r.dataset == dname && r.method == mname && r.learner == lname) t->record = r;
        }
        if (t->record) {
          ++summary.reused;
        } else if (!dataset_errors[d].empty()) {
          t->failed = true;
          t->error = dataset_errors[d];
        } else {
          const CVPlan& plan = *plans[d];
          t->folds.resize(plan.n_units());
          t->remaining = plan.n_units();
          for (int r = 0; r < plan.repetitions; ++r)
            for (int f = 0; f < plan.folds; ++f) units.push_back({t.get(), r, f});
        }
        triples.push_back(std::move(t));
      }
    }
  }

  std::ofstream scores_out(scores_path, std::ios::binary | std::ios::app);
  std::atomic<std::size_t> finished{0};
  const std::size_t to_finish = static_cast<std::size_t>(
      std::count_if(triples.begin(), triples.end(), [](const auto& t) { return t->remaining > 0; }));

  parallel_for(units.size(), threads, [&](std::size_t u) {
    const Unit unit = units[u];
    Triple& t = *unit.triple;
    const CVPlan& plan = *plans[t.dataset];
    if (!t.failed) {
      try {
        t.folds[static_cast<std::size_t>(unit.repetition * plan.folds + unit.fold)] =
            evaluate_fold(*datasets[t.dataset], t.spec, plan, unit.repetition, unit.fold);
      } catch (const std::exception& ex) {
        const std::lock_guard lock(io_mutex);
        if (!t.failed.exchange(true)) t.error = fmt::format("repetition {} fold {}: {}", unit.repetition, unit.fold, ex.what());
      }
    }
    if (t.remaining.fetch_sub(1) != 1) return;
    // Last fold of the triple.
    const std::string& dname = config.datasets[t.dataset].name;
    if (!t.failed) {
      try {
        t.record = aggregate(dname, t.spec, t.folds);
      } catch (const std::exception& ex) {
        t.failed = true;
        t.error = ex.what();
      }
    }
    const std::size_t k = ++finished;
    const std::lock_guard lock(io_mutex);
    if (t.record) {
      scores_out << format_score_row(*t.record) << '\n' << std::flush;
      if (log) *log << fmt::format("[{}/{}] {} {} {}: {:.2f}\n", k, to_finish, dname, t.spec.learner.name(),
                                   t.spec.name(), t.record->relative_mse) << std::flush;
    } else if (log) {
      *log << fmt::format("[{}/{}] {} {} {}: FAILED\n", k, to_finish, dname, t.spec.learner.name(), t.spec.name())
           << std::flush;
    }
  });
  scores_out.close();

  for (const auto& t : triples) {
    if (t->record) {
      summary.records.push_back(*t->record);
    } else {
      summary.errors.push_back(fmt::format("{},{},{}: {}", config.datasets[t->dataset].name,
                                           t->spec.learner.name(), t->spec.name(), t->error));
    }
  }
  write_scores(summary.records, scores_path);
  if (!summary.errors.empty()) {
    std::ofstream err(errors_path, std::ios::binary | std::ios::trunc);
    for (const std::string& e : summary.errors) err << e << '\n';
  }
  if (!summary.records.empty()) write_reports(summary.records, dir);
  return summary;
}

int run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  std::string text;
  try {
    if (!std::filesystem::exists(config_path)) throw ConfigError(0, "no such file");
    text = read_file(config_path);
    config = parse_config(text, config_path.parent_path());
  } catch (const ConfigError& e) {
    if (e.line() > 0) err << fmt::format("{}:{}: {}\n", config_path.string(), e.line(), e.message());
    else err << fmt::format("{}: {}\n", config_path.string(), e.message());
    return 1;
  }
  RunOptions opts;
  opts.log = &err;
  const RunSummary summary = run_experiment(config, text, opts);
  if (summary.reused > 0) out << fmt::format("reused {} scored triples from a previous run\n", summary.reused);
  out << fmt::format("{} scores written to {}\n", summary.records.size(), (config.output_dir / "scores.csv").string());
  if (!summary.errors.empty()) {
    out << fmt::format("{} failures, see {}\n", summary.errors.size(), (config.output_dir / "errors.log").string());
  }
  return summary.exit_code();
}

}  // namespace zsreg
