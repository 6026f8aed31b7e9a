#pragma once

// Config-driven experiments: every (dataset, learner, method) triple is scored
// under zero-shot cross-validation, then ranked and tested.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zsreg/dataset.hpp"
#include "zsreg/evaluation.hpp"
#include "zsreg/methods.hpp"
#include "zsreg/synthetic.hpp"

namespace zsreg {

struct DatasetEntry {
  std::string name;
  std::optional<GenSpec> generate;
  std::optional<CsvPaths> load;
  DatasetOptions options;
};

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<std::string> methods;  // MethodSpec names
  std::vector<RegressorSpec> learners;
  int folds = 3;
  int repetitions = 3;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;

  /// Non-empty datasets, methods and learners; unique names.
  void validate() const;
};

/// Relative paths in the config resolve against base_dir. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Worker count: ZSREG_THREADS if set and positive, else hardware concurrency.
std::size_t worker_threads();

struct RunOptions {
  std::size_t threads = 0;  // 0: worker_threads()
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::vector<ScoreRecord> records;  // in config order
  std::vector<std::string> errors;
  std::size_t reused = 0;  // triples taken from a previous run with the same config

  int exit_code() const noexcept { return errors.empty() ? 0 : 2; }
};

/// Writes scores.csv (appended as triples finish, rewritten in config order at
/// the end), the reports, errors.log when something failed, and config.hash.
/// A rerun with an unchanged config skips triples already in scores.csv.
RunSummary run_experiment(const ExperimentConfig& config, const std::string& config_text,
                          const RunOptions& options = {});

/// Loads, runs and reports. Exit code 0 on success, 1 on a bad config, 2 when
/// some triples failed.
int run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

}  // namespace zsreg
