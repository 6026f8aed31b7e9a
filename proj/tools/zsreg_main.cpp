// zsreg: zero-shot regression experiments from the command line.
//
//   zsreg run <config.yaml>
//   zsreg gen --kind S --targets 50 --side 5 --seed 0 --out dir/
//   zsreg toy --out dir/
//   zsreg report <scores.csv>

#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "zsreg/error.hpp"
#include "zsreg/evaluation.hpp"
#include "zsreg/experiment.hpp"
#include "zsreg/report.hpp"
#include "zsreg/synthetic.hpp"
#include "zsreg/toy.hpp"

namespace {

int cmd_gen(zsreg::GenSpec spec, const std::string& out) {
  const zsreg::GeneratedDataset g = zsreg::generate(spec);
  zsreg::save_generated(spec, g, out);
  std::cout << fmt::format("{}: {} instances, {} targets, {} cells -> {}\n", spec.name(), g.dataset.n_instances(),
                           g.dataset.n_targets(), g.dataset.cells().size(), out);
  return 0;
}

int cmd_toy(const std::string& out) {
  const zsreg::ZeroShotDataset toy = zsreg::gen_toy();
  zsreg::save_csv(toy, zsreg::CsvPaths::in_directory(out));
  const zsreg::Projection proj = zsreg::project(toy, zsreg::toy_view(toy));
  const zsreg::Vector x = proj.unobserved.X.row(0).transpose();
  const zsreg::Vector s = proj.unobserved.S.row(0).transpose();
  std::cout << fmt::format("toy dataset written to {}\n", out);
  std::cout << fmt::format("unobserved target s = ({}, {}), x = ({}, {}), y = {}\n", s(0), s(1), x(0), x(1),
                           proj.unobserved.cells.front().value);
  for (const char* name : {"baseline", "sr-euclidean", "sr-manhattan", "mplc"}) {
    const auto spec = zsreg::MethodSpec::from_name(name, zsreg::toy_learner());
    const auto fitted = zsreg::fit_method(spec, proj.observed, 0);
    std::cout << fmt::format("  {:<13} {:.4f}\n", name, fitted.predict(x, s));
  }
  return 0;
}

int cmd_report(const std::string& scores, const std::string& out) {
  const auto records = zsreg::read_scores(scores);
  const std::filesystem::path dir = out.empty() ? std::filesystem::path(scores).parent_path() : std::filesystem::path(out);
  std::cout << zsreg::write_reports(records, dir.empty() ? std::filesystem::path(".") : dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-shot regression with target side information"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run an experiment config (ZSREG_THREADS caps the worker pool)");
  run->add_option("config", config, "YAML experiment config")->required();

  zsreg::GenSpec spec;
  std::string gen_out;
  std::string kind = "R";
  std::string assignment = "dense";
  std::string similarity = "inverse_distance";
  auto* gen = app.add_subcommand("gen", "Generate an artificial dataset as CSV plus ground_truth.json");
  gen->add_option("--kind", kind, "S or R")->check(CLI::IsMember({"S", "R"}))->required();
  gen->add_option("--targets", spec.targets, "Number of targets")->required();
  gen->add_option("--side", spec.side, "Side information size")->required();
  gen->add_option("--seed", spec.seed, "Random seed");
  gen->add_option("--instances", spec.instances, "Number of instances")->capture_default_str();
  gen->add_option("--features", spec.features, "Number of features")->capture_default_str();
  gen->add_option("--anchors", spec.anchors, "Anchor count (S only)")->capture_default_str();
  gen->add_option("--assignment", assignment, "dense or round_robin")
      ->check(CLI::IsMember({"dense", "round_robin"}))
      ->capture_default_str();
  gen->add_option("--similarity", similarity, "inverse_distance or raw_distance (S only)")
      ->check(CLI::IsMember({"inverse_distance", "raw_distance"}))
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  std::string toy_out;
  auto* toy = app.add_subcommand("toy", "Write the toy example and print each method's prediction");
  toy->add_option("--out", toy_out, "Output directory")->required();

  std::string scores;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Rank tables and tests from a scores.csv");
  report->add_option("scores", scores, "scores.csv from a run")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Output directory (default: next to scores.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return zsreg::run(config, std::cout, std::cerr);
    if (*gen) {
      spec.kind = kind == "S" ? zsreg::GenKind::S : zsreg::GenKind::R;
      spec.assignment = assignment == "dense" ? zsreg::Assignment::dense : zsreg::Assignment::round_robin;
      spec.similarity =
          similarity == "raw_distance" ? zsreg::SimilarityMode::raw_distance : zsreg::SimilarityMode::inverse_distance;
      return cmd_gen(spec, gen_out);
    }
    if (*toy) return cmd_toy(toy_out);
    if (*report) return cmd_report(scores, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
