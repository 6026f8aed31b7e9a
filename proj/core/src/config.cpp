// YAML experiment configuration.
//
//   seed: 0
//   output_dir: results/r_ridge
//   cv: {folds: 3, repetitions: 3}
//   datasets:
//     - generate: {kind: R, targets: 50, side: 5}
//     - generate_grid: {kind: S, targets: [5, 10], side: [5, 15], instances: 1000}
//     - load: {dir: data/toy}
//       name: toy
//   methods: [baseline, sr-euclidean, sr-manhattan, mplc]
//   learners:
//     - ridge
//     - {family: lsvr, grid: [0.1, 1, 10], max_iter: 2000}

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "zsreg/error.hpp"
#include "zsreg/experiment.hpp"

namespace zsreg {

namespace {

std::size_t line_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  return mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 0;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) { throw ConfigError(line_of(node), what); }

void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const char* where) {
  if (!map.IsMap()) fail(map, std::string(where) + " must be a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T scalar(const YAML::Node& node, const char* what) {
  if (!node.IsScalar()) fail(node, std::string(what) + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, std::string("invalid value for ") + what + ": '" + node.Scalar() + "'");
  }
}

template <typename T>
std::vector<T> scalar_list(const YAML::Node& node, const char* what) {
  std::vector<T> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<T>(item, what));
  } else {
    out.push_back(scalar<T>(node, what));
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

GenSpec parse_gen_fields(const YAML::Node& n) {
  GenSpec g;
  const std::string kind = scalar<std::string>(n["kind"], "kind");
  if (kind == "S") g.kind = GenKind::S;
  else if (kind == "R") g.kind = GenKind::R;
  else fail(n["kind"], "kind must be S or R");
  if (n["instances"]) g.instances = scalar<std::size_t>(n["instances"], "instances");
  if (n["features"]) g.features = scalar<std::size_t>(n["features"], "features");
  if (n["anchors"]) g.anchors = scalar<std::size_t>(n["anchors"], "anchors");
  if (n["assignment"]) {
    const std::string a = scalar<std::string>(n["assignment"], "assignment");
    if (a == "dense") g.assignment = Assignment::dense;
    else if (a == "round_robin") g.assignment = Assignment::round_robin;
    else fail(n["assignment"], "assignment must be dense or round_robin");
  }
  if (n["similarity"]) {
    const std::string s = scalar<std::string>(n["similarity"], "similarity");
    if (s == "inverse_distance") g.similarity = SimilarityMode::inverse_distance;
    else if (s == "raw_distance") g.similarity = SimilarityMode::raw_distance;
    else fail(n["similarity"], "similarity must be inverse_distance or raw_distance");
  }
  return g;
}

void add_generated(std::vector<DatasetEntry>& out, GenSpec g, const YAML::Node& gen,
                   const std::optional<std::string>& name, std::uint64_t config_seed) {
  DatasetEntry e;
  e.name = name ? *name : g.name();
  if (gen["seed"]) {
    g.seed = scalar<std::uint64_t>(gen["seed"], "seed");
  } else {
    g.seed = derive_seed(config_seed, fnv1a(std::span<const char>(e.name.data(), e.name.size())));
  }
  try {
    g.validate();
  } catch (const InvalidArgument& ex) {
    fail(gen, ex.what());
  }
  e.generate = g;
  out.push_back(std::move(e));
}

RegressorSpec parse_learner(const YAML::Node& node) {
  if (node.IsScalar()) {
    const std::string name = node.Scalar();
    if (name == "ridge") return RegressorSpec::ridge();
    if (name == "lsvr") return RegressorSpec::epsilon_insensitive();
    fail(node, "unknown learner '" + name + "' (expected ridge or lsvr)");
  }
  check_keys(node, {"family", "grid", "inner_folds", "epsilon", "max_iter", "tol", "fit_intercept", "standardize"},
             "learner");
  const std::string family = scalar<std::string>(node["family"], "family");
  RegressorSpec spec;
  if (family == "ridge") spec = RegressorSpec::ridge();
  else if (family == "lsvr") spec = RegressorSpec::epsilon_insensitive();
  else fail(node["family"], "unknown learner family '" + family + "'");
  if (node["grid"]) spec.grid = scalar_list<double>(node["grid"], "grid");
  if (node["inner_folds"]) spec.inner_folds = scalar<int>(node["inner_folds"], "inner_folds");
  if (node["epsilon"]) spec.epsilon = scalar<double>(node["epsilon"], "epsilon");
  if (node["max_iter"]) spec.max_iter = scalar<int>(node["max_iter"], "max_iter");
  if (node["tol"]) spec.tol = scalar<double>(node["tol"], "tol");
  if (node["fit_intercept"]) spec.fit_intercept = scalar<bool>(node["fit_intercept"], "fit_intercept");
  if (node["standardize"]) spec.standardize = scalar<bool>(node["standardize"], "standardize");
  try {
    spec.validate();
  } catch (const InvalidArgument& ex) {
    fail(node, ex.what());
  }
  return spec;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ConfigError(0, "no datasets");
  if (methods.empty()) throw ConfigError(0, "no methods");
  if (learners.empty()) throw ConfigError(0, "no learners");
  std::set<std::string> names;
  for (const DatasetEntry& d : datasets) {
    if (!names.insert(d.name).second) throw ConfigError(0, "duplicate dataset name '" + d.name + "'");
    if (d.generate.has_value() == d.load.has_value())
      throw ConfigError(0, "dataset '" + d.name + "' needs exactly one of generate or load");
  }
  std::set<std::string> ln;
  for (const RegressorSpec& l : learners) {
    if (!ln.insert(l.name()).second) throw ConfigError(0, "duplicate learner '" + l.name() + "'");
  }
  std::set<std::string> mn;
  for (const std::string& m : methods) {
    if (!mn.insert(m).second) throw ConfigError(0, "duplicate method '" + m + "'");
  }
  if (folds < 2) throw ConfigError(0, "cv.folds must be at least 2");
  if (repetitions < 1) throw ConfigError(0, "cv.repetitions must be at least 1");
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0, e.msg);
  }
  if (!root.IsMap()) throw ConfigError(1, "config must be a mapping");
  check_keys(root, {"seed", "output_dir", "cv", "datasets", "methods", "learners"}, "config");

  ExperimentConfig cfg;
  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (!root["output_dir"]) throw ConfigError(0, "missing output_dir");
  cfg.output_dir = resolve(base_dir, scalar<std::string>(root["output_dir"], "output_dir"));
  if (const YAML::Node cv = root["cv"]) {
    check_keys(cv, {"folds", "repetitions"}, "cv");
    if (cv["folds"]) cfg.folds = scalar<int>(cv["folds"], "folds");
    if (cv["repetitions"]) cfg.repetitions = scalar<int>(cv["repetitions"], "repetitions");
    if (cfg.folds < 2) fail(cv, "cv.folds must be at least 2");
    if (cfg.repetitions < 1) fail(cv, "cv.repetitions must be at least 1");
  }

  const YAML::Node datasets = root["datasets"];
  if (!datasets || !datasets.IsSequence() || datasets.size() == 0)
    throw ConfigError(datasets ? line_of(datasets) : 0, "datasets must be a non-empty list");
  std::set<std::string> seen;
  for (const YAML::Node& d : datasets) {
    check_keys(d, {"generate", "generate_grid", "load", "name", "allow_duplicate_side"}, "dataset");
    const int sources = (d["generate"] ? 1 : 0) + (d["generate_grid"] ? 1 : 0) + (d["load"] ? 1 : 0);
    if (sources != 1) fail(d, "dataset needs exactly one of generate, generate_grid or load");
    const std::size_t before = cfg.datasets.size();
    if (const YAML::Node g = d["generate"]) {
      check_keys(g, {"kind", "instances", "features", "targets", "side", "anchors", "seed", "assignment", "similarity"},
                 "generate");
      GenSpec spec = parse_gen_fields(g);
      spec.targets = scalar<std::size_t>(g["targets"], "targets");
      spec.side = scalar<std::size_t>(g["side"], "side");
      add_generated(cfg.datasets, spec, g,
                    d["name"] ? std::optional(scalar<std::string>(d["name"], "name")) : std::nullopt, cfg.seed);
    } else if (const YAML::Node g = d["generate_grid"]) {
      check_keys(g, {"kind", "instances", "features", "targets", "side", "anchors", "seed", "assignment", "similarity"},
                 "generate_grid");
      if (d["name"]) fail(d["name"], "generate_grid datasets are named automatically");
      const GenSpec base = parse_gen_fields(g);
      for (const std::size_t m : scalar_list<std::size_t>(g["targets"], "targets")) {
        for (const std::size_t s : scalar_list<std::size_t>(g["side"], "side")) {
          GenSpec spec = base;
          spec.targets = m;
          spec.side = s;
          add_generated(cfg.datasets, spec, g, std::nullopt, cfg.seed);
        }
      }
    } else {
      const YAML::Node l = d["load"];
      DatasetEntry e;
      if (l.IsScalar()) {
        e.load = CsvPaths::in_directory(resolve(base_dir, l.Scalar()));
      } else {
        check_keys(l, {"dir", "features", "side", "targets"}, "load");
        if (l["dir"]) {
          if (l["features"] || l["side"] || l["targets"]) fail(l, "load takes either dir or three file paths");
          e.load = CsvPaths::in_directory(resolve(base_dir, scalar<std::string>(l["dir"], "dir")));
        } else {
          if (!l["features"] || !l["side"] || !l["targets"]) fail(l, "load needs features, side and targets");
          e.load = CsvPaths{resolve(base_dir, scalar<std::string>(l["features"], "features")),
                            resolve(base_dir, scalar<std::string>(l["side"], "side")),
                            resolve(base_dir, scalar<std::string>(l["targets"], "targets"))};
        }
      }
      e.name = d["name"] ? scalar<std::string>(d["name"], "name") : e.load->targets.parent_path().filename().string();
      if (e.name.empty()) fail(l, "cannot derive a dataset name; add name:");
      if (d["allow_duplicate_side"])
        e.options.allow_duplicate_side = scalar<bool>(d["allow_duplicate_side"], "allow_duplicate_side");
      cfg.datasets.push_back(std::move(e));
    }
    for (std::size_t i = before; i < cfg.datasets.size(); ++i) {
      const std::string& n = cfg.datasets[i].name;
      if (n.find_first_of(",\n\r") != std::string::npos) fail(d, "dataset name '" + n + "' contains a comma or newline");
      if (!seen.insert(n).second) fail(d, "duplicate dataset name '" + n + "'");
    }
  }

  const YAML::Node methods = root["methods"];
  if (!methods || !methods.IsSequence() || methods.size() == 0)
    throw ConfigError(methods ? line_of(methods) : 0, "methods must be a non-empty list");
  for (const YAML::Node& m : methods) {
    const std::string name = scalar<std::string>(m, "method");
    try {
      (void)MethodSpec::from_name(name, RegressorSpec::ridge());
    } catch (const InvalidArgument& e) {
      fail(m, e.what());
    }
    cfg.methods.push_back(name);
  }

  const YAML::Node learners = root["learners"];
  if (!learners || !learners.IsSequence() || learners.size() == 0)
    throw ConfigError(learners ? line_of(learners) : 0, "learners must be a non-empty list");
  std::set<std::string> learner_names;
  for (const YAML::Node& l : learners) {
    cfg.learners.push_back(parse_learner(l));
    if (!learner_names.insert(cfg.learners.back().name()).second)
      fail(l, "duplicate learner '" + cfg.learners.back().name() + "'");
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace zsreg
