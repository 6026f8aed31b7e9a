#include "zsreg/synthetic.hpp"

#include <fstream>

#include <json.hpp>

#include "zsreg/error.hpp"

namespace zsreg {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, Eigen::Index cols_if_empty = 0) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : cols_if_empty;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != c) throw InvalidArgument("ragged matrix in ground truth");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

}  // namespace

std::string GenSpec::name() const {
  return std::string(kind == GenKind::S ? "S" : "R") + "_" + std::to_string(targets) + "_" +
         std::to_string(side);
}

void GenSpec::validate() const {
  if (instances == 0 || features == 0 || targets == 0 || side == 0)
    throw InvalidArgument("generator sizes must be positive");
  if (kind == GenKind::S && anchors == 0) throw InvalidArgument("S-kind generator needs at least one anchor");
  if (assignment == Assignment::round_robin && instances < targets)
    throw InvalidArgument("round-robin assignment needs at least one instance per target");
}

Matrix draw_uniform_gap(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double sign = (rng() >> 63) != 0 ? -1.0 : 1.0;
      m(i, j) = sign * (1.0 + uniform01(rng));
    }
  }
  return m;
}

Vector coefficients(const GroundTruth& truth, const VectorRef& s) {
  return std::visit(
      [&](const auto& t) -> Vector {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, RGroundTruth>) {
          if (t.gamma.cols() != s.size()) throw InvalidArgument("side dimension mismatch");
          return t.gamma * s + t.beta_i;
        } else {
          if (t.mu.cols() != s.size()) throw InvalidArgument("side dimension mismatch");
          Vector delta(t.mu.rows());
          for (Eigen::Index k = 0; k < t.mu.rows(); ++k) {
            const double d = distance(t.delta_kind, t.mu.row(k).transpose(), s);
            delta(k) = t.mode == SimilarityMode::inverse_distance ? 1.0 / d : d;
          }
          return t.tau * delta / delta.sum();
        }
      },
      truth);
}

double global_offset(const GroundTruth& truth) {
  return std::visit([](const auto& t) { return t.beta; }, truth);
}

double true_value(const GroundTruth& truth, const VectorRef& s, const VectorRef& x) {
  return coefficients(truth, s).dot(x) + global_offset(truth);
}

ZeroShotDataset realize(const Matrix& X, const Matrix& S, const GroundTruth& truth,
                        Assignment assignment) {
  const Eigen::Index n = X.rows();
  const Eigen::Index m = S.rows();
  // y for every (instance, target): X * alpha(s_t) + beta.
  Matrix alpha(X.cols(), m);
  for (Eigen::Index t = 0; t < m; ++t) alpha.col(t) = coefficients(truth, S.row(t).transpose());
  const double beta = global_offset(truth);

  std::vector<Cell> cells;
  if (assignment == Assignment::dense) {
    const Matrix y = X * alpha;
    cells.reserve(static_cast<std::size_t>(n * m));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index t = 0; t < m; ++t)
        cells.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(t), y(i, t) + beta});
    }
  } else {
    cells.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index t = i % m;
      cells.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(t),
                       X.row(i).dot(alpha.col(t)) + beta});
    }
  }
  return ZeroShotDataset(X, S, std::move(cells));
}

GeneratedDataset generate(const GenSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto n = static_cast<Eigen::Index>(spec.instances);
  const auto ax = static_cast<Eigen::Index>(spec.features);
  const auto m = static_cast<Eigen::Index>(spec.targets);
  const auto as = static_cast<Eigen::Index>(spec.side);

  Matrix X = draw_uniform_gap(n, ax, rng);
  Matrix S = draw_uniform_gap(m, as, rng);

  GroundTruth truth;
  if (spec.kind == GenKind::R) {
    RGroundTruth r;
    r.gamma = draw_uniform_gap(ax, as, rng);
    r.beta_i = draw_uniform_gap(ax, 1, rng).col(0);
    r.beta = draw_uniform_gap(1, 1, rng)(0, 0);
    truth = std::move(r);
  } else {
    SGroundTruth s;
    const auto d = static_cast<Eigen::Index>(spec.anchors);
    s.tau = draw_uniform_gap(ax, d, rng);
    s.mu = draw_uniform_gap(d, as, rng);
    s.beta = draw_uniform_gap(1, 1, rng)(0, 0);
    s.delta_kind = (rng() >> 63) != 0 ? Distance::euclidean : Distance::manhattan;
    s.mode = spec.similarity;
    truth = std::move(s);
  }
  ZeroShotDataset dataset = realize(X, S, truth, spec.assignment);
  return {std::move(dataset), std::move(truth)};
}

void save_generated(const GenSpec& spec, const GeneratedDataset& generated,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_csv(generated.dataset, CsvPaths::in_directory(dir));

  json j;
  j["name"] = spec.name();
  j["seed"] = spec.seed;
  j["instances"] = spec.instances;
  j["features"] = spec.features;
  j["targets"] = spec.targets;
  j["side"] = spec.side;
  j["assignment"] = spec.assignment == Assignment::dense ? "dense" : "round_robin";
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        j["beta"] = t.beta;
        if constexpr (std::is_same_v<T, RGroundTruth>) {
          j["kind"] = "R";
          j["gamma"] = matrix_to_json(t.gamma);
          j["beta_i"] = matrix_to_json(t.beta_i);
        } else {
          j["kind"] = "S";
          j["anchors"] = spec.anchors;
          j["tau"] = matrix_to_json(t.tau);
          j["mu"] = matrix_to_json(t.mu);
          j["delta"] = std::string(to_string(t.delta_kind));
          j["similarity"] = t.mode == SimilarityMode::inverse_distance ? "inverse_distance" : "raw_distance";
        }
      },
      generated.truth);
  std::ofstream out(dir / "ground_truth.json");
  out << j.dump(2) << '\n';
}

GroundTruth load_ground_truth(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw LoadError(json_path.string(), 0, "cannot open file");
  json j;
  try {
    j = json::parse(in);
    if (j.at("kind") == "R") {
      RGroundTruth r;
      r.gamma = matrix_from_json(j.at("gamma"));
      r.beta_i = matrix_from_json(j.at("beta_i")).col(0);
      r.beta = j.at("beta").get<double>();
      return r;
    }
    SGroundTruth s;
    s.tau = matrix_from_json(j.at("tau"));
    s.mu = matrix_from_json(j.at("mu"));
    s.beta = j.at("beta").get<double>();
    s.delta_kind = j.at("delta") == "euclidean" ? Distance::euclidean : Distance::manhattan;
    s.mode = j.at("similarity") == "raw_distance" ? SimilarityMode::raw_distance : SimilarityMode::inverse_distance;
    return s;
  } catch (const json::exception& e) {
    throw LoadError(json_path.string(), 0, e.what());
  }
}

}  // namespace zsreg
