#include "zsreg/methods.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zsreg/error.hpp"
#include "zsreg/random.hpp"

namespace zsreg {

double distance(Distance kind, const VectorRef& a, const VectorRef& b) {
  if (a.size() != b.size()) throw InvalidArgument("distance: dimension mismatch");
  return kind == Distance::manhattan ? (a - b).lpNorm<1>() : (a - b).norm();
}

std::string_view to_string(Distance kind) noexcept {
  return kind == Distance::manhattan ? "manhattan" : "euclidean";
}

Vector MPLCModels::parameters_for(const VectorRef& s) const {
  Vector theta(static_cast<Eigen::Index>(param_models.size()));
  for (std::size_t j = 0; j < param_models.size(); ++j)
    theta(static_cast<Eigen::Index>(j)) = param_models[j].predict(s);
  return theta;
}

LinearModel fit_baseline(const SplitSide& observed, const RegressorSpec& spec, std::uint64_t seed) {
  if (observed.cells.empty()) throw InvalidArgument("baseline: no observed cells");
  const Eigen::Index ax = observed.X.cols();
  const Eigen::Index as = observed.S.cols();
  Matrix design(static_cast<Eigen::Index>(observed.cells.size()), ax + as);
  for (std::size_t r = 0; r < observed.cells.size(); ++r) {
    const Cell& c = observed.cells[r];
    const auto row = static_cast<Eigen::Index>(r);
    design.row(row).head(ax) = observed.X.row(static_cast<Eigen::Index>(c.instance));
    design.row(row).tail(as) = observed.S.row(static_cast<Eigen::Index>(c.target));
  }
  return grid_search_fit(design, observed.y(), spec, seed).model;
}

double baseline_predict(const LinearModel& model, const VectorRef& x, const VectorRef& s) {
  if (model.dimension() != x.size() + s.size()) throw InvalidArgument("baseline: dimension mismatch");
  return model.weights.head(x.size()).dot(x) + model.weights.tail(s.size()).dot(s) + model.intercept;
}

TargetModels fit_per_target(const SplitSide& observed, const RegressorSpec& spec, std::uint64_t seed) {
  const std::size_t m = static_cast<std::size_t>(observed.S.rows());
  std::vector<std::vector<std::size_t>> rows_of(m);
  for (std::size_t r = 0; r < observed.cells.size(); ++r) rows_of[observed.cells[r].target].push_back(r);

  TargetModels out;
  out.models.resize(m);
  out.diagnostics.resize(m);
  for (std::size_t t = 0; t < m; ++t) {
    const auto& rows = rows_of[t];
    if (rows.empty()) throw InvalidArgument("observed target " + std::to_string(t) + " has no instances");
    Matrix x(static_cast<Eigen::Index>(rows.size()), observed.X.cols());
    Vector y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Cell& c = observed.cells[rows[i]];
      x.row(static_cast<Eigen::Index>(i)) = observed.X.row(static_cast<Eigen::Index>(c.instance));
      y(static_cast<Eigen::Index>(i)) = c.value;
    }
    if (rows.size() < 2) {
      out.models[t] = LinearModel{Vector::Zero(observed.X.cols()), y(0)};
      out.diagnostics[t].intercept_only = true;
      continue;
    }
    const std::uint64_t global = t < observed.target_index.size() ? observed.target_index[t] : t;
    GridSearchResult fit = grid_search_fit(x, y, spec, derive_seed(seed, global));
    out.models[t] = std::move(fit.model);
    out.diagnostics[t] = fit.diagnostics;
  }
  return out;
}

std::vector<std::pair<std::size_t, double>> sr_weights(const MatrixRef& observed_side,
                                                       const VectorRef& s, const SRConfig& cfg) {
  const auto m = static_cast<std::size_t>(observed_side.rows());
  if (m == 0) throw InvalidArgument("SR needs at least one observed target");
  if (observed_side.cols() != s.size()) throw InvalidArgument("SR: side information dimension mismatch");
  if (cfg.k && (*cfg.k == 0 || *cfg.k > m))
    throw InvalidArgument("SR: k must lie in [1, number of observed targets]");

  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i)
    d[i] = distance(cfg.distance, observed_side.row(static_cast<Eigen::Index>(i)).transpose(), s);

  std::vector<std::pair<std::size_t, double>> weights;
  for (std::size_t i = 0; i < m; ++i) {
    if (d[i] == 0.0) weights.emplace_back(i, 1.0);
  }
  if (!weights.empty()) return weights;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t keep = cfg.k.value_or(m);
  if (keep < m) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    order.resize(keep);
    std::sort(order.begin(), order.end());
  }
  for (std::size_t i : order) weights.emplace_back(i, 1.0 / d[i]);
  return weights;
}

double sr_predict(const TargetModels& models, const MatrixRef& observed_side, const VectorRef& s,
                  const VectorRef& x, const SRConfig& cfg) {
  if (models.size() != static_cast<std::size_t>(observed_side.rows()))
    throw InvalidArgument("SR: model count does not match observed side information rows");
  double num = 0.0;
  double den = 0.0;
  for (const auto& [i, w] : sr_weights(observed_side, s, cfg)) {
    num += w * models.models[i].predict(x);
    den += w;
  }
  return num / den;
}

MPLCModels fit_mplc(const TargetModels& models, const MatrixRef& observed_side,
                    const RegressorSpec& spec, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(models.size());
  if (m < 2) throw InvalidArgument("MPLC needs at least two observed targets");
  if (observed_side.rows() != m) throw InvalidArgument("MPLC: model count does not match side information rows");
  const Eigen::Index p = models.models.front().dimension() + 1;

  Matrix theta(m, p);
  for (Eigen::Index i = 0; i < m; ++i) {
    const LinearModel& model = models.models[static_cast<std::size_t>(i)];
    if (model.dimension() + 1 != p) throw InvalidArgument("MPLC: observed models differ in dimension");
    theta.row(i) = model.parameters().transpose();
  }

  // Parameter regressors draw from a stream separate from the per-target fits.
  const std::uint64_t param_seed = derive_seed(seed, 0x9a7a3e7e75ULL);
  MPLCModels g;
  g.param_models.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    g.param_models.push_back(
        grid_search_fit(observed_side, theta.col(j), spec, derive_seed(param_seed, static_cast<std::uint64_t>(j))).model);
  }
  return g;
}

double mplc_predict(const MPLCModels& g, const VectorRef& s, const VectorRef& x) {
  if (g.param_models.empty()) throw InvalidArgument("MPLC: no parameter models");
  if (static_cast<Eigen::Index>(g.param_models.size()) != x.size() + 1)
    throw InvalidArgument("MPLC: feature dimension does not match parameter models");
  if (g.param_models.front().dimension() != s.size())
    throw InvalidArgument("MPLC: side information dimension mismatch");
  return LinearModel::from_parameters(g.parameters_for(s)).predict(x);
}

std::string MethodSpec::name() const {
  switch (kind) {
    case MethodKind::baseline:
      return "baseline";
    case MethodKind::mplc:
      return "mplc";
    case MethodKind::mean:
      return "mean";
    case MethodKind::sr: {
      std::string n = "sr-" + std::string(to_string(sr.distance));
      if (sr.k) n += "-k" + std::to_string(*sr.k);
      return n;
    }
  }
  return "unknown";
}

MethodSpec MethodSpec::from_name(std::string_view name, RegressorSpec learner) {
  MethodSpec spec;
  spec.learner = std::move(learner);
  if (name == "baseline") {
    spec.kind = MethodKind::baseline;
  } else if (name == "mplc") {
    spec.kind = MethodKind::mplc;
  } else if (name == "mean") {
    spec.kind = MethodKind::mean;
  } else if (name.starts_with("sr-")) {
    spec.kind = MethodKind::sr;
    std::string_view rest = name.substr(3);
    std::string_view dist = rest.substr(0, rest.find('-'));
    if (dist == "euclidean") spec.sr.distance = Distance::euclidean;
    else if (dist == "manhattan") spec.sr.distance = Distance::manhattan;
    else throw InvalidArgument("unknown SR distance in method '" + std::string(name) + "'");
    rest.remove_prefix(dist.size());
    if (!rest.empty()) {
      if (!rest.starts_with("-k") || rest.size() < 3)
        throw InvalidArgument("malformed SR method '" + std::string(name) + "'");
      std::size_t k = 0;
      for (char c : rest.substr(2)) {
        if (c < '0' || c > '9') throw InvalidArgument("malformed SR neighbour count in '" + std::string(name) + "'");
        k = k * 10 + static_cast<std::size_t>(c - '0');
      }
      if (k == 0) throw InvalidArgument("SR neighbour count must be positive");
      spec.sr.k = k;
    }
  } else {
    throw InvalidArgument("unknown method '" + std::string(name) + "'");
  }
  return spec;
}

double FittedMethod::predict(const VectorRef& x, const VectorRef& s) const {
  return std::visit(
      [&](const auto& st) -> double {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return baseline_predict(st, x, s);
        } else if constexpr (std::is_same_v<T, SR>) {
          return sr_predict(st.models, st.observed_side, s, x, st.config);
        } else if constexpr (std::is_same_v<T, MPLCModels>) {
          return mplc_predict(st, s, x);
        } else {
          return st.value;
        }
      },
      state_);
}

Vector FittedMethod::predict(const SplitSide& unobserved) const {
  const auto n_cells = static_cast<Eigen::Index>(unobserved.cells.size());
  Vector out(n_cells);
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          const Eigen::Index ax = unobserved.X.cols();
          if (st.dimension() != ax + unobserved.S.cols()) throw InvalidArgument("baseline: dimension mismatch");
          const Vector x_part = unobserved.X * st.weights.head(ax);
          const Vector s_part = unobserved.S * st.weights.tail(unobserved.S.cols());
          for (Eigen::Index r = 0; r < n_cells; ++r) {
            const Cell& c = unobserved.cells[static_cast<std::size_t>(r)];
            out(r) = x_part(static_cast<Eigen::Index>(c.instance)) + s_part(static_cast<Eigen::Index>(c.target)) +
                     st.intercept;
          }
        } else if constexpr (std::is_same_v<T, SR>) {
          const auto m = static_cast<Eigen::Index>(st.models.size());
          Matrix weights(unobserved.X.cols(), m);
          Vector intercepts(m);
          for (Eigen::Index i = 0; i < m; ++i) {
            weights.col(i) = st.models.models[static_cast<std::size_t>(i)].weights;
            intercepts(i) = st.models.models[static_cast<std::size_t>(i)].intercept;
          }
          Matrix per_model = unobserved.X * weights;  // instance x observed target
          per_model.rowwise() += intercepts.transpose();
          std::vector<std::vector<std::pair<std::size_t, double>>> target_weights;
          for (Eigen::Index t = 0; t < unobserved.S.rows(); ++t)
            target_weights.push_back(sr_weights(st.observed_side, unobserved.S.row(t).transpose(), st.config));
          for (Eigen::Index r = 0; r < n_cells; ++r) {
            const Cell& c = unobserved.cells[static_cast<std::size_t>(r)];
            double num = 0.0;
            double den = 0.0;
            for (const auto& [i, w] : target_weights[c.target]) {
              num += w * per_model(static_cast<Eigen::Index>(c.instance), static_cast<Eigen::Index>(i));
              den += w;
            }
            out(r) = num / den;
          }
        } else if constexpr (std::is_same_v<T, MPLCModels>) {
          std::vector<LinearModel> target_models;
          for (Eigen::Index t = 0; t < unobserved.S.rows(); ++t)
            target_models.push_back(LinearModel::from_parameters(st.parameters_for(unobserved.S.row(t).transpose())));
          for (Eigen::Index r = 0; r < n_cells; ++r) {
            const Cell& c = unobserved.cells[static_cast<std::size_t>(r)];
            out(r) = target_models[c.target].predict(unobserved.X.row(static_cast<Eigen::Index>(c.instance)).transpose());
          }
        } else {
          out.setConstant(st.value);
        }
      },
      state_);
  return out;
}

FittedMethod fit_method(const MethodSpec& spec, const SplitSide& observed, std::uint64_t seed) {
  if (observed.cells.empty()) throw InvalidArgument("no observed cells to fit on");
  switch (spec.kind) {
    case MethodKind::baseline:
      return {spec, fit_baseline(observed, spec.learner, seed)};
    case MethodKind::sr:
      return {spec, FittedMethod::SR{fit_per_target(observed, spec.learner, seed), observed.S, spec.sr}};
    case MethodKind::mplc:
      return {spec, fit_mplc(fit_per_target(observed, spec.learner, seed), observed.S, spec.learner, seed)};
    case MethodKind::mean:
      return {spec, FittedMethod::Mean{observed.y().mean()}};
  }
  throw InvalidArgument("unknown method kind");
}

}  // namespace zsreg
