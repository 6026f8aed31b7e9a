#include "zsreg/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zsreg/error.hpp"
#include "zsreg/random.hpp"

namespace zsreg {

Vector LinearModel::predict_rows(const MatrixRef& X) const {
  Vector out = X * weights;
  out.array() += intercept;
  return out;
}

bool LinearModel::is_finite() const noexcept {
  return std::isfinite(intercept) && weights.allFinite();
}

Vector LinearModel::parameters() const {
  Vector p(weights.size() + 1);
  p.head(weights.size()) = weights;
  p(weights.size()) = intercept;
  return p;
}

LinearModel LinearModel::from_parameters(const VectorRef& params) {
  if (params.size() < 1) throw InvalidArgument("parameter vector must hold at least the intercept");
  LinearModel m;
  m.weights = params.head(params.size() - 1);
  m.intercept = params(params.size() - 1);
  return m;
}

RegressorSpec RegressorSpec::ridge() {
  RegressorSpec spec;
  spec.family = LearnerFamily::ridge;
  for (int e = -3; e <= 3; ++e) spec.grid.push_back(std::exp(static_cast<double>(e)));
  return spec;
}

RegressorSpec RegressorSpec::epsilon_insensitive() {
  RegressorSpec spec;
  spec.family = LearnerFamily::epsilon_insensitive_linear;
  for (int e = -3; e <= 3; ++e) spec.grid.push_back(std::pow(10.0, e));
  return spec;
}

std::string RegressorSpec::name() const {
  return family == LearnerFamily::ridge ? "ridge" : "lsvr";
}

void RegressorSpec::validate() const {
  if (grid.empty()) throw InvalidArgument("regressor grid must not be empty");
  for (double g : grid) {
    if (!(g > 0.0) || !std::isfinite(g))
      throw InvalidArgument("regularization values must be positive and finite");
  }
  if (inner_folds < 1) throw InvalidArgument("inner_folds must be positive");
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
  if (max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
}

double mean_squared_error(const VectorRef& predicted, const VectorRef& actual) {
  if (predicted.size() != actual.size()) throw InvalidArgument("mse: length mismatch");
  if (actual.size() == 0) return 0.0;
  return (predicted - actual).squaredNorm() / static_cast<double>(actual.size());
}

namespace {

void check_xy(const MatrixRef& X, const VectorRef& y) {
  if (X.rows() != y.size())
    throw InvalidArgument("rows(X) = " + std::to_string(X.rows()) +
                          " does not match len(y) = " + std::to_string(y.size()));
  if (X.rows() < 1) throw InvalidArgument("at least one row is required");
}

// Normal equations of a (possibly centered) ridge problem, reusable across
// alpha values.
class RidgeSystem {
 public:
  RidgeSystem(const MatrixRef& X, const VectorRef& y, bool fit_intercept)
      : fit_intercept_(fit_intercept) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    x_mean_ = Vector::Zero(d);
    y_mean_ = 0.0;
    if (fit_intercept_) {
      x_mean_ = X.colwise().mean().transpose();
      y_mean_ = y.mean();
    }
    gram_ = Matrix::Zero(d, d);
    xty_ = Vector::Zero(d);
    constexpr Eigen::Index kChunk = 2048;
    Matrix chunk;
    for (Eigen::Index start = 0; start < n; start += kChunk) {
      const Eigen::Index rows = std::min(kChunk, n - start);
      chunk = X.middleRows(start, rows);
      chunk.rowwise() -= x_mean_.transpose();
      gram_.selfadjointView<Eigen::Lower>().rankUpdate(chunk.transpose());
      xty_.noalias() += chunk.transpose() * (y.segment(start, rows).array() - y_mean_).matrix();
    }
    gram_ = gram_.selfadjointView<Eigen::Lower>();
  }

  LinearModel solve(double alpha) const {
    Matrix a = gram_;
    a.diagonal().array() += alpha;
    LinearModel m;
    m.weights = a.ldlt().solve(xty_);
    m.intercept = fit_intercept_ ? y_mean_ - x_mean_.dot(m.weights) : 0.0;
    return m;
  }

 private:
  bool fit_intercept_;
  Vector x_mean_;
  double y_mean_;
  Matrix gram_;
  Vector xty_;
};

Matrix take_rows(const MatrixRef& X, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Vector take(const VectorRef& y, const std::vector<Eigen::Index>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  return out;
}

// Column scaling applied before fitting when spec.standardize is set.
struct Standardizer {
  Vector mean;
  Vector scale;

  Standardizer(const MatrixRef& X, bool center) {
    mean = center ? Vector(X.colwise().mean().transpose()) : Vector::Zero(X.cols());
    scale = Vector::Ones(X.cols());
    if (X.rows() > 1) {
      for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double sd = std::sqrt((X.col(j).array() - mean(j)).square().sum() /
                                    static_cast<double>(X.rows()));
        if (sd > 0.0) scale(j) = sd;
      }
    }
  }

  Matrix apply(const MatrixRef& X) const {
    return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  }

  LinearModel restore(const LinearModel& m) const {
    LinearModel out;
    out.weights = m.weights.array() / scale.array();
    out.intercept = m.intercept - out.weights.dot(mean);
    return out;
  }
};

GridSearchResult grid_search_impl(const MatrixRef& X, const VectorRef& y,
                                  const RegressorSpec& spec, std::uint64_t seed) {
  const Eigen::Index n = X.rows();
  GridSearchResult result;
  result.cv_mse.assign(spec.grid.size(), 0.0);

  // Candidate order: ascending regularization so that ties favour the smaller value.
  std::vector<std::size_t> order(spec.grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return spec.grid[a] < spec.grid[b]; });

  int folds = spec.inner_folds;
  if (n < folds) {
    folds = static_cast<int>(n);
    result.diagnostics.folds_reduced = true;
  }
  result.diagnostics.folds_used = folds;

  if (spec.grid.size() == 1 || folds < 2) {
    result.chosen_reg = spec.grid[order.front()];
    if (folds < 2) result.cv_mse.assign(spec.grid.size(), std::nan(""));
  } else {
    const std::vector<int> labels = inner_fold_labels(X, y, folds, seed);
    std::vector<double> total(spec.grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> train, test;
      for (Eigen::Index i = 0; i < n; ++i) (labels[i] == f ? test : train).push_back(i);
      const Matrix x_train = take_rows(X, train);
      const Vector y_train = take(y, train);
      const Matrix x_test = take_rows(X, test);
      const Vector y_test = take(y, test);

      if (spec.family == LearnerFamily::ridge) {
        const RidgeSystem system(x_train, y_train, spec.fit_intercept);
        for (std::size_t g = 0; g < spec.grid.size(); ++g) {
          total[g] += mean_squared_error(system.solve(spec.grid[g]).predict_rows(x_test), y_test);
        }
      } else {
        for (std::size_t g = 0; g < spec.grid.size(); ++g) {
          const FitResult fit = fit_regressor(x_train, y_train, spec, spec.grid[g]);
          if (!fit.diagnostics.converged) result.diagnostics.converged = false;
          total[g] += mean_squared_error(fit.model.predict_rows(x_test), y_test);
        }
      }
    }
    for (std::size_t g = 0; g < spec.grid.size(); ++g)
      result.cv_mse[g] = total[g] / static_cast<double>(folds);

    std::size_t best = order.front();
    for (std::size_t g : order) {
      if (result.cv_mse[g] < result.cv_mse[best]) best = g;
    }
    result.chosen_reg = spec.grid[best];
  }

  FitResult final_fit = fit_regressor(X, y, spec, result.chosen_reg);
  result.model = std::move(final_fit.model);
  result.diagnostics.iterations = final_fit.diagnostics.iterations;
  if (!final_fit.diagnostics.converged) result.diagnostics.converged = false;
  result.diagnostics.intercept_only = n == 1 || result.model.weights.isZero(0.0);
  return result;
}

}  // namespace

LinearModel fit_ridge(const MatrixRef& X, const VectorRef& y, double alpha, bool fit_intercept) {
  check_xy(X, y);
  if (!(alpha > 0.0)) throw InvalidArgument("ridge alpha must be positive");
  return RidgeSystem(X, y, fit_intercept).solve(alpha);
}

double ridge_objective(const LinearModel& model, const MatrixRef& X, const VectorRef& y,
                       double alpha) {
  return (model.predict_rows(X) - y).squaredNorm() + alpha * model.weights.squaredNorm();
}

FitResult fit_regressor(const MatrixRef& X, const VectorRef& y, const RegressorSpec& spec,
                        double reg) {
  if (spec.family == LearnerFamily::ridge) {
    return FitResult{fit_ridge(X, y, reg, spec.fit_intercept), {}};
  }
  return fit_eps_insensitive(X, y, reg, spec);
}

std::vector<int> inner_fold_labels(const MatrixRef& X, const VectorRef& y, int folds,
                                   std::uint64_t seed) {
  const Eigen::Index n = X.rows();
  std::vector<std::pair<std::uint64_t, Eigen::Index>> keys(static_cast<std::size_t>(n));
  std::vector<double> row(static_cast<std::size_t>(X.cols()) + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) row[static_cast<std::size_t>(j)] = X(i, j);
    row.back() = y(i);
    keys[static_cast<std::size_t>(i)] = {hash_values(row, seed), i};
  }
  std::sort(keys.begin(), keys.end());
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < keys.size(); ++r)
    labels[static_cast<std::size_t>(keys[r].second)] = static_cast<int>(r % static_cast<std::size_t>(folds));
  return labels;
}

GridSearchResult grid_search_fit(const MatrixRef& X, const VectorRef& y,
                                 const RegressorSpec& spec, std::uint64_t seed) {
  spec.validate();
  check_xy(X, y);
  if (!spec.standardize) return grid_search_impl(X, y, spec, seed);

  const Standardizer scaler(X, spec.fit_intercept);
  const Matrix z = scaler.apply(X);
  GridSearchResult result = grid_search_impl(z, y, spec, seed);
  result.model = scaler.restore(result.model);
  return result;
}

}  // namespace zsreg
