#pragma once

// Base learners shared by every zero-shot method: closed-form ridge, an
// epsilon-insensitive linear regressor, and seeded grid-search tuning.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace zsreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;

/// y = weights . x + intercept
struct LinearModel {
  Vector weights;
  double intercept = 0.0;

  double predict(const VectorRef& x) const { return weights.dot(x) + intercept; }
  /// One prediction per row of X.
  Vector predict_rows(const MatrixRef& X) const;

  Eigen::Index dimension() const noexcept { return weights.size(); }
  bool is_finite() const noexcept;

  /// Parameter vector (w_1, ..., w_d, intercept).
  Vector parameters() const;
  static LinearModel from_parameters(const VectorRef& params);

  friend bool operator==(const LinearModel& a, const LinearModel& b) {
    return a.intercept == b.intercept && a.weights.size() == b.weights.size() &&
           a.weights == b.weights;
  }
};

enum class LearnerFamily { ridge, epsilon_insensitive_linear };

/// Base learner family plus its tuning grid.
struct RegressorSpec {
  LearnerFamily family = LearnerFamily::ridge;
  std::vector<double> grid;  // alpha for ridge, C for epsilon-insensitive
  int inner_folds = 3;
  double epsilon = 0.0;
  int max_iter = 10000;
  double tol = 1e-6;
  bool fit_intercept = true;
  bool standardize = false;

  /// alpha in {e^-3, ..., e^3}.
  static RegressorSpec ridge();
  /// C in {10^-3, ..., 10^3}.
  static RegressorSpec epsilon_insensitive();

  /// "ridge" or "lsvr".
  std::string name() const;
  void validate() const;
};

/// Side-channel information attached to a fit. Never affects the model itself.
struct FitDiagnostics {
  bool converged = true;
  int iterations = 0;
  bool folds_reduced = false;
  int folds_used = 0;
  bool intercept_only = false;
};

struct FitResult {
  LinearModel model;
  FitDiagnostics diagnostics;
};

/// argmin ||Xw + b - y||^2 + alpha ||w||^2 with b unpenalized (solved on centered
/// data). With fit_intercept = false, b = 0 and no centering happens.
LinearModel fit_ridge(const MatrixRef& X, const VectorRef& y, double alpha,
                      bool fit_intercept = true);

/// ||Xw + b - y||^2 + alpha ||w||^2
double ridge_objective(const LinearModel& model, const MatrixRef& X, const VectorRef& y,
                       double alpha);

/// Minimizes (1/2)||w||^2 + c * sum max(0, |x.w + b - y| - epsilon) with b free.
/// Non-convergence within spec.max_iter returns the best iterate with
/// diagnostics.converged = false.
FitResult fit_eps_insensitive(const MatrixRef& X, const VectorRef& y, double c,
                              const RegressorSpec& spec);

double eps_insensitive_objective(const LinearModel& model, const MatrixRef& X,
                                 const VectorRef& y, double c, double epsilon);

/// Fits one member of the spec's family at a fixed regularization value.
FitResult fit_regressor(const MatrixRef& X, const VectorRef& y, const RegressorSpec& spec,
                        double reg);

struct GridSearchResult {
  LinearModel model;
  double chosen_reg = 0.0;
  std::vector<double> cv_mse;  // aligned with spec.grid
  FitDiagnostics diagnostics;
};

/// Seeded k-fold selection of the regularization value by mean held-out MSE,
/// followed by a refit on all rows. Ties go to the smaller value.
///
/// Fold membership is derived from a seeded hash of each row's content, so the
/// result does not depend on row order. Fewer rows than folds reduces the fold
/// count (diagnostics.folds_reduced); a single row yields an intercept-only model.
GridSearchResult grid_search_fit(const MatrixRef& X, const VectorRef& y,
                                 const RegressorSpec& spec, std::uint64_t seed);

/// Fold label in [0, folds) for every row, as used by grid_search_fit.
std::vector<int> inner_fold_labels(const MatrixRef& X, const VectorRef& y, int folds,
                                   std::uint64_t seed);

double mean_squared_error(const VectorRef& predicted, const VectorRef& actual);

}  // namespace zsreg
