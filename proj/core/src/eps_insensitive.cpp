// Epsilon-insensitive linear regression with an unpenalized bias, solved in the
// primal over z = (w, b).
//
// The loss max(0, |r| - eps) is replaced by its Huber smoothing with width mu
// (quadratic for 0 < |r| - eps < mu), which is C^1 and piecewise quadratic.
// Each smoothed problem is minimized by damped Newton steps with backtracking,
// and mu shrinks geometrically down to a negligible width. The smoothed and
// exact objectives differ by at most c * n * mu / 2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "zsreg/error.hpp"
#include "zsreg/regression.hpp"

namespace zsreg {

namespace {

constexpr double kMuShrink = 0.1;
constexpr int kMaxLineIter = 100;

class SmoothedProblem {
 public:
  SmoothedProblem(const MatrixRef& X, const VectorRef& y, double c, double eps, bool intercept)
      : X_(X), y_(y), c_(c), eps_(eps), intercept_(intercept), d_(X.cols()) {}

  Eigen::Index size() const { return d_ + (intercept_ ? 1 : 0); }
  Vector weights(const Vector& z) const { return z.head(d_); }

  Vector residuals(const Vector& z) const {
    Vector r = X_ * z.head(d_) - y_;
    if (intercept_) r.array() += z(d_);
    return r;
  }

  double value(const Vector& z, double mu) const {
    const Vector r = residuals(z);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double u = std::abs(r(i)) - eps_;
      if (u <= 0.0) continue;
      loss += u < mu ? 0.5 * u * u / mu : u - 0.5 * mu;
    }
    return 0.5 * z.head(d_).squaredNorm() + c_ * loss;
  }

  double exact(const Vector& z) const { return value(z, 0.0); }

  /// First and second derivative of t -> value(z + t * step, mu), given the
  /// residuals r of z and the residual change q per unit step.
  std::pair<double, double> line_derivatives(const Vector& w, const Vector& dw, const Vector& r, const Vector& q,
                                             double t, double mu) const {
    double d1 = dw.dot(w) + t * dw.squaredNorm();
    double d2 = dw.squaredNorm();
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double ri = r(i) + t * q(i);
      const double u = std::abs(ri) - eps_;
      if (u <= 0.0) continue;
      const double sign = ri > 0.0 ? 1.0 : -1.0;
      if (u < mu) {
        d1 += c_ * sign * (u / mu) * q(i);
        d2 += c_ * q(i) * q(i) / mu;
      } else {
        d1 += c_ * sign * q(i);
      }
    }
    return {d1, d2};
  }

  /// Residual change along a step in z.
  Vector residual_change(const Vector& step) const {
    Vector q = X_ * step.head(d_);
    if (intercept_) q.array() += step(d_);
    return q;
  }

  void derivatives(const Vector& z, double mu, Vector& grad, Matrix& hess) const {
    const Vector r = residuals(z);
    const Eigen::Index n = r.size();
    Vector g(n);
    std::vector<Eigen::Index> quad;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = std::abs(r(i)) - eps_;
      const double sign = r(i) > 0.0 ? 1.0 : -1.0;
      if (u <= 0.0) {
        g(i) = 0.0;
      } else if (u < mu) {
        g(i) = sign * u / mu;
        quad.push_back(i);
      } else {
        g(i) = sign;
      }
    }
    const Eigen::Index p = size();
    grad.resize(p);
    grad.head(d_) = z.head(d_) + c_ * X_.transpose() * g;
    if (intercept_) grad(d_) = c_ * g.sum();

    hess = Matrix::Zero(p, p);
    hess.topLeftCorner(d_, d_).diagonal().setOnes();
    if (!quad.empty()) {
      Matrix Zq(static_cast<Eigen::Index>(quad.size()), p);
      for (std::size_t k = 0; k < quad.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        Zq.row(row).head(d_) = X_.row(quad[k]);
        if (intercept_) Zq(row, d_) = 1.0;
      }
      hess.selfadjointView<Eigen::Lower>().rankUpdate(Zq.transpose(), c_ / mu);
      hess = hess.selfadjointView<Eigen::Lower>();
    }
  }

 private:
  const MatrixRef& X_;
  const VectorRef& y_;
  double c_;
  double eps_;
  bool intercept_;
  Eigen::Index d_;
};

// Minimizer of the convex 1-D function t -> value(z + t * step, mu). Its
// derivative is piecewise linear and increasing, so safeguarded Newton steps
// inside a bracket reach the root in a few iterations.
double exact_step(const SmoothedProblem& problem, const Vector& z, const Vector& step, double mu, double slope) {
  const Vector r = problem.residuals(z);
  const Vector q = problem.residual_change(step);
  const Vector w = problem.weights(z);
  const Vector dw = problem.weights(step);
  auto deriv = [&](double t) { return problem.line_derivatives(w, dw, r, q, t, mu); };

  double lo = 0.0;
  double hi = 1.0;
  auto [dhi, hhi] = deriv(hi);
  for (int k = 0; k < 60 && dhi < 0.0; ++k) {
    lo = hi;
    hi *= 2.0;
    std::tie(dhi, hhi) = deriv(hi);
  }
  if (dhi < 0.0) return hi;
  const double target = 1e-12 * std::abs(slope);
  double t = 1.0;
  for (int k = 0; k < kMaxLineIter; ++k) {
    const auto [g, h] = deriv(t);
    if (std::abs(g) <= target) return t;
    if (g < 0.0) lo = t;
    else hi = t;
    double next = h > 0.0 ? t - g / h : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * hi) return t;
    t = next;
  }
  return t;
}

}  // namespace

double eps_insensitive_objective(const LinearModel& model, const MatrixRef& X,
                                 const VectorRef& y, double c, double epsilon) {
  const Vector residual = model.predict_rows(X) - y;
  const double loss = (residual.array().abs() - epsilon).max(0.0).sum();
  return 0.5 * model.weights.squaredNorm() + c * loss;
}

FitResult fit_eps_insensitive(const MatrixRef& X, const VectorRef& y, double c,
                              const RegressorSpec& spec) {
  if (X.rows() != y.size()) throw InvalidArgument("rows(X) does not match len(y)");
  if (X.rows() < 1) throw InvalidArgument("at least one row is required");
  if (!(c > 0.0)) throw InvalidArgument("C must be positive");
  if (!(spec.epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");

  const SmoothedProblem problem(X, y, c, spec.epsilon, spec.fit_intercept);
  const Eigen::Index d = X.cols();
  const Eigen::Index p = problem.size();

  Vector z = Vector::Zero(p);
  if (spec.fit_intercept) {
    Vector sorted = y;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    z(d) = sorted(sorted.size() / 2);
  }

  const double y_scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  const double mu_min = 1e-10 * y_scale;
  double mu = std::max(mu_min, problem.residuals(z).cwiseAbs().maxCoeff());

  Vector best = z;
  double best_exact = problem.exact(z);
  int steps = 0;
  bool budget_left = true;
  bool final_stage_done = false;
  Vector grad;
  Matrix hess;

  while (budget_left) {
    const bool final_stage = mu <= mu_min;
    // Intermediate widths only need a warm start; the last one is solved to
    // machine precision so the returned point is a true local minimum.
    const double stop = final_stage ? 1e-14 : spec.tol;
    double current = problem.value(z, mu);
    bool stage_done = false;
    while (!stage_done) {
      if (steps >= spec.max_iter) {
        budget_left = false;
        break;
      }
      ++steps;
      problem.derivatives(z, mu, grad, hess);
      const double damping = 1e-12 * (1.0 + hess.diagonal().maxCoeff());
      hess.diagonal().array() += damping;
      const Vector step = -hess.ldlt().solve(grad);
      const double slope = grad.dot(step);
      if (!(slope < 0.0) || !step.allFinite()) {
        stage_done = true;
        break;
      }
      const double t = exact_step(problem, z, step, mu, slope);
      const Vector candidate = z + t * step;
      const double next = problem.value(candidate, mu);
      if (!(next < current)) {
        stage_done = true;
        break;
      }
      const double decrease = current - next;
      z = std::move(candidate);
      current = next;
      if (decrease <= stop * std::max(1.0, std::abs(current)) || t * step.norm() <= 1e-15 * (1.0 + z.norm()))
        stage_done = true;
    }
    const double exact = problem.exact(z);
    if (exact < best_exact) {
      best_exact = exact;
      best = z;
    }
    if (final_stage && stage_done) {
      final_stage_done = true;
      break;
    }
    mu = std::max(mu_min, mu * kMuShrink);
  }

  FitResult result;
  result.model.weights = best.head(d);
  result.model.intercept = spec.fit_intercept ? best(d) : 0.0;
  result.diagnostics.iterations = steps;
  result.diagnostics.converged = final_stage_done;
  return result;
}

}  // namespace zsreg
