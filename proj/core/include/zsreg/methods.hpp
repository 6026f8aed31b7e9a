#pragma once

// Zero-shot regressors for targets never seen in training.
//
//  * Baseline: side information appended to the features, one model overall.
//  * SR (similarity-based relationship): one model per observed target from the
//    features only; an unobserved target's prediction is the inverse-distance
//    weighted average of the observed models' predictions.
//  * MPLC (model-parameter learning correspondence): one model per observed
//    target, then one regressor per model parameter mapping side information to
//    that parameter; the unobserved target's model is assembled from them.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "zsreg/dataset.hpp"
#include "zsreg/regression.hpp"

namespace zsreg {

enum class Distance { manhattan, euclidean };

double distance(Distance kind, const VectorRef& a, const VectorRef& b);
std::string_view to_string(Distance kind) noexcept;

/// One feature model per observed target, index-aligned with the rows of S^o.
struct TargetModels {
  std::vector<LinearModel> models;
  std::vector<FitDiagnostics> diagnostics;

  std::size_t size() const noexcept { return models.size(); }
};

struct SRConfig {
  Distance distance = Distance::euclidean;
  std::optional<std::size_t> k;  // nullopt: every observed target
};

/// g models, one per parameter of the per-target model, ordered
/// (w_1, ..., w_{a_x}, intercept).
struct MPLCModels {
  std::vector<LinearModel> param_models;

  /// Parameters of the model instantiated for side information s.
  Vector parameters_for(const VectorRef& s) const;
};

/// Fits one model on rows [x_i || s_target(i)] for every observed cell.
LinearModel fit_baseline(const SplitSide& observed, const RegressorSpec& spec, std::uint64_t seed);
double baseline_predict(const LinearModel& model, const VectorRef& x, const VectorRef& s);

/// Grid-searched model per observed target on that target's cells. A target with a
/// single cell gets an intercept-only model (flagged in diagnostics); a target
/// with none is an error. Sub-model seeds derive from the dataset target id, so
/// the result does not depend on target order.
TargetModels fit_per_target(const SplitSide& observed, const RegressorSpec& spec, std::uint64_t seed);

/// (observed target row, similarity weight) pairs used by SR for side info s.
/// Exact side-information matches take over with equal weights; otherwise the k
/// nearest (or all) targets get weight 1/d. Ties in distance break by row index.
std::vector<std::pair<std::size_t, double>> sr_weights(const MatrixRef& observed_side,
                                                       const VectorRef& s, const SRConfig& cfg);

double sr_predict(const TargetModels& models, const MatrixRef& observed_side, const VectorRef& s,
                  const VectorRef& x, const SRConfig& cfg);

/// Requires at least two observed targets.
MPLCModels fit_mplc(const TargetModels& models, const MatrixRef& observed_side,
                    const RegressorSpec& spec, std::uint64_t seed);

double mplc_predict(const MPLCModels& g, const VectorRef& s, const VectorRef& x);

enum class MethodKind { baseline, sr, mplc, mean };

/// A zero-shot method with its base learner. "mean" always predicts the mean of
/// the observed values; it is the default predictor of relative MSE.
struct MethodSpec {
  MethodKind kind = MethodKind::baseline;
  SRConfig sr;
  RegressorSpec learner = RegressorSpec::ridge();

  /// baseline | sr-euclidean | sr-manhattan | mplc | mean, with "-k<K>" appended
  /// for SR restricted to K neighbours.
  std::string name() const;
  static MethodSpec from_name(std::string_view name, RegressorSpec learner);
};

class FittedMethod {
 public:
  struct SR {
    TargetModels models;
    Matrix observed_side;
    SRConfig config;
  };
  struct Mean {
    double value;
  };
  using State = std::variant<LinearModel, SR, MPLCModels, Mean>;

  FittedMethod(MethodSpec spec, State state) : spec_(std::move(spec)), state_(std::move(state)) {}

  double predict(const VectorRef& x, const VectorRef& s) const;

  /// Predictions for every cell of an unobserved split side, in cell order.
  Vector predict(const SplitSide& unobserved) const;

  const MethodSpec& spec() const noexcept { return spec_; }
  const State& state() const noexcept { return state_; }

 private:
  MethodSpec spec_;
  State state_;
};

FittedMethod fit_method(const MethodSpec& spec, const SplitSide& observed, std::uint64_t seed);

}  // namespace zsreg
