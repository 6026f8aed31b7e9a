#pragma once

// The two-observed-target toy problem: y1 = x1 for s = (1, 0), y2 = x2 for
// s = (0, 1), and an unobserved target s = (1, 1) whose true relation is
// y = x . s. The one unobserved instance x = (1.2, 1.3) has y = 2.5.

#include "zsreg/dataset.hpp"
#include "zsreg/regression.hpp"

namespace zsreg {

ZeroShotDataset gen_toy();

/// Observed: targets t1, t2 with the training instances. Unobserved: tu with u1.
SplitView toy_view(const ZeroShotDataset& toy);

/// Near-unregularized ridge without intercepts, so the fitted models are the
/// exact linear relations of the toy.
RegressorSpec toy_learner();

}  // namespace zsreg
