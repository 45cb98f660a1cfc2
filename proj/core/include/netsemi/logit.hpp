#pragma once

#include "netsemi/model.hpp"

namespace netsemi {

struct LogitFit {
  FixedEffectVector eta;  // tag EstimateRaw
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Fixed-effects logit (beta-model) MLE by damped Newton: maximizes
/// sum_{i<j} [g_ij (eta_i + eta_j) - log(1 + exp(eta_i + eta_j))]. At the
/// solution each individual's expected degree under the logistic link matches
/// the observed degree within tol. Throws MleNonexistent when some degree is
/// 0 or 1.
LogitFit logit_fit(const Network& g, double tol = 1e-10, int max_iters = 200);

}  // namespace netsemi
