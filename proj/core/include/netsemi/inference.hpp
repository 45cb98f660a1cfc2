#pragma once

#include <Eigen/Core>

#include "netsemi/kernel.hpp"
#include "netsemi/model.hpp"

namespace netsemi {

struct VarianceEstimate {
  Eigen::MatrixXd V;      // sandwich
  Eigen::MatrixXd omega;  // middle matrix
  double condition_diagnostic = 0.0;  // condition estimate of M'M
};

/// Omega_ij = (1/(N-1)) sum_k (g_ik - F̂(v_ik)) (g_jk - F̂(v_jk)) with the
/// self-terms k = i and k = j excluded (there are no self-links and v_ii is
/// undefined). Symmetric by construction.
Eigen::MatrixXd omega_hat(const FixedEffectVector& eta_t, const Network& g,
                          const KernelProbabilityField& field);

/// V = (M'M)^{-1} M' Omega M (M'M)^{-1}, symmetrized on output. Solves go
/// through a factorization with an explicit condition estimate; throws
/// SingularBread when the condition exceeds 1e12.
VarianceEstimate sandwich_variance(const Eigen::MatrixXd& M, const Eigen::MatrixXd& omega);

/// Asymptotic V0 at the transformed truths: M0 built from the exact error
/// density, Omega0 from the exact conditional variances
///   Omega0_ii = (1/(N-1)) sum_{k != i} F(v_ik)(1 - F(v_ik)),
///   Omega0_ij = (1/(N-1)) F(v_ij)(1 - F(v_ij)) for i != j,
/// the scaling that matches omega_hat (both target Var(sqrt(N-1) m)).
VarianceEstimate asymptotic_variance(const FixedEffectVector& eta0_t,
                                     const ErrorDistribution& err_t, const Network& g);

/// phi = sqrt(N-1) (eta_hat_i - eta0_i) / sqrt(V_ii); asymptotically standard
/// normal. Throws NonpositiveVariance when V_ii <= 0.
double phi_statistic(const FixedEffectVector& eta_hat_t, const FixedEffectVector& eta0_t,
                     const VarianceEstimate& V, int index);

}  // namespace netsemi
