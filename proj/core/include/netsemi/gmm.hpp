#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "netsemi/kernel.hpp"
#include "netsemi/model.hpp"
#include "netsemi/transform.hpp"

namespace netsemi {

/// m̂_i = d_i - (1/(N-1)) sum_{j != i} F̂(v_ij), built from a clamped field.
Eigen::VectorXd moments(const KernelProbabilityField& field, const Network& g);
Eigen::VectorXd moments(const FixedEffectVector& eta, const Network& g,
                        const KernelSpec& spec);

/// Q̂ = m̂'m̂.
double objective(const KernelProbabilityField& field, const Network& g);
double objective(const FixedEffectVector& eta, const Network& g, const KernelSpec& spec);

/// N x N derivative matrix: off-diagonal M_ij = -(1/(N-1)) f̂(v_ij), diagonal
/// M_ii = sum of the row's off-diagonals. Symmetric, entries <= 0.
Eigen::MatrixXd moment_jacobian(const KernelProbabilityField& field, int n);
Eigen::MatrixXd moment_jacobian(const FixedEffectVector& eta, const Network& g,
                                const KernelSpec& spec);

/// Oracle mode: the kernel estimates replaced by an exact error distribution.
Eigen::VectorXd oracle_moments(const FixedEffectVector& eta, const Network& g,
                               const ErrorDistribution& err);
Eigen::MatrixXd oracle_jacobian(const FixedEffectVector& eta, const ErrorDistribution& err);

struct SolverConfig {
  int max_iters = 5000;
  double tol_step = 1e-8;
  double tol_obj = 1e-12;
  double levenberg_lambda0 = 1e-3;
  double lambda_growth = 10.0;
  double lambda_ceiling = 1e10;
  std::uint64_t seed = 0;  // restart perturbations
  int n_restarts = 3;
};

struct SolverTrace {
  int iterations = 0;
  bool converged = false;
  double final_objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> objective_path;  // initial value, then each accepted step
  int restart_index = 0;
  int degenerate_density_rejections = 0;
  double lambda_final = 0.0;
};

struct EstimationResult {
  FixedEffectVector coefficients;    // final transform applied
  Eigen::VectorXd raw_coefficients;  // solver scale (in-loop normalized)
  SolverTrace trace;
  KernelProbabilityField field;      // at the transformed coefficients
  TransformSpec transform;
  std::vector<int> trimmed;          // final trim mask (Standardize mode)
  int inloop_trimmed_unique = 0;     // individuals ever trimmed inside the loop
  bool sign_flipped = false;
  Eigen::MatrixXd variance;          // sandwich V̂; empty when unavailable
  double variance_condition = std::numeric_limits<double>::quiet_NaN();
  std::string variance_error;        // nonempty when V̂ could not be computed
  std::string method = "semiparametric";
  double loglik = std::numeric_limits<double>::quiet_NaN();  // logit only
  double bandwidth = 0.0;
  std::uint64_t seed = 0;
  int n = 0;
};

/// Damped Gauss-Newton on the degree moments with the identification-fixing
/// normalization applied inside the loop (coefficient minimax for Dbmm,
/// standardize + trim for Standardize), then the final transform against the
/// observed degrees. Throws SingularNormalEquations / DegenerateScale /
/// DegenerateAnchors; non-convergence is flagged in the trace, not thrown.
EstimationResult fit(const Network& g, const KernelSpec& spec, const SolverConfig& solver,
                     const TransformSpec& transform);

}  // namespace netsemi
