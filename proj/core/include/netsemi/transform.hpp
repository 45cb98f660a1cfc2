#pragma once

#include <Eigen/Core>
#include <vector>

#include "netsemi/model.hpp"

namespace netsemi {

enum class TransformMode { Dbmm, Standardize };

const char* to_string(TransformMode mode);

/// Which identification-fixing transform to apply and its parameters. The
/// anchors are recorded by the pipeline (argmin/argmax degree), never set by
/// the caller.
struct TransformSpec {
  TransformMode mode = TransformMode::Dbmm;
  double trim_bound = 4.0;  // Standardize only
  int anchor_low = -1;
  int anchor_high = -1;
};

/// Lowest index wins on degree ties.
int argmin_degree(const Eigen::VectorXd& d);
int argmax_degree(const Eigen::VectorXd& d);

/// Degree-based minimax normalization: the minimum-degree individual's
/// coefficient maps to 0 and the maximum-degree individual's to 1. Anchor
/// *indices* come from the degrees, anchor *values* from the input vector, so
/// the same map applies to truths and estimates. If the estimate's order is
/// reversed the map flips it back.
FixedEffectVector dbmm(const FixedEffectVector& eta, const Eigen::VectorXd& d);

/// In-loop variant: min coefficient -> 0, max coefficient -> 1 (anchored by
/// value, not by degree); output lies in [0,1] with both endpoints attained.
FixedEffectVector coefficient_minimax(const FixedEffectVector& eta);

/// Mean 0, sample standard deviation 1 (N-1 denominator).
/// Throws DegenerateScale when the standard deviation is <= 1e-12.
FixedEffectVector standardize(const FixedEffectVector& eta);

/// Kendall rank correlation; ties contribute zero.
double kendall_tau(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Flips the sign of a standardized vector when its Kendall correlation with
/// the degrees is negative (the estimator cannot identify the sign; the
/// degree order can). Zero correlation leaves the input unchanged.
FixedEffectVector sign_fix(const FixedEffectVector& eta_std, const Eigen::VectorXd& d);

struct TrimResult {
  FixedEffectVector values;
  std::vector<int> trimmed;  // indices clamped to +/-bound
};

/// Clamps entries into [-bound, bound] and reports who was affected.
TrimResult trim(const FixedEffectVector& eta, double bound);

}  // namespace netsemi
