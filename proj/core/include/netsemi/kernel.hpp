#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <utility>

#include "netsemi/model.hpp"

namespace netsemi {

/// F̂ estimates are clamped into [kClampEpsilon, 1 - kClampEpsilon]; the true
/// probabilities are bounded away from {0,1} by assumption and clamping keeps
/// downstream quotients finite.
inline constexpr double kClampEpsilon = 1e-6;

/// Density floor: p̂1 + p̂0 at or below this raises DegenerateDensity.
inline constexpr double kDensityEpsilon = 1e-12;

enum class KernelFamily { FourthOrderGaussian };
enum class BandwidthRule { PaperRule };  // h = L^(-1/7)

struct KernelSpec {
  KernelFamily family = KernelFamily::FourthOrderGaussian;
  BandwidthRule rule = BandwidthRule::PaperRule;
  std::optional<double> bandwidth_override;

  double bandwidth(std::size_t pair_count) const;
};

/// Fourth-order Gaussian kernel K(z) = (3 - z^2) phi(z) / 2. Symmetric,
/// integrates to one, zero first/second/third moments, so the leave-one-out
/// estimates carry O(h^4) bias (at the price of K taking negative values).
double kernel_eval(double z);

/// K'(z) = (z^3 - 5z) phi(z) / 2.
double kernel_deriv(double z);

/// Leave-one-out kernel estimates for every pair at a coefficient vector:
/// p1/p0 split the unconditional density of v by link indicator, pd1/pd0 are
/// their derivatives, F = clamp(p1/(p1+p0)), f = dF/dv floored at zero.
struct KernelProbabilityField {
  Eigen::VectorXd v;    // pair index values eta_i + eta_j
  Eigen::VectorXd p1;
  Eigen::VectorXd p0;
  Eigen::VectorXd pd1;
  Eigen::VectorXd pd0;
  Eigen::VectorXd F;    // clamped
  Eigen::VectorXd f;    // floored at 0
  Eigen::VectorXd eta;  // coefficients the field was computed at
  double bandwidth = 0.0;
  std::int64_t clamp_count = 0;  // pairs where the F clamp was active
};

/// O(L^2); parallel over pairs, the inner sum per pair stays sequential in
/// linear order so results do not depend on the thread count.
/// Throws DegenerateDensity if p1+p0 <= kDensityEpsilon at any pair.
KernelProbabilityField compute_field(const FixedEffectVector& eta, const Network& g,
                                     const KernelSpec& spec);

/// GMM objective at eta and -eta over the same fixed network. Identical by
/// kernel symmetry: the sign of the coefficients cannot be identified from
/// the objective alone.
std::pair<double, double> sign_symmetry_check(const FixedEffectVector& eta,
                                              const Network& g, const KernelSpec& spec);

}  // namespace netsemi
