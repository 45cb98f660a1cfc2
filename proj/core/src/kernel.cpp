#include "netsemi/kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "netsemi/errors.hpp"
#include "netsemi/gmm.hpp"

namespace netsemi {

namespace {
// 1/sqrt(2*pi)
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kHalfInvSqrt2Pi = 0.5 * kInvSqrt2Pi;
}  // namespace

double KernelSpec::bandwidth(std::size_t pair_count) const {
  if (bandwidth_override) {
    if (!(*bandwidth_override > 0)) {
      throw std::invalid_argument("KernelSpec: bandwidth override must be > 0");
    }
    return *bandwidth_override;
  }
  return std::pow(static_cast<double>(pair_count), -1.0 / 7.0);
}

double kernel_eval(double z) {
  return kHalfInvSqrt2Pi * (3.0 - z * z) * std::exp(-0.5 * z * z);
}

double kernel_deriv(double z) {
  return kHalfInvSqrt2Pi * z * (z * z - 5.0) * std::exp(-0.5 * z * z);
}

KernelProbabilityField compute_field(const FixedEffectVector& eta, const Network& g,
                                     const KernelSpec& spec) {
  const int n = eta.n();
  if (n != g.n()) throw std::invalid_argument("compute_field: eta and network sizes differ");
  const std::size_t L = g.pairs();

  KernelProbabilityField field;
  field.eta = eta.values;
  field.v.resize(L);
  for_each_pair(n, [&](int i, int j, std::size_t l) {
    field.v[l] = eta.values[i] + eta.values[j];
  });

  const double h = spec.bandwidth(L);
  field.bandwidth = h;
  const double inv_h = 1.0 / h;
  const double norm_p = 1.0 / (h * static_cast<double>(L - 1));
  const double norm_pd = norm_p * inv_h;

  // 0/1 indicators as doubles keep the inner loop branch-free.
  std::vector<double> linked(L);
  for (std::size_t l = 0; l < L; ++l) linked[l] = g.link_at(l) ? 1.0 : 0.0;

  field.p1.resize(L);
  field.p0.resize(L);
  field.pd1.resize(L);
  field.pd0.resize(L);

  const double* v = field.v.data();
  const double* gm = linked.data();
  const double k_self = 3.0 * kHalfInvSqrt2Pi;  // K(0); K'(0) = 0

  // Each pair's sums run sequentially over m in linear order (own term
  // removed afterwards), so results do not depend on the thread count.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(L); ++l) {
    const double vl = v[l];
    double s = 0.0, s1 = 0.0, sd = 0.0, sd1 = 0.0;
#pragma omp simd reduction(+ : s, s1, sd, sd1)
    for (std::size_t m = 0; m < L; ++m) {
      const double z = (vl - v[m]) * inv_h;
      const double zz = z * z;
      const double w = kHalfInvSqrt2Pi * std::exp(-0.5 * zz);
      const double k = (3.0 - zz) * w;
      const double kd = z * (zz - 5.0) * w;
      s += k;
      s1 += gm[m] * k;
      sd += kd;
      sd1 += gm[m] * kd;
    }
    s -= k_self;
    s1 -= gm[l] * k_self;
    field.p1[l] = norm_p * s1;
    field.p0[l] = norm_p * (s - s1);
    field.pd1[l] = norm_pd * sd1;
    field.pd0[l] = norm_pd * (sd - sd1);
  }

  field.F.resize(L);
  field.f.resize(L);
  field.clamp_count = 0;
  for (std::size_t l = 0; l < L; ++l) {
    const double den = field.p1[l] + field.p0[l];
    if (!(den > kDensityEpsilon)) {
      std::ostringstream os;
      os << "compute_field: density of v degenerate at pair " << l << " (p1+p0=" << den
         << ")";
      throw DegenerateDensity(os.str());
    }
    double F = field.p1[l] / den;
    if (F < kClampEpsilon) {
      F = kClampEpsilon;
      ++field.clamp_count;
    } else if (F > 1.0 - kClampEpsilon) {
      F = 1.0 - kClampEpsilon;
      ++field.clamp_count;
    }
    field.F[l] = F;
    // dF/dv by the quotient rule, floored at zero (the monotonicity the
    // kernel estimator cannot enforce on its own).
    const double num = field.pd1[l] * den - field.p1[l] * (field.pd1[l] + field.pd0[l]);
    const double fu = num / (den * den);
    field.f[l] = fu > 0.0 ? fu : 0.0;
  }
  return field;
}

std::pair<double, double> sign_symmetry_check(const FixedEffectVector& eta,
                                              const Network& g, const KernelSpec& spec) {
  const double q_plus = objective(compute_field(eta, g, spec), g);
  FixedEffectVector neg(-eta.values, eta.tag);
  const double q_minus = objective(compute_field(neg, g, spec), g);
  return {q_plus, q_minus};
}

}  // namespace netsemi
