#pragma once

#include <string>

#include "netsemi/rng.hpp"

namespace netsemi {

/// Parametric noise family for the link-surplus error u. Besides the base
/// families it carries an optional positive affine layer (u -> a*u + 2b),
/// the transformation a location/scale change of the coefficient vector
/// induces on the error: P(u <= w'eta) = P(a*u + 2b <= w'(a*eta + b*1)).
class ErrorDistribution {
 public:
  enum class Family { Logistic, Beta, Exponential };

  static ErrorDistribution logistic(double location = 0.0, double scale = 1.0);
  static ErrorDistribution beta(double alpha, double beta);
  static ErrorDistribution exponential(double rate);

  /// Distribution of a*u + 2b for a > 0; composes with any existing layer.
  ErrorDistribution affine(double a, double b) const;

  double cdf(double x) const;
  double pdf(double x) const;

  /// Inverse CDF; p must lie in (0, 1).
  double quantile(double p) const;

  /// One draw by inversion; consumes exactly one uniform from rng.
  double sample(CounterRng& rng) const { return quantile(rng.uniform01()); }

  Family family() const { return family_; }
  double param1() const { return par1_; }  // location / alpha / rate
  double param2() const { return par2_; }  // scale / beta
  double affine_a() const { return a_; }
  double affine_b() const { return b_; }
  std::string describe() const;

 private:
  ErrorDistribution(Family f, double p1, double p2) : family_(f), par1_(p1), par2_(p2) {}

  double base_cdf(double x) const;
  double base_pdf(double x) const;
  double base_quantile(double p) const;

  Family family_;
  double par1_ = 0.0;  // location / alpha / rate
  double par2_ = 1.0;  // scale / beta / unused
  double a_ = 1.0;     // affine layer: u -> a*u + 2b
  double b_ = 0.0;
};

}  // namespace netsemi
