#include "netsemi/error_distribution.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace netsemi {

ErrorDistribution ErrorDistribution::logistic(double location, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("logistic: scale must be > 0");
  return ErrorDistribution(Family::Logistic, location, scale);
}

ErrorDistribution ErrorDistribution::beta(double alpha, double beta) {
  if (!(alpha > 0) || !(beta > 0)) throw std::invalid_argument("beta: parameters must be > 0");
  return ErrorDistribution(Family::Beta, alpha, beta);
}

ErrorDistribution ErrorDistribution::exponential(double rate) {
  if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
  return ErrorDistribution(Family::Exponential, rate, 0.0);
}

ErrorDistribution ErrorDistribution::affine(double a, double b) const {
  if (!(a > 0)) throw std::invalid_argument("affine: a must be > 0");
  // (a, b) after (a0, b0): a*(a0*u + 2*b0) + 2*b = a*a0*u + 2*(a*b0 + b)
  ErrorDistribution out = *this;
  out.a_ = a * a_;
  out.b_ = a * b_ + b;
  return out;
}

double ErrorDistribution::base_cdf(double x) const {
  switch (family_) {
    case Family::Logistic:
      return 1.0 / (1.0 + std::exp(-(x - par1_) / par2_));
    case Family::Beta:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return boost::math::ibeta(par1_, par2_, x);
    case Family::Exponential:
      if (x <= 0.0) return 0.0;
      return -std::expm1(-par1_ * x);
  }
  throw std::logic_error("unreachable");
}

double ErrorDistribution::base_pdf(double x) const {
  switch (family_) {
    case Family::Logistic: {
      const double z = (x - par1_) / par2_;
      const double e = std::exp(-std::abs(z));
      const double denom = (1.0 + e);
      return e / (par2_ * denom * denom);
    }
    case Family::Beta:
      if (x < 0.0 || x > 1.0) return 0.0;
      return boost::math::ibeta_derivative(par1_, par2_, x);
    case Family::Exponential:
      if (x < 0.0) return 0.0;
      return par1_ * std::exp(-par1_ * x);
  }
  throw std::logic_error("unreachable");
}

double ErrorDistribution::base_quantile(double p) const {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("quantile: p must be in (0,1)");
  switch (family_) {
    case Family::Logistic:
      return par1_ + par2_ * std::log(p / (1.0 - p));
    case Family::Beta:
      return boost::math::ibeta_inv(par1_, par2_, p);
    case Family::Exponential:
      return -std::log1p(-p) / par1_;
  }
  throw std::logic_error("unreachable");
}

double ErrorDistribution::cdf(double x) const { return base_cdf((x - 2.0 * b_) / a_); }

double ErrorDistribution::pdf(double x) const { return base_pdf((x - 2.0 * b_) / a_) / a_; }

double ErrorDistribution::quantile(double p) const { return a_ * base_quantile(p) + 2.0 * b_; }

std::string ErrorDistribution::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::Logistic:
      os << "logistic(" << par1_ << "," << par2_ << ")";
      break;
    case Family::Beta:
      os << "beta(" << par1_ << "," << par2_ << ")";
      break;
    case Family::Exponential:
      os << "exponential(" << par1_ << ")";
      break;
  }
  if (a_ != 1.0 || b_ != 0.0) os << "*affine(" << a_ << "," << b_ << ")";
  return os.str();
}

}  // namespace netsemi
