#include "netsemi/transform.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "netsemi/errors.hpp"

namespace netsemi {

namespace {
constexpr double kAnchorEpsilon = 1e-12;
constexpr double kScaleEpsilon = 1e-12;

CoefficientTag transformed_tag(CoefficientTag tag) {
  switch (tag) {
    case CoefficientTag::TrueRaw:
    case CoefficientTag::TrueTransformed:
      return CoefficientTag::TrueTransformed;
    case CoefficientTag::EstimateRaw:
    case CoefficientTag::EstimateTransformed:
      return CoefficientTag::EstimateTransformed;
  }
  return CoefficientTag::EstimateTransformed;
}
}  // namespace

const char* to_string(TransformMode mode) {
  return mode == TransformMode::Dbmm ? "dbmm" : "std";
}

int argmin_degree(const Eigen::VectorXd& d) {
  int best = 0;
  for (int i = 1; i < d.size(); ++i) {
    if (d[i] < d[best]) best = i;
  }
  return best;
}

int argmax_degree(const Eigen::VectorXd& d) {
  int best = 0;
  for (int i = 1; i < d.size(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  return best;
}

FixedEffectVector dbmm(const FixedEffectVector& eta, const Eigen::VectorXd& d) {
  if (d.size() != eta.values.size()) {
    throw std::invalid_argument("dbmm: degree vector length mismatch");
  }
  const int lo = argmin_degree(d);
  const int hi = argmax_degree(d);
  if (lo == hi) throw DegenerateAnchors("dbmm: degree anchors coincide");
  const double denom = eta.values[hi] - eta.values[lo];
  if (std::abs(denom) < kAnchorEpsilon) {
    std::ostringstream os;
    os << "dbmm: anchor coefficients coincide (|eta[" << hi << "] - eta[" << lo
       << "]| < 1e-12)";
    throw DegenerateAnchors(os.str());
  }
  Eigen::VectorXd out = (eta.values.array() - eta.values[lo]) / denom;
  return FixedEffectVector(std::move(out), transformed_tag(eta.tag));
}

FixedEffectVector coefficient_minimax(const FixedEffectVector& eta) {
  int lo = 0, hi = 0;
  for (int i = 1; i < eta.values.size(); ++i) {
    if (eta.values[i] < eta.values[lo]) lo = i;
    if (eta.values[i] > eta.values[hi]) hi = i;
  }
  const double denom = eta.values[hi] - eta.values[lo];
  if (denom < kAnchorEpsilon) {
    throw DegenerateAnchors("coefficient_minimax: max - min coefficient < 1e-12");
  }
  Eigen::VectorXd out = (eta.values.array() - eta.values[lo]) / denom;
  out[lo] = 0.0;  // exact endpoints regardless of rounding
  out[hi] = 1.0;
  return FixedEffectVector(std::move(out), eta.tag);
}

FixedEffectVector standardize(const FixedEffectVector& eta) {
  const int n = eta.n();
  const double mean = eta.values.mean();
  const double ss = (eta.values.array() - mean).square().sum();
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd <= kScaleEpsilon) {
    throw DegenerateScale("standardize: sample standard deviation <= 1e-12");
  }
  Eigen::VectorXd out = (eta.values.array() - mean) / sd;
  return FixedEffectVector(std::move(out), transformed_tag(eta.tag));
}

double kendall_tau(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("kendall_tau: length mismatch");
  const int n = static_cast<int>(a.size());
  long concordant_minus_discordant = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      const double prod = da * db;
      if (prod > 0) ++concordant_minus_discordant;
      else if (prod < 0) --concordant_minus_discordant;
    }
  }
  const double total = 0.5 * n * (n - 1);
  return static_cast<double>(concordant_minus_discordant) / total;
}

FixedEffectVector sign_fix(const FixedEffectVector& eta_std, const Eigen::VectorXd& d) {
  if (d.size() != eta_std.values.size()) {
    throw std::invalid_argument("sign_fix: degree vector length mismatch");
  }
  if (kendall_tau(eta_std.values, d) < 0.0) {
    return FixedEffectVector(-eta_std.values, eta_std.tag);
  }
  return eta_std;
}

TrimResult trim(const FixedEffectVector& eta, double bound) {
  if (!(bound > 0)) throw std::invalid_argument("trim: bound must be > 0");
  TrimResult out;
  Eigen::VectorXd values = eta.values;
  for (int i = 0; i < values.size(); ++i) {
    if (values[i] > bound) {
      values[i] = bound;
      out.trimmed.push_back(i);
    } else if (values[i] < -bound) {
      values[i] = -bound;
      out.trimmed.push_back(i);
    }
  }
  out.values = FixedEffectVector(std::move(values), eta.tag);
  return out;
}

}  // namespace netsemi
