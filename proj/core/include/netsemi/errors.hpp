#pragma once

#include <stdexcept>
#include <string>

namespace netsemi {

/// Base type for data-dependent estimation failures. Callers that run many
/// replications catch this and record an error code; programming errors keep
/// throwing std::invalid_argument / std::logic_error.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// p̂1 + p̂0 at some pair fell below the density floor (the density of v at
/// that pair is numerically zero).
struct DegenerateDensity : EstimationError {
  explicit DegenerateDensity(const std::string& what)
      : EstimationError("DegenerateDensity", what) {}
};

/// The two normalization anchors carry (numerically) the same coefficient.
struct DegenerateAnchors : EstimationError {
  explicit DegenerateAnchors(const std::string& what)
      : EstimationError("DegenerateAnchors", what) {}
};

/// Sample standard deviation too small to standardize.
struct DegenerateScale : EstimationError {
  explicit DegenerateScale(const std::string& what)
      : EstimationError("DegenerateScale", what) {}
};

/// M̂'M̂ numerically singular at the damping ceiling (insufficient degree
/// variation: the moment derivatives are collinear).
struct SingularNormalEquations : EstimationError {
  explicit SingularNormalEquations(const std::string& what)
      : EstimationError("SingularNormalEquations", what) {}
};

/// The GMM bread matrix M'M cannot be inverted reliably.
struct SingularBread : EstimationError {
  explicit SingularBread(const std::string& what)
      : EstimationError("SingularBread", what) {}
};

/// beta-model MLE does not exist (some degree is 0 or 1).
struct MleNonexistent : EstimationError {
  explicit MleNonexistent(const std::string& what)
      : EstimationError("MleNonexistent", what) {}
};

struct NonpositiveVariance : EstimationError {
  explicit NonpositiveVariance(const std::string& what)
      : EstimationError("NonpositiveVariance", what) {}
};

}  // namespace netsemi
