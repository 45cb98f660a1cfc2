#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "netsemi/error_distribution.hpp"
#include "netsemi/pairs.hpp"

namespace netsemi {

enum class CoefficientTag { TrueRaw, TrueTransformed, EstimateRaw, EstimateTransformed };

const char* to_string(CoefficientTag tag);

/// The N individual popularity coefficients with a provenance tag.
/// Requires N >= 4 (identification needs at least four individuals) and
/// finite entries.
struct FixedEffectVector {
  Eigen::VectorXd values;
  CoefficientTag tag = CoefficientTag::TrueRaw;

  FixedEffectVector() = default;
  FixedEffectVector(Eigen::VectorXd v, CoefficientTag t);

  int n() const { return static_cast<int>(values.size()); }
};

/// Undirected binary network without self-links. Links are stored once per
/// unordered pair in linear PairIndex order, so symmetry, the zero diagonal
/// and 0/1 entries hold by construction.
class Network {
 public:
  explicit Network(int n);

  int n() const { return n_; }
  std::size_t pairs() const { return links_.size(); }
  std::size_t edge_count() const;

  bool at(int i, int j) const;
  void set(int i, int j, bool linked);

  std::uint8_t link_at(std::size_t linear) const { return links_[linear]; }
  void set_linear(std::size_t linear, bool linked) { links_[linear] = linked ? 1 : 0; }
  const std::vector<std::uint8_t>& links() const { return links_; }

 private:
  int n_;
  std::vector<std::uint8_t> links_;
};

/// d_i = (number of links of i) / (N-1), each entry in [0,1].
Eigen::VectorXd degrees(const Network& g);

// --- DGP -------------------------------------------------------------------

struct UniformInterval {
  double lo;
  double hi;
};

/// n - outliers.size() bulk draws from U[bulk_lo, bulk_hi]; the remaining
/// coefficients are set to the outlier values verbatim (in order, at the end).
struct ClusteredDesign {
  double bulk_lo;
  double bulk_hi;
  std::vector<double> outliers;
};

struct ExplicitValues {
  std::vector<double> values;
};

using EtaDesign = std::variant<UniformInterval, ClusteredDesign, ExplicitValues>;

struct DgpConfig {
  int n = 0;
  EtaDesign design = UniformInterval{-1.0, 3.0};
  ErrorDistribution error = ErrorDistribution::logistic();
  std::uint64_t seed = 0;
};

FixedEffectVector draw_fixed_effects(const DgpConfig& cfg);

/// F_u(eta_i + eta_j).
double link_probability(const FixedEffectVector& eta, const ErrorDistribution& err,
                        const PairIndex& pair);

struct SimulationDiagnostics {
  /// Pairs whose exact link probability is < 1e-6 or > 1-1e-6 (the
  /// probability-bounds assumption is violated in the DGP; warned, not fatal).
  std::size_t extreme_probability_pairs = 0;
};

/// g_ij = 1 iff u_ij <= eta_i + eta_j with u_ij ~ err, drawn independently
/// per pair in linear PairIndex order. Deterministic in seed.
Network simulate_network(const FixedEffectVector& eta, const ErrorDistribution& err,
                         std::uint64_t seed, SimulationDiagnostics* diag = nullptr);

/// (1/(N-1)) sum_{j != i} F_u(eta_i + eta_j): the exact finite-sample expected
/// degree, used as the brute-force oracle for the moment conditions.
double oracle_expected_degree(const FixedEffectVector& eta, const ErrorDistribution& err,
                              int i);

// --- Edge-list file format ---------------------------------------------------
// Header "# n=<N>", then one "i j" line per link, 0-based, i < j, linear pair
// order. Round-trips bit-exactly.

void write_edge_list(const Network& g, std::ostream& os);
Network read_edge_list(std::istream& is);
void write_edge_list_file(const Network& g, const std::string& path);
Network read_edge_list_file(const std::string& path);

}  // namespace netsemi
