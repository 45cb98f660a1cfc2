#include "netsemi/model.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "netsemi/rng.hpp"

namespace netsemi {

const char* to_string(CoefficientTag tag) {
  switch (tag) {
    case CoefficientTag::TrueRaw: return "true_raw";
    case CoefficientTag::TrueTransformed: return "true_transformed";
    case CoefficientTag::EstimateRaw: return "estimate_raw";
    case CoefficientTag::EstimateTransformed: return "estimate_transformed";
  }
  return "?";
}

FixedEffectVector::FixedEffectVector(Eigen::VectorXd v, CoefficientTag t)
    : values(std::move(v)), tag(t) {
  if (values.size() < 4) {
    throw std::invalid_argument("FixedEffectVector: need at least 4 individuals");
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("FixedEffectVector: values must be finite");
  }
}

Network::Network(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("Network: need at least 2 nodes");
  links_.assign(pair_count(n), 0);
}

std::size_t Network::edge_count() const {
  std::size_t c = 0;
  for (const auto b : links_) c += b;
  return c;
}

bool Network::at(int i, int j) const {
  if (i == j) return false;
  return links_[pair_linear(i, j, n_)] != 0;
}

void Network::set(int i, int j, bool linked) {
  if (i == j) throw std::invalid_argument("Network::set: no self-links");
  links_[pair_linear(i, j, n_)] = linked ? 1 : 0;
}

Eigen::VectorXd degrees(const Network& g) {
  const int n = g.n();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for_each_pair(n, [&](int i, int j, std::size_t l) {
    if (g.link_at(l)) {
      d[i] += 1.0;
      d[j] += 1.0;
    }
  });
  return d / static_cast<double>(n - 1);
}

FixedEffectVector draw_fixed_effects(const DgpConfig& cfg) {
  if (cfg.n < 4) throw std::invalid_argument("draw_fixed_effects: n must be >= 4");
  Eigen::VectorXd values(cfg.n);
  CounterRng rng(cfg.seed, rng_stream::kFixedEffects);

  if (const auto* u = std::get_if<UniformInterval>(&cfg.design)) {
    if (!(u->lo < u->hi)) throw std::invalid_argument("UniformInterval: lo < hi required");
    for (int i = 0; i < cfg.n; ++i) values[i] = rng.uniform(u->lo, u->hi);
  } else if (const auto* c = std::get_if<ClusteredDesign>(&cfg.design)) {
    if (!(c->bulk_lo < c->bulk_hi)) {
      throw std::invalid_argument("ClusteredDesign: bulk_lo < bulk_hi required");
    }
    const int n_out = static_cast<int>(c->outliers.size());
    if (n_out > cfg.n) throw std::invalid_argument("ClusteredDesign: more outliers than nodes");
    const int n_bulk = cfg.n - n_out;
    for (int i = 0; i < n_bulk; ++i) values[i] = rng.uniform(c->bulk_lo, c->bulk_hi);
    for (int i = 0; i < n_out; ++i) values[n_bulk + i] = c->outliers[i];
  } else if (const auto* e = std::get_if<ExplicitValues>(&cfg.design)) {
    if (static_cast<int>(e->values.size()) != cfg.n) {
      throw std::invalid_argument("ExplicitValues: length must equal n");
    }
    for (int i = 0; i < cfg.n; ++i) values[i] = e->values[i];
  } else {
    throw std::logic_error("unknown eta design");
  }
  return FixedEffectVector(std::move(values), CoefficientTag::TrueRaw);
}

double link_probability(const FixedEffectVector& eta, const ErrorDistribution& err,
                        const PairIndex& pair) {
  return err.cdf(eta.values[pair.i] + eta.values[pair.j]);
}

Network simulate_network(const FixedEffectVector& eta, const ErrorDistribution& err,
                         std::uint64_t seed, SimulationDiagnostics* diag) {
  const int n = eta.n();
  Network g(n);
  CounterRng rng(seed, rng_stream::kNetwork);
  std::size_t extreme = 0;
  for_each_pair(n, [&](int i, int j, std::size_t l) {
    const double v = eta.values[i] + eta.values[j];
    const double u = err.sample(rng);
    g.set_linear(l, u <= v);
    const double p = err.cdf(v);
    if (p < 1e-6 || p > 1.0 - 1e-6) ++extreme;
  });
  if (diag) diag->extreme_probability_pairs = extreme;
  return g;
}

double oracle_expected_degree(const FixedEffectVector& eta, const ErrorDistribution& err,
                              int i) {
  const int n = eta.n();
  if (i < 0 || i >= n) throw std::out_of_range("oracle_expected_degree: node id");
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    s += err.cdf(eta.values[i] + eta.values[j]);
  }
  return s / static_cast<double>(n - 1);
}

void write_edge_list(const Network& g, std::ostream& os) {
  os << "# n=" << g.n() << "\n";
  for_each_pair(g.n(), [&](int i, int j, std::size_t l) {
    if (g.link_at(l)) os << i << " " << j << "\n";
  });
}

Network read_edge_list(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("edge list: empty input");
  int n = 0;
  if (std::sscanf(line.c_str(), "# n=%d", &n) != 1 || n < 2) {
    throw std::runtime_error("edge list: expected header '# n=<N>'");
  }
  Network g(n);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int i = -1, j = -1;
    if (!(ls >> i >> j)) throw std::runtime_error("edge list: bad line: " + line);
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw std::runtime_error("edge list: node ids out of range: " + line);
    }
    g.set(i, j, true);
  }
  return g;
}

void write_edge_list_file(const Network& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  write_edge_list(g, os);
}

Network read_edge_list_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  return read_edge_list(is);
}

}  // namespace netsemi
