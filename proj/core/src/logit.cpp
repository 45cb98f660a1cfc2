#include "netsemi/logit.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "netsemi/errors.hpp"

namespace netsemi {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// sum_{i<j} [g_ij v_ij - log(1 + exp(v_ij))], numerically stable split
double loglik_at(const Eigen::VectorXd& eta, const Network& g) {
  double ll = 0.0;
  for_each_pair(g.n(), [&](int i, int j, std::size_t l) {
    const double v = eta[i] + eta[j];
    const double softplus = v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
    if (g.link_at(l)) ll += v;
    ll -= softplus;
  });
  return ll;
}

}  // namespace

LogitFit logit_fit(const Network& g, double tol, int max_iters) {
  const int n = g.n();
  if (n < 4) throw std::invalid_argument("logit_fit: need at least 4 individuals");
  const Eigen::VectorXd d = degrees(g);
  for (int i = 0; i < n; ++i) {
    if (d[i] <= 0.0 || d[i] >= 1.0) {
      std::ostringstream os;
      os << "logit_fit: MLE does not exist, node " << i << " has degree " << d[i]
         << " (isolated or universal)";
      throw MleNonexistent(os.str());
    }
  }

  // start each coefficient at the value matching its own degree in isolation
  Eigen::VectorXd eta(n);
  for (int i = 0; i < n; ++i) eta[i] = 0.5 * std::log(d[i] / (1.0 - d[i]));
  double ll = loglik_at(eta, g);

  LogitFit out;
  const double grad_tol = tol * static_cast<double>(n - 1);
  bool converged = false;
  int it = 0;
  for (; it < max_iters; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    // -H = sum_{i<j} w_ij (e_i + e_j)(e_i + e_j)', w_ij = sigma'(v_ij); PD on
    // the beta-model domain, so plain LDLT suffices.
    Eigen::MatrixXd neg_hess = Eigen::MatrixXd::Zero(n, n);
    for_each_pair(n, [&](int i, int j, std::size_t l) {
      const double p = sigmoid(eta[i] + eta[j]);
      const double resid = static_cast<double>(g.link_at(l)) - p;
      grad[i] += resid;
      grad[j] += resid;
      const double w = p * (1.0 - p);
      neg_hess(i, j) += w;
      neg_hess(j, i) += w;
      neg_hess(i, i) += w;
      neg_hess(j, j) += w;
    });

    if (grad.lpNorm<Eigen::Infinity>() < grad_tol) {
      converged = true;
      break;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_hess);
    Eigen::VectorXd delta = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
      break;
    }

    // step halving on the (strictly concave) log likelihood
    double t = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      const Eigen::VectorXd cand = eta + t * delta;
      const double ll_cand = loglik_at(cand, g);
      if (ll_cand > ll) {
        eta = cand;
        ll = ll_cand;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }

  out.eta = FixedEffectVector(eta, CoefficientTag::EstimateRaw);
  out.loglik = ll;
  out.converged = converged;
  out.iterations = it;
  return out;
}

}  // namespace netsemi
