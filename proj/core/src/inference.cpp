#include "netsemi/inference.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "netsemi/errors.hpp"

namespace netsemi {

Eigen::MatrixXd omega_hat(const FixedEffectVector& eta_t, const Network& g,
                          const KernelProbabilityField& field) {
  const int n = g.n();
  if (eta_t.n() != n) throw std::invalid_argument("omega_hat: size mismatch");

  // residual e_ik = g_ik - F̂(v_ik), stored per pair
  const std::size_t L = g.pairs();
  Eigen::VectorXd resid(L);
  for (std::size_t l = 0; l < L; ++l) {
    resid[l] = static_cast<double>(g.link_at(l)) - field.F[l];
  }

  Eigen::MatrixXd omega(n, n);
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;  // self-terms excluded
        s += resid[pair_linear(i, k, n)] * resid[pair_linear(j, k, n)];
      }
      omega(i, j) = scale * s;
      omega(j, i) = omega(i, j);
    }
  }
  return omega;
}

VarianceEstimate sandwich_variance(const Eigen::MatrixXd& M, const Eigen::MatrixXd& omega) {
  if (M.rows() != M.cols() || omega.rows() != omega.cols() || M.rows() != omega.rows()) {
    throw std::invalid_argument("sandwich_variance: square matrices of equal size required");
  }
  const Eigen::MatrixXd bread = M.transpose() * M;

  Eigen::VectorXd ev = bread.selfadjointView<Eigen::Lower>().eigenvalues();
  const double ev_max = ev.maxCoeff();
  const double ev_min = ev.minCoeff();
  double cond = std::numeric_limits<double>::infinity();
  if (ev_min > 0.0 && std::isfinite(ev_max)) cond = ev_max / ev_min;
  if (!(cond < 1e12)) {
    std::ostringstream os;
    os << "sandwich_variance: M'M condition estimate " << cond
       << " exceeds 1e12; the derivative matrix cannot be inverted reliably";
    throw SingularBread(os.str());
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(bread);
  if (ldlt.info() != Eigen::Success) {
    throw SingularBread("sandwich_variance: LDLT factorization of M'M failed");
  }
  const Eigen::MatrixXd meat = M.transpose() * omega * M;
  Eigen::MatrixXd V = ldlt.solve(ldlt.solve(meat).transpose());
  V = 0.5 * (V + V.transpose()).eval();

  VarianceEstimate out;
  out.V = std::move(V);
  out.omega = omega;
  out.condition_diagnostic = cond;
  return out;
}

VarianceEstimate asymptotic_variance(const FixedEffectVector& eta0_t,
                                     const ErrorDistribution& err_t, const Network& g) {
  const int n = g.n();
  if (eta0_t.n() != n) throw std::invalid_argument("asymptotic_variance: size mismatch");
  const double scale = 1.0 / static_cast<double>(n - 1);

  Eigen::MatrixXd M0 = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd omega0 = Eigen::MatrixXd::Zero(n, n);
  for_each_pair(n, [&](int i, int j, std::size_t) {
    const double v = eta0_t.values[i] + eta0_t.values[j];
    const double entry = -scale * err_t.pdf(v);
    M0(i, j) = entry;
    M0(j, i) = entry;
    M0(i, i) += entry;
    M0(j, j) += entry;

    const double F = err_t.cdf(v);
    const double var = F * (1.0 - F);
    omega0(i, j) = scale * var;
    omega0(j, i) = omega0(i, j);
    omega0(i, i) += scale * var;
    omega0(j, j) += scale * var;
  });
  return sandwich_variance(M0, omega0);
}

double phi_statistic(const FixedEffectVector& eta_hat_t, const FixedEffectVector& eta0_t,
                     const VarianceEstimate& V, int index) {
  const int n = eta_hat_t.n();
  if (eta0_t.n() != n || V.V.rows() != n) {
    throw std::invalid_argument("phi_statistic: size mismatch");
  }
  if (index < 0 || index >= n) throw std::out_of_range("phi_statistic: index");
  const double v_ii = V.V(index, index);
  if (!(v_ii > 0.0)) {
    throw NonpositiveVariance("phi_statistic: variance entry is not positive");
  }
  return std::sqrt(static_cast<double>(n - 1)) *
         (eta_hat_t.values[index] - eta0_t.values[index]) / std::sqrt(v_ii);
}

}  // namespace netsemi
