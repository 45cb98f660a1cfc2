#include "netsemi/gmm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <set>
#include <utility>

#include "netsemi/errors.hpp"
#include "netsemi/inference.hpp"
#include "netsemi/rng.hpp"

namespace netsemi {

Eigen::VectorXd moments(const KernelProbabilityField& field, const Network& g) {
  const int n = g.n();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  for_each_pair(n, [&](int i, int j, std::size_t l) {
    const double F = field.F[l];
    sum[i] += F;
    sum[j] += F;
  });
  return degrees(g) - sum / static_cast<double>(n - 1);
}

Eigen::VectorXd moments(const FixedEffectVector& eta, const Network& g,
                        const KernelSpec& spec) {
  return moments(compute_field(eta, g, spec), g);
}

double objective(const KernelProbabilityField& field, const Network& g) {
  return moments(field, g).squaredNorm();
}

double objective(const FixedEffectVector& eta, const Network& g, const KernelSpec& spec) {
  return objective(compute_field(eta, g, spec), g);
}

Eigen::MatrixXd moment_jacobian(const KernelProbabilityField& field, int n) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  const double scale = -1.0 / static_cast<double>(n - 1);
  for_each_pair(n, [&](int i, int j, std::size_t l) {
    const double entry = scale * field.f[l];
    M(i, j) = entry;
    M(j, i) = entry;
    M(i, i) += entry;
    M(j, j) += entry;
  });
  return M;
}

Eigen::MatrixXd moment_jacobian(const FixedEffectVector& eta, const Network& g,
                                const KernelSpec& spec) {
  return moment_jacobian(compute_field(eta, g, spec), g.n());
}

Eigen::VectorXd oracle_moments(const FixedEffectVector& eta, const Network& g,
                               const ErrorDistribution& err) {
  const int n = g.n();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  for_each_pair(n, [&](int i, int j, std::size_t) {
    const double F = err.cdf(eta.values[i] + eta.values[j]);
    sum[i] += F;
    sum[j] += F;
  });
  return degrees(g) - sum / static_cast<double>(n - 1);
}

Eigen::MatrixXd oracle_jacobian(const FixedEffectVector& eta, const ErrorDistribution& err) {
  const int n = eta.n();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  const double scale = -1.0 / static_cast<double>(n - 1);
  for_each_pair(n, [&](int i, int j, std::size_t) {
    const double entry = scale * err.pdf(eta.values[i] + eta.values[j]);
    M(i, j) = entry;
    M(j, i) = entry;
    M(i, i) += entry;
    M(j, j) += entry;
  });
  return M;
}

namespace {

struct SolveOutcome {
  Eigen::VectorXd eta;
  KernelProbabilityField field;
  SolverTrace trace;
  std::set<int> trimmed;  // individuals trimmed on accepted iterates
};

struct NormalizedIterate {
  Eigen::VectorXd values;
  std::vector<int> trimmed;
};

/// In-loop normalization: minimax for Dbmm, standardize + trim for
/// Standardize. DegenerateScale is left to propagate; a collapsing iterate is
/// the little-variation pathology of the standardization path and the caller
/// must see it.
NormalizedIterate normalize_iterate(const Eigen::VectorXd& x, TransformMode mode,
                                    double trim_bound) {
  FixedEffectVector fe(x, CoefficientTag::EstimateRaw);
  if (mode == TransformMode::Dbmm) {
    return {coefficient_minimax(fe).values, {}};
  }
  TrimResult t = trim(standardize(fe), trim_bound);
  return {std::move(t.values.values), std::move(t.trimmed)};
}

double condition_estimate(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || !std::isfinite(sv(0))) {
    return std::numeric_limits<double>::infinity();
  }
  return sv(0) / smin;
}

SolveOutcome solve_once(const Eigen::VectorXd& init, const Network& g,
                        const KernelSpec& spec, const SolverConfig& solver,
                        TransformMode mode, double trim_bound, int restart_index) {
  const int n = g.n();
  constexpr double kLambdaFloor = 1e-12;

  SolveOutcome out;
  out.trace.restart_index = restart_index;

  NormalizedIterate start = normalize_iterate(init, mode, trim_bound);
  out.trimmed.insert(start.trimmed.begin(), start.trimmed.end());
  Eigen::VectorXd eta = std::move(start.values);

  KernelProbabilityField field =
      compute_field(FixedEffectVector(eta, CoefficientTag::EstimateRaw), g, spec);
  Eigen::VectorXd m = moments(field, g);
  double q = m.squaredNorm();
  out.trace.objective_path.push_back(q);

  double lambda = solver.levenberg_lambda0;
  Eigen::MatrixXd jac, normal;
  Eigen::VectorXd rhs;
  bool have_jacobian = false;
  bool converged = false;
  int it = 0;

  while (it < solver.max_iters) {
    ++it;
    if (!have_jacobian) {
      jac = moment_jacobian(field, n);
      normal = jac.transpose() * jac;
      rhs = -(jac.transpose() * m);
      have_jacobian = true;
    }

    Eigen::MatrixXd damped = normal;
    damped.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
    Eigen::VectorXd delta = ldlt.solve(rhs);
    const bool solvable = ldlt.info() == Eigen::Success && delta.allFinite();

    if (solvable && lambda <= solver.levenberg_lambda0 &&
        delta.lpNorm<Eigen::Infinity>() < solver.tol_step) {
      converged = true;  // stationary point: the undamped proposal is negligible
      break;
    }

    bool accepted = false;
    if (solvable) {
      Eigen::VectorXd cand_raw = eta + delta;
      if (cand_raw.allFinite()) {
        try {
          NormalizedIterate cand = normalize_iterate(cand_raw, mode, trim_bound);
          KernelProbabilityField field_c = compute_field(
              FixedEffectVector(cand.values, CoefficientTag::EstimateRaw), g, spec);
          Eigen::VectorXd m_c = moments(field_c, g);
          const double q_c = m_c.squaredNorm();
          if (q_c < q) {
            const double step_norm = (cand.values - eta).lpNorm<Eigen::Infinity>();
            const double improvement = q - q_c;
            eta = std::move(cand.values);
            out.trimmed.insert(cand.trimmed.begin(), cand.trimmed.end());
            field = std::move(field_c);
            m = std::move(m_c);
            q = q_c;
            lambda = std::max(lambda / solver.lambda_growth, kLambdaFloor);
            have_jacobian = false;
            out.trace.objective_path.push_back(q);
            accepted = true;
            if (step_norm < solver.tol_step || improvement < solver.tol_obj) {
              converged = true;
              break;
            }
          }
        } catch (const DegenerateDensity&) {
          ++out.trace.degenerate_density_rejections;
        } catch (const DegenerateAnchors&) {
          // collapsed minimax anchors on a trial iterate: rejected step
        }
      }
    }

    if (!accepted) {
      lambda *= solver.lambda_growth;
      if (lambda > solver.lambda_ceiling) {
        const double cond = condition_estimate(normal);
        if (!(cond < 1e12)) {
          throw SingularNormalEquations(
              "M'M numerically singular at the damping ceiling; the data carry "
              "insufficient degree variation to separate the coefficients");
        }
        break;  // stalled, returned as not converged
      }
    }
  }

  out.trace.iterations = it;
  out.trace.converged = converged;
  out.trace.final_objective = q;
  out.trace.lambda_final = lambda;
  out.eta = std::move(eta);
  out.field = std::move(field);
  return out;
}

}  // namespace

EstimationResult fit(const Network& g, const KernelSpec& spec, const SolverConfig& solver,
                     const TransformSpec& transform) {
  const int n = g.n();
  if (n < 4) throw std::invalid_argument("fit: need at least 4 individuals");
  const Eigen::VectorXd d = degrees(g);
  const double d_min = d.minCoeff();
  const double d_max = d.maxCoeff();
  if (d_max <= 0.0 || d_min >= 1.0) {
    throw std::invalid_argument("fit: degenerate network (empty or complete)");
  }
  const double d_range = d_max - d_min;
  if (d_range < 1e-12) {
    throw SingularNormalEquations(
        "fit: degrees carry no variation; the normal equations are singular");
  }

  // Degree-rank starter: the observed popularity order is the best guess for
  // the coefficient order.
  const Eigen::VectorXd eta0 = (d.array() - d_min) / d_range;

  std::optional<SolveOutcome> best;
  std::exception_ptr last_error;
  const int restarts = std::max(1, solver.n_restarts);
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd init = eta0;
    if (r > 0) {
      CounterRng rng(solver.seed, rng_stream::kSolverRestartBase + static_cast<std::uint64_t>(r));
      for (int i = 0; i < n; ++i) init[i] += rng.uniform(-0.1, 0.1);
    }
    try {
      SolveOutcome out =
          solve_once(init, g, spec, solver, transform.mode, transform.trim_bound, r);
      if (!best || out.trace.final_objective < best->trace.final_objective) {
        best = std::move(out);
      }
      if (best->trace.converged) break;  // perturbed restarts only rescue failures
    } catch (const EstimationError&) {
      last_error = std::current_exception();
    }
  }
  if (!best) std::rethrow_exception(last_error);

  EstimationResult res;
  res.method = "semiparametric";
  res.n = n;
  res.seed = solver.seed;
  res.raw_coefficients = best->eta;
  res.trace = best->trace;
  res.transform = transform;
  res.transform.anchor_low = argmin_degree(d);
  res.transform.anchor_high = argmax_degree(d);
  res.inloop_trimmed_unique = static_cast<int>(best->trimmed.size());

  const FixedEffectVector raw_fe(best->eta, CoefficientTag::EstimateRaw);
  if (transform.mode == TransformMode::Dbmm) {
    res.coefficients = dbmm(raw_fe, d);
  } else {
    FixedEffectVector standardized = standardize(raw_fe);
    res.sign_flipped = kendall_tau(standardized.values, d) < 0.0;
    TrimResult trimmed = trim(sign_fix(standardized, d), transform.trim_bound);
    res.coefficients = std::move(trimmed.values);
    res.trimmed = std::move(trimmed.trimmed);
  }

  // Field and sandwich variance at the transformed coefficients (where the
  // asymptotics apply). A degenerate field on the transformed scale is
  // recorded, not fatal.
  try {
    res.field = compute_field(res.coefficients, g, spec);
    try {
      const Eigen::MatrixXd jac = moment_jacobian(res.field, n);
      const Eigen::MatrixXd om = omega_hat(res.coefficients, g, res.field);
      VarianceEstimate ve = sandwich_variance(jac, om);
      res.variance = std::move(ve.V);
      res.variance_condition = ve.condition_diagnostic;
    } catch (const EstimationError& e) {
      res.variance_error = e.code();
    }
  } catch (const EstimationError& e) {
    res.variance_error = e.code();
    res.field = best->field;  // solver-scale fallback
  }
  res.bandwidth = res.field.bandwidth;
  return res;
}

}  // namespace netsemi
