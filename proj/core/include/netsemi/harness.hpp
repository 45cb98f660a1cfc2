#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "netsemi/gmm.hpp"
#include "netsemi/inference.hpp"
#include "netsemi/logit.hpp"
#include "netsemi/model.hpp"
#include "netsemi/transform.hpp"

namespace netsemi {

enum class Method { Semiparametric, Logit };

const char* to_string(Method m);

/// One seeded Monte Carlo design: DGP, solver settings, which estimators and
/// transforms to compare, replication count. Replication r uses
/// seed = base_seed + r.
struct ExperimentPreset {
  std::string name;
  DgpConfig dgp;  // dgp.seed is ignored; the per-replication seed is used
  KernelSpec kernel;
  SolverConfig solver;
  std::vector<Method> methods{Method::Semiparametric};
  std::vector<TransformMode> transforms{TransformMode::Dbmm};
  double trim_bound = 4.0;
  int replications = 20;
  std::uint64_t base_seed = 1;
  bool compute_inference = false;  // phi / variance diagnostics (Dbmm + semi)
};

/// Builtin presets: phi_normality, little_variation, clustering, beta_convex,
/// beta_concave, exp_concave. paper_scale switches phi_normality to the
/// N=100, B=192 design.
ExperimentPreset preset_by_name(const std::string& name, bool paper_scale = false);
std::vector<std::string> preset_names();

/// Flat key=value config (# comments, blank lines ignored).
ExperimentPreset preset_from_config(const std::string& text);
ExperimentPreset preset_from_config_file(const std::string& path);
/// Canonical serialization; also the hash input for output metadata.
std::string preset_to_config(const ExperimentPreset& preset);

struct MethodOutcome {
  std::string key;  // e.g. "semi_dbmm", "logit_std"
  Method method = Method::Semiparametric;
  TransformMode transform = TransformMode::Dbmm;
  std::string error;  // error code; empty on success
  bool converged = false;
  int iterations = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double loglik = std::numeric_limits<double>::quiet_NaN();
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double kendall = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();
  int trimmed_count = 0;         // final trim mask size
  int inloop_trimmed_unique = 0; // individuals ever trimmed inside the solver
  std::int64_t clamp_count = 0;
  double phi = std::numeric_limits<double>::quiet_NaN();
  double d11 = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd estimates_transformed;
};

struct ReplicationRecord {
  int replication = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd truth_raw;
  std::map<std::string, Eigen::VectorXd> truth_transformed;  // by transform name
  std::vector<MethodOutcome> outcomes;
  double wall_seconds = 0.0;  // in-memory diagnostic; never serialized
};

/// Runs the preset's replications (parallel across replications only; each
/// replication is internally sequential, so results are independent of the
/// thread count). Per-replication failures are recorded, never thrown.
std::vector<ReplicationRecord> run_preset(const ExperimentPreset& preset, int threads = 0);

struct SlopeDiagnostic {
  double slope = 0.0;
  double intercept = 0.0;
  double kendall = 0.0;
};

/// OLS of estimates on truths plus Kendall rank correlation.
/// Throws DegenerateScale when the truths have zero variance.
SlopeDiagnostic slope_diagnostic(const Eigen::VectorXd& truths_t,
                                 const Eigen::VectorXd& estimates_t);

struct Histogram {
  double bin_width = 1.0;
  std::vector<double> left_edges;   // bins are [left, left + width)
  std::vector<std::size_t> counts;
  std::vector<double> heights;      // count / (total * width)
};

Histogram histogram(const std::vector<double>& values, double bin_width);

/// Kernel CDF estimate at arbitrary grid points given fitted coefficients
/// (all pairs enter the sums; there is no own pair off-sample), monotonized
/// by cumulative max. Grid must be nondecreasing.
std::vector<std::pair<double, double>> error_cdf_curve(const EstimationResult& result,
                                                       const Network& g,
                                                       const std::vector<double>& grid);

struct NewcomerPrediction {
  Eigen::VectorXd probability;      // per existing node
  std::vector<bool> extrapolated;   // index fell outside the observed v-range
};

/// Link probabilities of a hypothetical newcomer with transformed coefficient
/// eta_new_t against every existing node, through the monotonized CDF.
NewcomerPrediction predict_newcomer(const EstimationResult& result, const Network& g,
                                    double eta_new_t);

}  // namespace netsemi
