#include "netsemi/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "netsemi/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace netsemi {

const char* to_string(Method m) {
  return m == Method::Semiparametric ? "semi" : "logit";
}

namespace {

std::string combo_key(Method m, TransformMode t) {
  return std::string(to_string(m)) + "_" + to_string(t);
}

/// Truths are transformed with anchors/statistics from themselves (degree
/// anchor indices are shared with the estimates; anchor values are the
/// truth's own). No sign fix: the true order is correct by construction.
Eigen::VectorXd transform_truth(const FixedEffectVector& truths, const Eigen::VectorXd& d,
                                TransformMode t) {
  if (t == TransformMode::Dbmm) return dbmm(truths, d).values;
  return standardize(truths).values;
}

double mean_squared_error(const Eigen::VectorXd& estimates, const Eigen::VectorXd& truths) {
  return (estimates - truths).squaredNorm() / static_cast<double>(truths.size());
}

void fill_comparison(MethodOutcome& o, const Eigen::VectorXd& estimates,
                     const std::map<std::string, Eigen::VectorXd>& truth_transformed,
                     TransformMode t) {
  const auto it = truth_transformed.find(to_string(t));
  if (it == truth_transformed.end()) return;
  const SlopeDiagnostic sd = slope_diagnostic(it->second, estimates);
  o.slope = sd.slope;
  o.intercept = sd.intercept;
  o.kendall = sd.kendall;
  o.mse = mean_squared_error(estimates, it->second);
}

void run_semi(ReplicationRecord& rec, const ExperimentPreset& preset, const Network& net,
              const Eigen::VectorXd& d, const FixedEffectVector& truths,
              TransformMode t) {
  MethodOutcome o;
  o.key = combo_key(Method::Semiparametric, t);
  o.method = Method::Semiparametric;
  o.transform = t;
  try {
    SolverConfig solver = preset.solver;
    solver.seed = rec.seed;
    TransformSpec ts;
    ts.mode = t;
    ts.trim_bound = preset.trim_bound;
    EstimationResult res = fit(net, preset.kernel, solver, ts);
    o.converged = res.trace.converged;
    o.iterations = res.trace.iterations;
    o.objective = res.trace.final_objective;
    o.trimmed_count = static_cast<int>(res.trimmed.size());
    o.inloop_trimmed_unique = res.inloop_trimmed_unique;
    o.clamp_count = res.field.clamp_count;
    o.estimates_transformed = res.coefficients.values;
    fill_comparison(o, res.coefficients.values, rec.truth_transformed, t);
    if (!res.trace.converged) o.error = "NotConverged";

    if (preset.compute_inference && t == TransformMode::Dbmm) {
      try {
        if (res.variance.size() == 0) {
          throw SingularBread(res.variance_error.empty() ? "variance unavailable"
                                                         : res.variance_error);
        }
        VarianceEstimate v_hat;
        v_hat.V = res.variance;
        v_hat.condition_diagnostic = res.variance_condition;
        const auto truth_it = rec.truth_transformed.find(to_string(TransformMode::Dbmm));
        if (truth_it == rec.truth_transformed.end()) throw DegenerateAnchors("no truth");
        const FixedEffectVector truth_t(truth_it->second, CoefficientTag::TrueTransformed);
        o.phi = phi_statistic(res.coefficients, truth_t, v_hat, 0);

        const int lo = argmin_degree(d);
        const int hi = argmax_degree(d);
        const double denom = truths.values[hi] - truths.values[lo];
        if (denom > 0.0) {
          const double a = 1.0 / denom;
          const double b = -truths.values[lo] * a;
          const ErrorDistribution err_t = preset.dgp.error.affine(a, b);
          const VarianceEstimate v0 = asymptotic_variance(truth_t, err_t, net);
          o.d11 = v0.V(0, 0) - res.variance(0, 0);
        }
      } catch (const EstimationError&) {
        // phi/d11 stay NaN; the fit itself is still reported
      }
    }
  } catch (const EstimationError& e) {
    o.error = e.code();
  }
  rec.outcomes.push_back(std::move(o));
}

void run_logit(ReplicationRecord& rec, const ExperimentPreset& preset, const Network& net,
               const Eigen::VectorXd& d, double trim_bound) {
  std::string fit_error;
  LogitFit lf;
  try {
    lf = logit_fit(net);
    if (!lf.converged) fit_error = "NotConverged";
  } catch (const EstimationError& e) {
    fit_error = e.code();
  }

  for (const TransformMode t : preset.transforms) {
    MethodOutcome o;
    o.key = combo_key(Method::Logit, t);
    o.method = Method::Logit;
    o.transform = t;
    o.error = fit_error;
    if (fit_error.empty() || fit_error == "NotConverged") {
      o.converged = lf.converged;
      o.iterations = lf.iterations;
      o.loglik = lf.loglik;
      try {
        FixedEffectVector est;
        if (t == TransformMode::Dbmm) {
          est = dbmm(lf.eta, d);
        } else {
          TrimResult tr = trim(sign_fix(standardize(lf.eta), d), trim_bound);
          est = std::move(tr.values);
          o.trimmed_count = static_cast<int>(tr.trimmed.size());
        }
        o.estimates_transformed = est.values;
        fill_comparison(o, est.values, rec.truth_transformed, t);
      } catch (const EstimationError& e) {
        o.error = e.code();
      }
    }
    rec.outcomes.push_back(std::move(o));
  }
}

ReplicationRecord run_replication(const ExperimentPreset& preset, int r) {
  const auto t0 = std::chrono::steady_clock::now();
  ReplicationRecord rec;
  rec.replication = r;
  rec.seed = preset.base_seed + static_cast<std::uint64_t>(r);

  DgpConfig cfg = preset.dgp;
  cfg.seed = rec.seed;
  const FixedEffectVector truths = draw_fixed_effects(cfg);
  const Network net = simulate_network(truths, cfg.error, rec.seed);
  const Eigen::VectorXd d = degrees(net);
  rec.truth_raw = truths.values;

  for (const TransformMode t : preset.transforms) {
    try {
      rec.truth_transformed[to_string(t)] = transform_truth(truths, d, t);
    } catch (const EstimationError&) {
      // leave missing; outcomes fall back to NaN diagnostics
    }
  }

  for (const Method m : preset.methods) {
    if (m == Method::Semiparametric) {
      for (const TransformMode t : preset.transforms) run_semi(rec, preset, net, d, truths, t);
    } else {
      run_logit(rec, preset, net, d, preset.trim_bound);
    }
  }

  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

std::vector<ReplicationRecord> run_preset(const ExperimentPreset& preset, int threads) {
  if (preset.replications < 1) throw std::invalid_argument("run_preset: replications >= 1");
  if (preset.dgp.n < 4) throw std::invalid_argument("run_preset: n >= 4");
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(preset.replications));

#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#else
  (void)threads;
#endif
  for (int r = 0; r < preset.replications; ++r) {
    records[static_cast<std::size_t>(r)] = run_replication(preset, r);
  }
  return records;
}

SlopeDiagnostic slope_diagnostic(const Eigen::VectorXd& truths_t,
                                 const Eigen::VectorXd& estimates_t) {
  if (truths_t.size() != estimates_t.size() || truths_t.size() < 4) {
    throw std::invalid_argument("slope_diagnostic: equal lengths >= 4 required");
  }
  const double t_mean = truths_t.mean();
  const double e_mean = estimates_t.mean();
  const double var_t = (truths_t.array() - t_mean).square().sum();
  if (var_t <= 1e-24) {
    throw DegenerateScale("slope_diagnostic: truths have zero variance");
  }
  const double cov =
      ((truths_t.array() - t_mean) * (estimates_t.array() - e_mean)).sum();
  SlopeDiagnostic out;
  out.slope = cov / var_t;
  out.intercept = e_mean - out.slope * t_mean;
  out.kendall = kendall_tau(truths_t, estimates_t);
  return out;
}

Histogram histogram(const std::vector<double>& values, double bin_width) {
  if (!(bin_width > 0)) throw std::invalid_argument("histogram: bin_width > 0 required");
  Histogram out;
  out.bin_width = bin_width;
  if (values.empty()) return out;

  long idx_min = std::numeric_limits<long>::max();
  long idx_max = std::numeric_limits<long>::min();
  std::vector<long> idx(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    idx[k] = static_cast<long>(std::floor(values[k] / bin_width));
    idx_min = std::min(idx_min, idx[k]);
    idx_max = std::max(idx_max, idx[k]);
  }
  const std::size_t bins = static_cast<std::size_t>(idx_max - idx_min + 1);
  out.left_edges.resize(bins);
  out.counts.assign(bins, 0);
  out.heights.assign(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    out.left_edges[b] = static_cast<double>(idx_min + static_cast<long>(b)) * bin_width;
  }
  for (const long i : idx) ++out.counts[static_cast<std::size_t>(i - idx_min)];
  const double total = static_cast<double>(values.size());
  for (std::size_t b = 0; b < bins; ++b) {
    out.heights[b] = static_cast<double>(out.counts[b]) / (total * bin_width);
  }
  return out;
}

namespace {

/// Raw kernel CDF estimate at an off-sample point: every observed pair enters
/// the sums (leave-one-out has no own pair here). Normalization cancels in
/// the ratio.
double raw_cdf_at(double x, const KernelProbabilityField& field, const Network& g) {
  const std::size_t L = g.pairs();
  const double inv_h = 1.0 / field.bandwidth;
  double s = 0.0, s1 = 0.0;
  for (std::size_t m = 0; m < L; ++m) {
    const double k = kernel_eval((x - field.v[m]) * inv_h);
    s += k;
    if (g.link_at(m)) s1 += k;
  }
  if (!(s > kDensityEpsilon)) return kClampEpsilon;  // no observed mass near x
  return std::clamp(s1 / s, kClampEpsilon, 1.0 - kClampEpsilon);
}

}  // namespace

std::vector<std::pair<double, double>> error_cdf_curve(const EstimationResult& result,
                                                       const Network& g,
                                                       const std::vector<double>& grid) {
  if (result.field.v.size() != static_cast<Eigen::Index>(g.pairs())) {
    throw std::invalid_argument("error_cdf_curve: result field does not match network");
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  double running = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0 && grid[k] < grid[k - 1]) {
      throw std::invalid_argument("error_cdf_curve: grid must be nondecreasing");
    }
    running = std::max(running, raw_cdf_at(grid[k], result.field, g));
    out.emplace_back(grid[k], running);
  }
  return out;
}

NewcomerPrediction predict_newcomer(const EstimationResult& result, const Network& g,
                                    double eta_new_t) {
  const Eigen::VectorXd& coef = result.field.eta;  // scale the field was built at
  const int n = static_cast<int>(coef.size());
  const double v_min = result.field.v.minCoeff();
  const double v_max = result.field.v.maxCoeff();
  const double pad = 3.0 * result.field.bandwidth;

  double t_min = v_min - pad, t_max = v_max + pad;
  for (int i = 0; i < n; ++i) {
    t_min = std::min(t_min, eta_new_t + coef[i]);
    t_max = std::max(t_max, eta_new_t + coef[i]);
  }

  // fixed dense grid; targets read off by linear interpolation so the
  // monotonized curve stays monotone in the newcomer coefficient
  constexpr int kGridPoints = 1025;
  std::vector<double> grid(kGridPoints);
  const double step = (t_max - t_min) / (kGridPoints - 1);
  for (int k = 0; k < kGridPoints; ++k) grid[k] = t_min + step * k;
  const auto curve = error_cdf_curve(result, g, grid);

  NewcomerPrediction out;
  out.probability.resize(n);
  out.extrapolated.assign(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    const double t = eta_new_t + coef[i];
    out.extrapolated[static_cast<std::size_t>(i)] = (t < v_min || t > v_max);
    double pos = (t - t_min) / step;
    pos = std::clamp(pos, 0.0, static_cast<double>(kGridPoints - 1));
    const int k0 = std::min(static_cast<int>(pos), kGridPoints - 2);
    const double w = pos - k0;
    out.probability[i] = (1.0 - w) * curve[k0].second + w * curve[k0 + 1].second;
  }
  return out;
}

// --- presets and configs -----------------------------------------------------

std::vector<std::string> preset_names() {
  return {"phi_normality", "little_variation", "clustering",
          "beta_convex",   "beta_concave",     "exp_concave"};
}

ExperimentPreset preset_by_name(const std::string& name, bool paper_scale) {
  ExperimentPreset p;
  p.name = name;
  p.dgp.n = 100;
  p.solver.max_iters = 5000;
  if (name == "phi_normality") {
    p.dgp.n = paper_scale ? 100 : 50;
    p.dgp.design = UniformInterval{-1.0, 3.0};
    p.dgp.error = ErrorDistribution::logistic();
    p.solver.max_iters = 500;
    p.replications = paper_scale ? 192 : 96;
    p.base_seed = 6200;
    p.compute_inference = true;
  } else if (name == "little_variation") {
    p.dgp.design = UniformInterval{-0.5, 0.5};
    p.dgp.error = ErrorDistribution::logistic();
    p.transforms = {TransformMode::Dbmm, TransformMode::Standardize};
    p.replications = 20;
    p.base_seed = 7200;
  } else if (name == "clustering") {
    p.dgp.design =
        ClusteredDesign{-1.0, 1.0, {2.5, 2.4, 2.3, 2.7, 2.6, 3.0, 3.5, 2.4, 3.1, 2.8}};
    p.dgp.error = ErrorDistribution::logistic();
    p.transforms = {TransformMode::Dbmm, TransformMode::Standardize};
    p.replications = 20;
    p.base_seed = 7300;
  } else if (name == "beta_convex") {
    p.dgp.design = UniformInterval{0.25, 0.45};
    p.dgp.error = ErrorDistribution::beta(5.0, 1.0);
    p.methods = {Method::Semiparametric, Method::Logit};
    p.replications = 20;
    p.base_seed = 8100;
  } else if (name == "beta_concave") {
    p.dgp.design = UniformInterval{0.05, 0.45};
    p.dgp.error = ErrorDistribution::beta(2.0, 5.0);
    p.methods = {Method::Semiparametric, Method::Logit};
    p.replications = 20;
    p.base_seed = 8200;
  } else if (name == "exp_concave") {
    p.dgp.design = UniformInterval{0.1, 1.0};
    p.dgp.error = ErrorDistribution::exponential(1.5);
    p.methods = {Method::Semiparametric, Method::Logit};
    p.replications = 20;
    p.base_seed = 8300;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return p;
}

namespace {

std::string trim_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_ws(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(std::stod(item));
  return out;
}

std::string format_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ExperimentPreset preset_from_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim_ws(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config: expected key = value: " + line);
    kv[trim_ws(line.substr(0, eq))] = trim_ws(line.substr(eq + 1));
  }

  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const std::string& {
    const auto* v = get(key);
    if (!v) throw std::runtime_error("config: missing key: " + key);
    return *v;
  };

  ExperimentPreset p;
  p.name = require("name");
  p.dgp.n = std::stoi(require("n"));
  p.replications = std::stoi(require("replications"));
  p.base_seed = std::stoull(require("base_seed"));

  const std::string design = require("design");
  if (design == "uniform") {
    p.dgp.design = UniformInterval{std::stod(require("lo")), std::stod(require("hi"))};
  } else if (design == "clustered") {
    p.dgp.design = ClusteredDesign{std::stod(require("bulk_lo")), std::stod(require("bulk_hi")),
                                   parse_doubles(require("outliers"))};
  } else if (design == "explicit") {
    p.dgp.design = ExplicitValues{parse_doubles(require("values"))};
  } else {
    throw std::runtime_error("config: unknown design: " + design);
  }

  const std::string err = require("error");
  if (err == "logistic") {
    const auto* loc = get("error_loc");
    const auto* scale = get("error_scale");
    p.dgp.error = ErrorDistribution::logistic(loc ? std::stod(*loc) : 0.0,
                                              scale ? std::stod(*scale) : 1.0);
  } else if (err == "beta") {
    p.dgp.error =
        ErrorDistribution::beta(std::stod(require("error_alpha")), std::stod(require("error_beta")));
  } else if (err == "exponential") {
    p.dgp.error = ErrorDistribution::exponential(std::stod(require("error_rate")));
  } else {
    throw std::runtime_error("config: unknown error family: " + err);
  }

  p.methods.clear();
  for (const auto& m : split_list(require("methods"))) {
    if (m == "semi") p.methods.push_back(Method::Semiparametric);
    else if (m == "logit") p.methods.push_back(Method::Logit);
    else throw std::runtime_error("config: unknown method: " + m);
  }
  p.transforms.clear();
  for (const auto& t : split_list(require("transforms"))) {
    if (t == "dbmm") p.transforms.push_back(TransformMode::Dbmm);
    else if (t == "std") p.transforms.push_back(TransformMode::Standardize);
    else throw std::runtime_error("config: unknown transform: " + t);
  }

  if (const auto* v = get("max_iters")) p.solver.max_iters = std::stoi(*v);
  if (const auto* v = get("tol_step")) p.solver.tol_step = std::stod(*v);
  if (const auto* v = get("tol_obj")) p.solver.tol_obj = std::stod(*v);
  if (const auto* v = get("n_restarts")) p.solver.n_restarts = std::stoi(*v);
  if (const auto* v = get("bandwidth")) p.kernel.bandwidth_override = std::stod(*v);
  if (const auto* v = get("trim_bound")) p.trim_bound = std::stod(*v);
  if (const auto* v = get("compute_inference")) p.compute_inference = (*v == "true" || *v == "1");
  return p;
}

ExperimentPreset preset_from_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return preset_from_config(buf.str());
}

std::string preset_to_config(const ExperimentPreset& p) {
  std::ostringstream os;
  os << "name = " << p.name << "\n";
  os << "n = " << p.dgp.n << "\n";
  os << "replications = " << p.replications << "\n";
  os << "base_seed = " << p.base_seed << "\n";
  if (const auto* u = std::get_if<UniformInterval>(&p.dgp.design)) {
    os << "design = uniform\n";
    os << "lo = " << format_num(u->lo) << "\n";
    os << "hi = " << format_num(u->hi) << "\n";
  } else if (const auto* c = std::get_if<ClusteredDesign>(&p.dgp.design)) {
    os << "design = clustered\n";
    os << "bulk_lo = " << format_num(c->bulk_lo) << "\n";
    os << "bulk_hi = " << format_num(c->bulk_hi) << "\n";
    os << "outliers = ";
    for (std::size_t k = 0; k < c->outliers.size(); ++k) {
      if (k) os << ",";
      os << format_num(c->outliers[k]);
    }
    os << "\n";
  } else if (const auto* e = std::get_if<ExplicitValues>(&p.dgp.design)) {
    os << "design = explicit\n";
    os << "values = ";
    for (std::size_t k = 0; k < e->values.size(); ++k) {
      if (k) os << ",";
      os << format_num(e->values[k]);
    }
    os << "\n";
  }
  switch (p.dgp.error.family()) {
    case ErrorDistribution::Family::Logistic:
      os << "error = logistic\n";
      os << "error_loc = " << format_num(p.dgp.error.param1()) << "\n";
      os << "error_scale = " << format_num(p.dgp.error.param2()) << "\n";
      break;
    case ErrorDistribution::Family::Beta:
      os << "error = beta\n";
      os << "error_alpha = " << format_num(p.dgp.error.param1()) << "\n";
      os << "error_beta = " << format_num(p.dgp.error.param2()) << "\n";
      break;
    case ErrorDistribution::Family::Exponential:
      os << "error = exponential\n";
      os << "error_rate = " << format_num(p.dgp.error.param1()) << "\n";
      break;
  }
  os << "methods = ";
  for (std::size_t k = 0; k < p.methods.size(); ++k) {
    if (k) os << ",";
    os << to_string(p.methods[k]);
  }
  os << "\n";
  os << "transforms = ";
  for (std::size_t k = 0; k < p.transforms.size(); ++k) {
    if (k) os << ",";
    os << to_string(p.transforms[k]);
  }
  os << "\n";
  os << "max_iters = " << p.solver.max_iters << "\n";
  os << "tol_step = " << format_num(p.solver.tol_step) << "\n";
  os << "tol_obj = " << format_num(p.solver.tol_obj) << "\n";
  os << "n_restarts = " << p.solver.n_restarts << "\n";
  if (p.kernel.bandwidth_override) {
    os << "bandwidth = " << format_num(*p.kernel.bandwidth_override) << "\n";
  }
  os << "trim_bound = " << format_num(p.trim_bound) << "\n";
  os << "compute_inference = " << (p.compute_inference ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace netsemi
