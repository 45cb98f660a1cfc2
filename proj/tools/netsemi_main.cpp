// netsemi command line: simulate dyadic networks, run the semiparametric or
// logit estimators, replicate the Monte Carlo experiments, and post-process
// results. See README.md for examples.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netsemi/errors.hpp"
#include "netsemi/gmm.hpp"
#include "netsemi/harness.hpp"
#include "netsemi/logit.hpp"
#include "netsemi/model.hpp"
#include "netsemi/serialize.hpp"

namespace {

using namespace netsemi;

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os << content;
}

Eigen::VectorXd read_values_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();
  // result JSON or a CSV/plain column of numbers
  if (!text.empty() && text.find_first_not_of(" \t\r\n") != std::string::npos &&
      text[text.find_first_not_of(" \t\r\n")] == '{') {
    return coefficients_from_result_json(text);
  }
  std::vector<double> values;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    // take the last comma-separated field; skips "node," style prefixes
    const auto comma = line.find_last_of(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      continue;  // header line
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out[static_cast<Eigen::Index>(i)] = values[i];
  return out;
}

int cmd_simulate(int n, const std::string& design, double lo, double hi,
                 const std::string& outliers, const std::string& values,
                 const std::string& error, double loc, double scale, double alpha,
                 double beta, double rate, std::uint64_t seed, const std::string& out_edges,
                 const std::string& out_truths) {
  DgpConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  if (design == "uniform") {
    cfg.design = UniformInterval{lo, hi};
  } else if (design == "clustered") {
    cfg.design = ClusteredDesign{lo, hi, parse_double_list(outliers)};
  } else if (design == "explicit") {
    cfg.design = ExplicitValues{parse_double_list(values)};
  } else {
    throw std::runtime_error("unknown design: " + design);
  }
  if (error == "logistic") {
    cfg.error = ErrorDistribution::logistic(loc, scale);
  } else if (error == "beta") {
    cfg.error = ErrorDistribution::beta(alpha, beta);
  } else if (error == "exponential") {
    cfg.error = ErrorDistribution::exponential(rate);
  } else {
    throw std::runtime_error("unknown error family: " + error);
  }

  const FixedEffectVector truths = draw_fixed_effects(cfg);
  SimulationDiagnostics diag;
  const Network g = simulate_network(truths, cfg.error, seed, &diag);
  if (diag.extreme_probability_pairs > 0) {
    std::cerr << "warning: " << diag.extreme_probability_pairs
              << " pair(s) with link probability outside [1e-6, 1-1e-6]\n";
  }
  write_edge_list_file(g, out_edges);
  std::ostringstream truths_csv;
  write_truths_csv(truths_csv, truths.values, seed);
  write_file(out_truths, truths_csv.str());
  std::cout << "wrote " << out_edges << " (" << g.edge_count() << " edges) and "
            << out_truths << "\n";
  return 0;
}

int cmd_estimate(const std::string& edges_path, const std::string& method,
                 const std::string& transform, std::optional<double> bandwidth,
                 int max_iters, std::uint64_t seed, double trim_bound,
                 const std::string& out_path) {
  const Network g = read_edge_list_file(edges_path);
  TransformSpec ts;
  ts.mode = transform == "std" ? TransformMode::Standardize : TransformMode::Dbmm;
  ts.trim_bound = trim_bound;

  EstimationResult res;
  if (method == "semi") {
    KernelSpec spec;
    spec.bandwidth_override = bandwidth;
    SolverConfig solver;
    solver.max_iters = max_iters;
    solver.seed = seed;
    res = fit(g, spec, solver, ts);
  } else if (method == "logit") {
    const LogitFit lf = logit_fit(g);
    const Eigen::VectorXd d = degrees(g);
    res.method = "logit";
    res.n = g.n();
    res.seed = seed;
    res.loglik = lf.loglik;
    res.trace.converged = lf.converged;
    res.trace.iterations = lf.iterations;
    res.raw_coefficients = lf.eta.values;
    res.transform = ts;
    res.transform.anchor_low = argmin_degree(d);
    res.transform.anchor_high = argmax_degree(d);
    if (ts.mode == TransformMode::Dbmm) {
      res.coefficients = dbmm(lf.eta, d);
    } else {
      FixedEffectVector s = standardize(lf.eta);
      res.sign_flipped = kendall_tau(s.values, d) < 0.0;
      TrimResult tr = trim(sign_fix(s, d), ts.trim_bound);
      res.coefficients = std::move(tr.values);
      res.trimmed = std::move(tr.trimmed);
    }
  } else {
    throw std::runtime_error("unknown method: " + method);
  }

  const std::string json = result_to_json(res);
  if (out_path.empty()) {
    std::cout << json;
  } else {
    write_file(out_path, json);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_mc(const std::string& preset_name, const std::string& config_path,
           const std::string& out_dir, bool paper_scale, std::optional<std::uint64_t> base_seed,
           int threads) {
  ExperimentPreset preset;
  if (!config_path.empty()) {
    preset = preset_from_config_file(config_path);
  } else if (!preset_name.empty()) {
    preset = preset_by_name(preset_name, paper_scale);
  } else {
    throw std::runtime_error("mc: provide a preset name or --config");
  }
  if (base_seed) preset.base_seed = *base_seed;

  std::filesystem::create_directories(out_dir);
  const auto records = run_preset(preset, threads);

  std::ostringstream csv;
  write_records_csv(csv, preset, records);
  write_file(out_dir + "/records.csv", csv.str());
  write_file(out_dir + "/summary.json", summary_json(preset, records));

  if (preset.compute_inference) {
    std::vector<double> phis;
    for (const auto& rec : records) {
      for (const auto& o : rec.outcomes) {
        if (!std::isnan(o.phi)) phis.push_back(o.phi);
      }
    }
    for (const double width : {1.0, 0.2, 0.1}) {
      std::ostringstream hist_csv;
      write_histogram_csv(hist_csv, histogram(phis, width));
      std::ostringstream name;
      name << out_dir << "/phi_hist_w" << width << ".csv";
      write_file(name.str(), hist_csv.str());
    }
  }

  double total_wall = 0.0;
  int failed = 0;
  for (const auto& rec : records) {
    total_wall += rec.wall_seconds;
    for (const auto& o : rec.outcomes) {
      if (!o.error.empty()) {
        ++failed;
        break;
      }
    }
  }
  std::cout << "preset " << preset.name << ": " << records.size() << " replications, "
            << failed << " with recorded errors, " << total_wall
            << " s replication time total\nwrote " << out_dir << "/records.csv, summary.json\n";
  return 0;
}

int cmd_compare(const std::string& truth_path, const std::string& estimate_path) {
  const Eigen::VectorXd truths = read_values_file(truth_path);
  const Eigen::VectorXd estimates = read_values_file(estimate_path);
  const SlopeDiagnostic sd = slope_diagnostic(truths, estimates);
  std::cout << "{\n  \"slope\": " << format_double(sd.slope) << ",\n  \"intercept\": "
            << format_double(sd.intercept) << ",\n  \"kendall\": " << format_double(sd.kendall)
            << "\n}\n";
  return 0;
}

int cmd_hist(const std::string& values_path, double width, const std::string& out_path) {
  const Eigen::VectorXd v = read_values_file(values_path);
  std::vector<double> values(v.data(), v.data() + v.size());
  std::ostringstream csv;
  write_histogram_csv(csv, histogram(values, width));
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out_path, csv.str());
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiparametric GMM estimation of fixed effects in dyadic network formation"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw fixed effects and a network");
  int n = 100;
  std::string design = "uniform", outliers, values_list;
  double lo = -1.0, hi = 3.0;
  std::string error = "logistic";
  double loc = 0.0, scale = 1.0, alpha = 5.0, beta = 1.0, rate = 1.5;
  std::uint64_t seed = 1;
  std::string out_edges = "network.edges", out_truths = "truths.csv";
  sim->add_option("--n", n, "number of nodes");
  sim->add_option("--design", design, "uniform|clustered|explicit");
  sim->add_option("--lo", lo, "uniform lower bound / clustered bulk lower");
  sim->add_option("--hi", hi, "uniform upper bound / clustered bulk upper");
  sim->add_option("--outliers", outliers, "comma list (clustered design)");
  sim->add_option("--values", values_list, "comma list (explicit design)");
  sim->add_option("--error", error, "logistic|beta|exponential");
  sim->add_option("--loc", loc, "logistic location");
  sim->add_option("--scale", scale, "logistic scale");
  sim->add_option("--alpha", alpha, "beta alpha");
  sim->add_option("--beta", beta, "beta beta");
  sim->add_option("--rate", rate, "exponential rate");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--out-edges", out_edges, "edge list output path");
  sim->add_option("--out-truths", out_truths, "truths CSV output path");

  // estimate
  auto* est = app.add_subcommand("estimate", "fit one network");
  std::string edges_path, method = "semi", transform = "dbmm", est_out;
  double bandwidth = 0.0, trim_bound = 4.0;
  bool bandwidth_set = false;
  int max_iters = 5000;
  std::uint64_t est_seed = 0;
  est->add_option("edges", edges_path, "edge list file")->required();
  est->add_option("--method", method, "semi|logit");
  est->add_option("--transform", transform, "dbmm|std");
  est->add_option("--bandwidth", bandwidth, "kernel bandwidth override")
      ->each([&](const std::string&) { bandwidth_set = true; });
  est->add_option("--max-iters", max_iters, "solver iteration cap");
  est->add_option("--seed", est_seed, "restart-perturbation seed");
  est->add_option("--trim-bound", trim_bound, "standardization trim bound");
  est->add_option("--out", est_out, "result JSON path (default stdout)");

  // mc
  auto* mc = app.add_subcommand("mc", "run a Monte Carlo preset");
  std::string preset_name, config_path, out_dir = "mc_out";
  bool paper_scale = false;
  std::uint64_t mc_seed = 0;
  bool mc_seed_set = false;
  int threads = 0;
  mc->add_option("preset", preset_name,
                 "preset name (phi_normality, little_variation, clustering, beta_convex, "
                 "beta_concave, exp_concave)");
  mc->add_option("--config", config_path, "key=value config file instead of a preset name");
  mc->add_option("--out-dir", out_dir, "output directory");
  mc->add_flag("--paper-scale", paper_scale, "phi_normality at N=100, B=192");
  mc->add_option("--base-seed", mc_seed, "override the preset's base seed")
      ->each([&](const std::string&) { mc_seed_set = true; });
  mc->add_option("--threads", threads, "replication-level parallelism (0 = all cores)");

  // compare
  auto* cmp = app.add_subcommand("compare", "slope/rank diagnostics between two coefficient sets");
  std::string truth_path, estimate_path;
  cmp->add_option("truths", truth_path, "truths (CSV or result JSON)")->required();
  cmp->add_option("estimates", estimate_path, "estimates (CSV or result JSON)")->required();

  // hist
  auto* hist = app.add_subcommand("hist", "bin values into probability heights");
  std::string values_path, hist_out;
  double width = 1.0;
  hist->add_option("values", values_path, "values file (CSV column or result JSON)")->required();
  hist->add_option("--width", width, "bin width");
  hist->add_option("--out", hist_out, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(n, design, lo, hi, outliers, values_list, error, loc, scale, alpha,
                          beta, rate, seed, out_edges, out_truths);
    }
    if (est->parsed()) {
      return cmd_estimate(edges_path, method, transform,
                          bandwidth_set ? std::optional<double>(bandwidth) : std::nullopt,
                          max_iters, est_seed, trim_bound, est_out);
    }
    if (mc->parsed()) {
      return cmd_mc(preset_name, config_path, out_dir, paper_scale,
                    mc_seed_set ? std::optional<std::uint64_t>(mc_seed) : std::nullopt, threads);
    }
    if (cmp->parsed()) return cmd_compare(truth_path, estimate_path);
    if (hist->parsed()) return cmd_hist(values_path, width, hist_out);
  } catch (const netsemi::EstimationError& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
