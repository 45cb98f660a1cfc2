#include "netsemi/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace netsemi {

namespace {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

json nan_safe(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

std::string version_string() {
#ifdef NETSEMI_VERSION
  return NETSEMI_VERSION;
#else
  return "v0.0.0";
#endif
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string preset_hash(const ExperimentPreset& preset) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(preset_to_config(preset))));
  return buf;
}

std::string result_to_json(const EstimationResult& result) {
  json j;
  j["method"] = result.method;
  j["n"] = result.n;
  j["seed"] = result.seed;
  j["version"] = version_string();
  j["coefficients"] = vector_to_json(result.coefficients.values);
  j["tag"] = to_string(result.coefficients.tag);
  j["raw_coefficients"] = vector_to_json(result.raw_coefficients);

  j["transform"] = {
      {"mode", to_string(result.transform.mode)},
      {"trim_bound", result.transform.trim_bound},
      {"anchor_low", result.transform.anchor_low},
      {"anchor_high", result.transform.anchor_high},
      {"trimmed_indices", result.trimmed},
      {"inloop_trimmed_unique", result.inloop_trimmed_unique},
      {"sign_flipped", result.sign_flipped},
  };

  j["trace"] = {
      {"iterations", result.trace.iterations},
      {"converged", result.trace.converged},
      {"final_objective", nan_safe(result.trace.final_objective)},
      {"restart_index", result.trace.restart_index},
      {"degenerate_density_rejections", result.trace.degenerate_density_rejections},
      {"lambda_final", result.trace.lambda_final},
      {"objective_path", result.trace.objective_path},
  };
  if (!std::isnan(result.loglik)) j["trace"]["loglik"] = result.loglik;

  j["field"] = {
      {"bandwidth", result.bandwidth},
      {"clamp_count", result.field.clamp_count},
  };

  if (result.variance.size() > 0) {
    json diag = json::array();
    for (Eigen::Index i = 0; i < result.variance.rows(); ++i) {
      diag.push_back(result.variance(i, i));
    }
    j["variance_diagonal"] = diag;
    j["variance_condition"] = nan_safe(result.variance_condition);
  }
  if (!result.variance_error.empty()) j["variance_error"] = result.variance_error;

  return j.dump(2) + "\n";
}

Eigen::VectorXd coefficients_from_result_json(const std::string& text) {
  const json j = json::parse(text);
  const auto& a = j.at("coefficients");
  Eigen::VectorXd out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return out;
}

namespace {

const char* kOutcomeColumns[] = {"error",     "converged", "iterations", "objective",
                                 "slope",     "intercept", "kendall",    "mse",
                                 "trimmed",   "inloop_trimmed", "clamps"};

std::vector<std::string> combo_keys(const ExperimentPreset& preset) {
  std::vector<std::string> keys;
  for (const Method m : preset.methods) {
    for (const TransformMode t : preset.transforms) {
      keys.push_back(std::string(to_string(m)) + "_" + to_string(t));
    }
  }
  return keys;
}

const MethodOutcome* find_outcome(const ReplicationRecord& rec, const std::string& key) {
  for (const auto& o : rec.outcomes) {
    if (o.key == key) return &o;
  }
  return nullptr;
}

void write_metadata_header(std::ostream& os, const ExperimentPreset& preset) {
  os << "# netsemi " << version_string() << "\n";
  os << "# preset=" << preset.name << " hash=" << preset_hash(preset)
     << " base_seed=" << preset.base_seed << "\n";
  os << "# n=" << preset.dgp.n << " replications=" << preset.replications
     << " error=" << preset.dgp.error.describe() << "\n";
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

void write_records_csv(std::ostream& os, const ExperimentPreset& preset,
                       const std::vector<ReplicationRecord>& records) {
  write_metadata_header(os, preset);
  const auto keys = combo_keys(preset);

  os << "replication,seed";
  for (const auto& key : keys) {
    for (const char* col : kOutcomeColumns) os << "," << key << "_" << col;
  }
  if (preset.compute_inference) os << ",phi,d11";
  os << "\n";

  for (const auto& rec : records) {
    os << rec.replication << "," << rec.seed;
    double phi = std::numeric_limits<double>::quiet_NaN();
    double d11 = std::numeric_limits<double>::quiet_NaN();
    for (const auto& key : keys) {
      const MethodOutcome* o = find_outcome(rec, key);
      if (!o) {
        os << ",missing,,,,,,,,,,";
        continue;
      }
      os << "," << (o->error.empty() ? "ok" : o->error);
      os << "," << (o->converged ? 1 : 0);
      os << "," << o->iterations;
      os << "," << format_double(o->objective);
      os << "," << format_double(o->slope);
      os << "," << format_double(o->intercept);
      os << "," << format_double(o->kendall);
      os << "," << format_double(o->mse);
      os << "," << o->trimmed_count;
      os << "," << o->inloop_trimmed_unique;
      os << "," << o->clamp_count;
      if (!std::isnan(o->phi)) phi = o->phi;
      if (!std::isnan(o->d11)) d11 = o->d11;
    }
    if (preset.compute_inference) {
      os << "," << format_double(phi) << "," << format_double(d11);
    }
    os << "\n";
  }
}

std::string summary_json(const ExperimentPreset& preset,
                         const std::vector<ReplicationRecord>& records) {
  json j;
  j["version"] = version_string();
  j["preset"] = preset.name;
  j["preset_hash"] = preset_hash(preset);
  j["base_seed"] = preset.base_seed;
  j["n"] = preset.dgp.n;
  j["replications"] = preset.replications;
  j["config"] = preset_to_config(preset);

  json combos = json::object();
  for (const auto& key : combo_keys(preset)) {
    std::vector<double> slopes, taus, mses;
    int ok = 0, failed = 0, not_converged = 0;
    int degenerate_scale = 0, singular = 0, mle_nonexistent = 0;
    int trimmed_majority = 0;
    for (const auto& rec : records) {
      const MethodOutcome* o = find_outcome(rec, key);
      if (!o) continue;
      if (o->error.empty()) {
        ++ok;
        if (!std::isnan(o->slope)) slopes.push_back(o->slope);
        if (!std::isnan(o->kendall)) taus.push_back(o->kendall);
        if (!std::isnan(o->mse)) mses.push_back(o->mse);
      } else {
        ++failed;
        if (o->error == "NotConverged") ++not_converged;
        if (o->error == "DegenerateScale") ++degenerate_scale;
        if (o->error == "SingularNormalEquations") ++singular;
        if (o->error == "MleNonexistent") ++mle_nonexistent;
      }
      const int n = preset.dgp.n;
      if (o->inloop_trimmed_unique > n / 2 || o->trimmed_count > n / 2) ++trimmed_majority;
    }
    combos[key] = {
        {"ok", ok},
        {"failed", failed},
        {"not_converged", not_converged},
        {"degenerate_scale", degenerate_scale},
        {"singular_normal_equations", singular},
        {"mle_nonexistent", mle_nonexistent},
        {"trimmed_majority_replications", trimmed_majority},
        {"median_slope", nan_safe(median_of(slopes))},
        {"median_kendall", nan_safe(median_of(taus))},
        {"median_mse", nan_safe(median_of(mses))},
    };
  }
  j["combos"] = combos;

  if (preset.compute_inference) {
    std::vector<double> phis, inlier_phis, d11s, inlier_abs_d11;
    int excluded_phi = 0, excluded_d11_stage1 = 0, excluded_d11_stage2 = 0;
    for (const auto& rec : records) {
      for (const auto& o : rec.outcomes) {
        if (std::isnan(o.phi)) continue;
        phis.push_back(o.phi);
        if (std::abs(o.phi) > 5.0) {
          ++excluded_phi;
        } else {
          inlier_phis.push_back(o.phi);
        }
        if (!std::isnan(o.d11)) {
          d11s.push_back(o.d11);
          if (std::abs(o.d11) > 2.0) {
            ++excluded_d11_stage1;  // first-stage exclusion
          } else if (std::abs(o.d11) > 0.8) {
            ++excluded_d11_stage2;  // second stage
          } else {
            inlier_abs_d11.push_back(std::abs(o.d11));
          }
        }
      }
    }
    double mean = 0.0, sd = std::numeric_limits<double>::quiet_NaN();
    if (!inlier_phis.empty()) {
      for (const double p : inlier_phis) mean += p;
      mean /= static_cast<double>(inlier_phis.size());
      if (inlier_phis.size() > 1) {
        double ss = 0.0;
        for (const double p : inlier_phis) ss += (p - mean) * (p - mean);
        sd = std::sqrt(ss / static_cast<double>(inlier_phis.size() - 1));
      }
    }
    j["phi"] = {
        {"count", phis.size()},
        {"excluded_abs_gt_5", excluded_phi},
        {"inlier_mean", nan_safe(inlier_phis.empty() ? std::numeric_limits<double>::quiet_NaN() : mean)},
        {"inlier_sd", nan_safe(sd)},
    };
    j["d11"] = {
        {"count", d11s.size()},
        {"excluded_stage1_abs_gt_2", excluded_d11_stage1},
        {"excluded_stage2_abs_gt_0_8", excluded_d11_stage2},
        {"inlier_median_abs", nan_safe(median_of(inlier_abs_d11))},
    };
  }
  return j.dump(2) + "\n";
}

void write_histogram_csv(std::ostream& os, const Histogram& hist) {
  os << "bin_left,bin_right,count,height\n";
  for (std::size_t b = 0; b < hist.left_edges.size(); ++b) {
    os << format_double(hist.left_edges[b]) << ","
       << format_double(hist.left_edges[b] + hist.bin_width) << "," << hist.counts[b] << ","
       << format_double(hist.heights[b]) << "\n";
  }
}

void write_truths_csv(std::ostream& os, const Eigen::VectorXd& truths, std::uint64_t seed) {
  os << "# netsemi " << version_string() << " seed=" << seed << "\n";
  os << "node,eta\n";
  for (Eigen::Index i = 0; i < truths.size(); ++i) {
    os << i << "," << format_double(truths[i]) << "\n";
  }
}

}  // namespace netsemi
