#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "netsemi/gmm.hpp"
#include "netsemi/harness.hpp"

namespace netsemi {

std::string version_string();

/// FNV-1a over the canonical preset config text.
std::string preset_hash(const ExperimentPreset& preset);

/// EstimationResult as JSON: coefficients, trace summary, transform metadata,
/// field diagnostics. Same schema for both methods ("method" marks which).
std::string result_to_json(const EstimationResult& result);

/// Reads the "coefficients" array back from a result JSON (for `compare`).
Eigen::VectorXd coefficients_from_result_json(const std::string& text);

/// records.csv: metadata header lines ("# ..."), then one row per replication
/// with one column group per method/transform combination. Deterministic
/// byte-for-byte given the same preset and base seed.
void write_records_csv(std::ostream& os, const ExperimentPreset& preset,
                       const std::vector<ReplicationRecord>& records);

/// Aggregates (medians, counts, phi diagnostics) as JSON.
std::string summary_json(const ExperimentPreset& preset,
                         const std::vector<ReplicationRecord>& records);

void write_histogram_csv(std::ostream& os, const Histogram& hist);

/// Truths as CSV: "node,eta" with a metadata header.
void write_truths_csv(std::ostream& os, const Eigen::VectorXd& truths,
                      std::uint64_t seed);

/// Shortest-round-trip-safe formatting used by every writer ("%.17g").
std::string format_double(double x);

}  // namespace netsemi
