#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "translocal/entropy.hpp"

namespace translocal::cli {

/// One [experiment] or [experiment:<name>] section of a config file.
struct ExperimentConfig {
  std::string name;
  std::string kind;  // restricted-entropy | yz-function | translocal | lyapunov | brin-katok |
                     // local-pressure | translocal-pressure | pressure | kraft | audit
  std::string system;
  std::vector<std::string> points;  // point specs, parsed against the system's space
  std::size_t random_points = 0;
  std::uint64_t seed = 1;
  std::vector<double> omegas;
  std::string potential = "zero";
  std::string measure;
  std::string region = "whole";
  entropy::Schedule schedule = entropy::Schedule::defaults();
  std::vector<double> deltas{0.05, 0.02};
  std::int64_t lyapunov_n = 4000;
  double r = 0.05;
  std::int64_t N_min = 4, N_max = 8;
  std::size_t samples = 4;
  double tolerance = 0.10;
  std::vector<double> lengths;
  std::string family;
  std::optional<double> expected;  // user-registered closed form
  std::string provenance;
};

struct RunConfig {
  std::vector<ExperimentConfig> experiments;
  std::string csv_path, json_path;  // empty: stdout for CSV, no JSON file
  unsigned threads = 1;
};

/// Parses and validates a config file; throws ConfigError naming the
/// offending line or [section] key.
RunConfig load_config(const std::string& path, std::optional<std::size_t> budget_cap = std::nullopt);

struct ReportRow {
  std::string experiment, kind, system, point;
  std::int64_t n_min = 0, n_max = 0;
  std::optional<double> epsilon, omega, s;
  std::string potential;
  double value = 0.0;
  std::optional<double> lower;
  std::optional<double> residual;
  std::optional<double> expected, rel_error;
  std::string provenance;
  double tolerance = 0.0;
  bool incomplete = false;
  bool passed = true;  // against the expected value, or the audit verdict
  std::vector<std::string> notes;
};

struct Report {
  std::vector<ReportRow> rows;
  nlohmann::ordered_json summary;
  bool passed = true;
  bool incomplete = false;
  std::vector<std::string> text;  // audit transcripts
};

/// Runs every experiment; rows are ordered by experiment and sweep index.
Report run(const RunConfig& cfg);

inline const char* kCsvHeader =
    "experiment,system,point,n_min,n_max,epsilon,omega,s,potential,value,residual,expected,rel_error,provenance";
std::string to_csv(const std::vector<ReportRow>& rows);

std::string list_catalogue();

/// Closed forms registered for (kind, system, point, omega, potential).
struct Expected {
  double value;
  std::string provenance;
};

}  // namespace translocal::cli
