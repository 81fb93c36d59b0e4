#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nqg/decoherence.hpp"
#include "nqg/diffeo.hpp"
#include "nqg/gauge.hpp"
#include "nqg/scenario.hpp"

namespace nqg {

std::string version_string();

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

struct ExperimentOptions {
  std::filesystem::path out_dir;  ///< empty: use the scenario's [output] dir
  int threads = 1;
  bool independent = false;       ///< covariance: deform branches independently
  std::optional<SweepParameter> sweep_parameter;
  std::vector<double> sweep_values;
};

struct ExperimentReport {
  std::string experiment;
  std::string scenario_text;
  std::string input_hash;
  std::string version;
  double wall_time_seconds = 0.0;
  std::vector<Finding> findings;
  std::vector<DecoherenceResult> results;
  std::vector<CovarianceReport> covariance;
  std::vector<SweepRow> sweep_rows;
  std::vector<GaugeRow> gauge_rows;
  std::vector<ResidualSample> residuals;
  std::vector<std::string> summary;  ///< human-readable lines
  std::vector<std::filesystem::path> artifacts;
};

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

ExperimentReport run_experiment(const std::string& experiment,
                                const std::filesystem::path& config_path,
                                const ExperimentOptions& options);

ExperimentReport run_experiment(const std::string& experiment, const ScenarioConfig& config,
                                const std::string& scenario_text,
                                const ExperimentOptions& options);

void write_report_json(const std::filesystem::path& path, const ExperimentReport& report);

}  // namespace nqg
