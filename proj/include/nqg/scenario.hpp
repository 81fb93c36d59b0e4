#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nqg/diffeo.hpp"
#include "nqg/lattice.hpp"
#include "nqg/potential.hpp"

namespace nqg {

struct GridSpec {
  int dim = 1;
  std::size_t n = 1024;
  double length = 40.0;
};

struct PacketSpec {
  Coord center{};
  double width = 1.0;
  Coord momentum{};
};

/// The two classical positions of the heavy source particle.
struct SourceSpec {
  Coord left{-2.0, 0.0, 0.0};
  Coord right{2.0, 0.0, 0.0};
  double mass = 50.0;
  double softening = 0.5;
};

struct TimeSpec {
  double t_total = 2.0;
  std::optional<double> dt;  ///< defaults to default_time_step()
  double t0 = 0.0;           ///< time at which the branches start to differ
};

struct DeformationSpec {
  Coord center{};
  double radius = 1.0;
  Coord amplitude{};
  BumpProfile profile = BumpProfile::standard;
};

/// Per-branch deformations describing how each branch's coordinates relate
/// to the preferred ones. A missing entry means identity.
struct PrescriptionSpec {
  std::string id;
  std::optional<DeformationSpec> left;
  std::optional<DeformationSpec> right;
};

/// Metric family and sample points for the harmonic-residual report.
/// Points are (t = 0, r * direction / |direction|) for each radius.
struct MetricSpec {
  std::string family = "schwarzschild_harmonic";
  double mass = 1.0;
  double step = 1e-3;
  std::vector<double> radii{10.0};
  Coord direction{1.0, 2.0, 2.0};
  // weak_field_newtonian only
  Coord source_position{};
  Coord source_velocity{};
  double softening = 0.5;
  bool linearized = true;
};

/// Parameters of one double-slit run. Units hbar = G = 1 (c = 1 for the
/// metric families). Everything is deterministic.
struct ScenarioConfig {
  std::string name = "scenario";
  GridSpec grid;
  PacketSpec packet;
  SourceSpec sources;
  double test_mass = 1.0;
  TimeSpec times;
  std::optional<DeformationSpec> deformation;
  std::vector<PrescriptionSpec> prescriptions;
  std::optional<MetricSpec> metric;
  std::filesystem::path output_dir = "out";

  Grid make_grid() const;
  double time_step() const;
  std::size_t step_count() const;
  std::vector<NewtonianSource> left_sources() const;
  std::vector<NewtonianSource> right_sources() const;
};

HoleDiffeomorphism make_deformation(const DeformationSpec& spec, int dim);

/// Parses the flat key-value scenario format (INI-style sections
/// [grid], [packet], [sources], [masses], [times], [deformation],
/// [prescription:<id>], [metric], [output]). Vectors are comma separated.
/// Throws InvalidArgument naming the line or the offending `section.key`.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

enum class Severity { warning, error };

struct Finding {
  Severity severity;
  std::string field;
  std::string message;
};

/// Runs every precondition of every module the scenario would touch.
/// Empty result iff everything holds; warnings do not block a run.
///
/// `experiment` adds the requirements of one CLI experiment ("run",
/// "sweep", "covariance", "covariance-independent", "gauge", "residual").
std::vector<Finding> validate(const ScenarioConfig& config, std::string_view experiment = {});

bool has_errors(const std::vector<Finding>& findings);

}  // namespace nqg
