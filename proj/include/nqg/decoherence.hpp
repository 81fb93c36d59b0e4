#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nqg/lattice.hpp"
#include "nqg/potential.hpp"
#include "nqg/scenario.hpp"

namespace nqg {

/// What produced a branch pair.
struct BranchHistory {
  std::string initial_state;
  double t_total = 0.0;
  double dt = 0.0;
  std::vector<NewtonianSource> left_sources;
  std::vector<NewtonianSource> right_sources;
};

/// The test-particle states psi_l, psi_r reached for the two source
/// positions, optionally with the common pre-interaction states they
/// started from (expressed in the same coordinates as the branches).
class BranchPair {
 public:
  BranchPair(WaveFunction left, WaveFunction right, BranchHistory history = {},
             std::optional<std::pair<WaveFunction, WaveFunction>> pre_interaction = {});

  const WaveFunction& left() const { return left_; }
  const WaveFunction& right() const { return right_; }
  const Grid& grid() const { return left_.grid(); }
  const BranchHistory& history() const { return history_; }
  const std::optional<std::pair<WaveFunction, WaveFunction>>& pre_interaction() const {
    return pre_interaction_;
  }

 private:
  WaveFunction left_;
  WaveFunction right_;
  BranchHistory history_;
  std::optional<std::pair<WaveFunction, WaveFunction>> pre_interaction_;
};

struct DecoherenceResult {
  Complex overlap;        ///< <psi_l|psi_r>
  double rho_trans = 0;   ///< (1 - Re overlap) / 2
  BranchHistory history;  ///< echo of what was run
};

/// Normalization tolerance for branches coming straight out of the
/// propagator.
inline constexpr double kBranchNormTolerance = 1e-10;
/// Normalization tolerance for branches that went through interpolation.
inline constexpr double kTransformedNormTolerance = 1e-8;
/// Excess beyond [0, 1] that is clamped rather than reported.
inline constexpr double kRhoClampTolerance = 1e-9;

/// rho_trans = (1 - Re<psi_l|psi_r>) / 2, the probability of finding the
/// source particle in the odd state (phi_l - phi_r)/sqrt(2).
DecoherenceResult transition_probability(const BranchPair& pair,
                                         double norm_tolerance = kBranchNormTolerance);

/// |Psi> = c1 |g1, psi1> + c2 |g2, psi2>: the superposition a BranchPair
/// stands for, with the source configuration as the gravitational label.
struct SuperpositionState {
  struct Component {
    std::vector<NewtonianSource> sources;
    WaveFunction psi;
    Complex coefficient;
  };
  Component first;
  Component second;

  static SuperpositionState from_pair(const BranchPair& pair);
  double coefficient_norm() const;
};

/// Prepares psi0, evolves it under the left and right source potentials
/// (concurrently when threads > 1) and records psi0 as the pre-interaction
/// snapshot of both branches.
BranchPair evolve_branches(const ScenarioConfig& scenario, int threads = 1);

/// Full double-slit experiment with gravitational partial measurement.
DecoherenceResult run_double_slit(const ScenarioConfig& scenario, int threads = 1);

enum class SweepParameter { mass, t_total, separation, softening };

SweepParameter parse_sweep_parameter(std::string_view name);
std::string_view to_string(SweepParameter parameter);

/// Copy of `scenario` with one parameter replaced. `separation` keeps the
/// midpoint and direction of the two source positions.
ScenarioConfig with_parameter(const ScenarioConfig& scenario, SweepParameter parameter,
                              double value);

struct SweepRow {
  double value;
  double rho_trans;
  Complex overlap;
};

/// One run_double_slit per value. Rows are returned in input order
/// regardless of thread count.
std::vector<SweepRow> sweep(const ScenarioConfig& scenario, SweepParameter parameter,
                            const std::vector<double>& values, int threads = 1);

/// Header `param,value,rho_trans,overlap_re,overlap_im`; 17 significant digits.
void write_sweep_csv(std::ostream& out, SweepParameter parameter,
                     const std::vector<SweepRow>& rows);

}  // namespace nqg
