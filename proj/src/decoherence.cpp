#include "nqg/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nqg/error.hpp"
#include "nqg/parallel.hpp"
#include "nqg/propagator.hpp"

namespace nqg {

BranchPair::BranchPair(WaveFunction left, WaveFunction right, BranchHistory history,
                       std::optional<std::pair<WaveFunction, WaveFunction>> pre_interaction)
    : left_(std::move(left)),
      right_(std::move(right)),
      history_(std::move(history)),
      pre_interaction_(std::move(pre_interaction)) {
  if (!(left_.grid() == right_.grid())) {
    throw GridMismatch("branches of a pair must live on the same lattice");
  }
  if (pre_interaction_ && (!(pre_interaction_->first.grid() == left_.grid()) ||
                           !(pre_interaction_->second.grid() == left_.grid()))) {
    throw GridMismatch("pre-interaction snapshots must share the branches' lattice");
  }
}

DecoherenceResult transition_probability(const BranchPair& pair, double norm_tolerance) {
  for (const auto* psi : {&pair.left(), &pair.right()}) {
    const double n = norm(*psi);
    if (std::abs(n * n - 1.0) > norm_tolerance) {
      std::ostringstream msg;
      msg << "branch is not normalized: <psi|psi> - 1 = " << n * n - 1.0 << " (tolerance "
          << norm_tolerance << ")";
      throw InvalidArgument(msg.str());
    }
  }
  DecoherenceResult result;
  result.overlap = inner_product(pair.left(), pair.right());
  double rho = 0.5 * (1.0 - result.overlap.real());
  if (rho < -kRhoClampTolerance || rho > 1.0 + kRhoClampTolerance || !std::isfinite(rho)) {
    std::ostringstream msg;
    msg << "rho_trans = " << rho << " lies outside [0, 1]: numerical corruption";
    throw NumericalError(msg.str());
  }
  result.rho_trans = std::clamp(rho, 0.0, 1.0);
  result.history = pair.history();
  return result;
}

SuperpositionState SuperpositionState::from_pair(const BranchPair& pair) {
  const Complex c(1.0 / std::sqrt(2.0), 0.0);
  return {{pair.history().left_sources, pair.left(), c},
          {pair.history().right_sources, pair.right(), c}};
}

double SuperpositionState::coefficient_norm() const {
  return std::norm(first.coefficient) + std::norm(second.coefficient);
}

namespace {

PotentialField potential_for(const Grid& grid, const std::vector<NewtonianSource>& sources,
                             double test_mass) {
  return sources.empty() ? zero_potential(grid) : sample_potential(grid, sources, test_mass);
}

std::string describe_packet(const ScenarioConfig& s) {
  std::ostringstream out;
  out << std::setprecision(17) << "gaussian(center=";
  for (int d = 0; d < s.grid.dim; ++d) out << (d ? "," : "") << s.packet.center[d];
  out << "; width=" << s.packet.width << "; momentum=";
  for (int d = 0; d < s.grid.dim; ++d) out << (d ? "," : "") << s.packet.momentum[d];
  out << ")";
  return out.str();
}

}  // namespace

BranchPair evolve_branches(const ScenarioConfig& scenario, int threads) {
  const Grid grid = scenario.make_grid();
  if (scenario.sources.left == scenario.sources.right) {
    throw InvalidArgument("sources.x_l equals sources.x_r: degenerate scenario");
  }
  const WaveFunction psi0 =
      gaussian_packet(grid, scenario.packet.center, scenario.packet.width, scenario.packet.momentum);
  const double dt = scenario.time_step();

  BranchHistory history;
  history.initial_state = describe_packet(scenario);
  history.t_total = scenario.times.t_total;
  history.dt = dt;
  history.left_sources = scenario.left_sources();
  history.right_sources = scenario.right_sources();

  const std::vector<NewtonianSource>* sources[2] = {&history.left_sources,
                                                    &history.right_sources};
  std::vector<std::optional<WaveFunction>> branches(2);
  parallel_for(2, threads, [&](std::size_t b) {
    const PotentialField v = potential_for(grid, *sources[b], scenario.test_mass);
    branches[b] = evolve(psi0, v, scenario.times.t_total, dt, scenario.test_mass);
  });
  return BranchPair(std::move(*branches[0]), std::move(*branches[1]), std::move(history),
                    std::make_pair(psi0, psi0));
}

DecoherenceResult run_double_slit(const ScenarioConfig& scenario, int threads) {
  return transition_probability(evolve_branches(scenario, threads));
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "M") return SweepParameter::mass;
  if (name == "t_total") return SweepParameter::t_total;
  if (name == "separation") return SweepParameter::separation;
  if (name == "eps") return SweepParameter::softening;
  throw InvalidArgument("unknown sweep parameter '" + std::string(name) +
                        "' (expected M, t_total, separation or eps)");
}

std::string_view to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::mass: return "M";
    case SweepParameter::t_total: return "t_total";
    case SweepParameter::separation: return "separation";
    case SweepParameter::softening: return "eps";
  }
  return "?";
}

ScenarioConfig with_parameter(const ScenarioConfig& scenario, SweepParameter parameter,
                              double value) {
  if (!std::isfinite(value)) throw InvalidArgument("sweep value must be finite");
  ScenarioConfig out = scenario;
  switch (parameter) {
    case SweepParameter::mass:
      out.sources.mass = value;
      break;
    case SweepParameter::t_total:
      out.times.t_total = value;
      break;
    case SweepParameter::softening:
      out.sources.softening = value;
      break;
    case SweepParameter::separation: {
      const Coord& l = scenario.sources.left;
      const Coord& r = scenario.sources.right;
      Coord mid{}, dir{};
      double len = 0.0;
      for (int d = 0; d < 3; ++d) {
        mid[d] = 0.5 * (l[d] + r[d]);
        dir[d] = r[d] - l[d];
        len += dir[d] * dir[d];
      }
      len = std::sqrt(len);
      if (!(len > 0.0)) throw InvalidArgument("separation sweep needs x_l != x_r");
      if (!(value > 0.0)) throw InvalidArgument("separation must be positive");
      for (int d = 0; d < 3; ++d) {
        out.sources.left[d] = mid[d] - 0.5 * value * dir[d] / len;
        out.sources.right[d] = mid[d] + 0.5 * value * dir[d] / len;
      }
      break;
    }
  }
  return out;
}

std::vector<SweepRow> sweep(const ScenarioConfig& scenario, SweepParameter parameter,
                            const std::vector<double>& values, int threads) {
  std::vector<ScenarioConfig> configs;
  configs.reserve(values.size());
  for (double v : values) configs.push_back(with_parameter(scenario, parameter, v));

  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    try {
      const auto result = run_double_slit(configs[i], 1);
      rows[i] = {values[i], result.rho_trans, result.overlap};
    } catch (const InvalidArgument& e) {
      std::ostringstream msg;
      msg << "sweep " << to_string(parameter) << " = " << std::setprecision(17) << values[i]
          << ": " << e.what();
      throw InvalidArgument(msg.str());
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "sweep " << to_string(parameter) << " = " << std::setprecision(17) << values[i]
          << ": " << e.what();
      throw NumericalError(msg.str());
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepParameter parameter,
                     const std::vector<SweepRow>& rows) {
  out << "param,value,rho_trans,overlap_re,overlap_im\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << to_string(parameter) << ',' << r.value << ',' << r.rho_trans << ','
        << r.overlap.real() << ',' << r.overlap.imag() << '\n';
  }
}

}  // namespace nqg
