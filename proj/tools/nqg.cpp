#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nqg/error.hpp"
#include "nqg/experiment.hpp"

namespace {

int env_threads() {
  const char* value = std::getenv("NQG_THREADS");
  if (value == nullptr || *value == '\0') return 1;
  try {
    std::size_t used = 0;
    const int n = std::stoi(value, &used);
    if (used == std::string(value).size() && n >= 1) return n;
  } catch (const std::exception&) {
  }
  throw nqg::InvalidArgument(std::string("NQG_THREADS must be a positive integer, got '") +
                             value + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch decoherence experiments on a periodic lattice"};
  app.set_version_flag("--version", nqg::version_string());
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int threads = 0;
  std::string param;
  std::vector<double> values;
  bool independent = false;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"run", "Evolve both branches and report rho_trans"},
      {"sweep", "Repeat the run over a list of parameter values"},
      {"covariance", "Apply deformations and compare overlaps"},
      {"gauge", "Compare rho_trans across gauge prescriptions"},
      {"residual", "Evaluate the harmonic-gauge residual of a metric"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (default: NQG_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    if (name == "sweep") {
      sub->add_option("--param", param, "M, t_total, separation or eps")->required();
      sub->add_option("--values", values, "Comma separated values")
          ->required()
          ->delimiter(',');
    }
    if (name == "covariance") {
      sub->add_flag("--independent", independent, "Deform the two branches independently");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? nqg::kExitOk : nqg::kExitValidation;
  }

  try {
    nqg::ExperimentOptions options;
    options.out_dir = out;
    options.threads = threads > 0 ? threads : env_threads();
    options.independent = independent;
    if (!param.empty()) options.sweep_parameter = nqg::parse_sweep_parameter(param);
    options.sweep_values = values;

    const std::string experiment = app.get_subcommands().front()->get_name();
    const auto report = nqg::run_experiment(experiment, config, options);
    for (const auto& f : report.findings) {
      std::cerr << "warning: " << f.field << ": " << f.message << '\n';
    }
    for (const auto& line : report.summary) std::cout << line << '\n';
    for (const auto& path : report.artifacts) std::cout << "wrote " << path.string() << '\n';
    return nqg::kExitOk;
  } catch (const nqg::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nqg::kExitValidation;
  } catch (const nqg::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return nqg::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nqg::kExitNumerical;
  }
}
