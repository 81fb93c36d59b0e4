#include "nqg/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include <openssl/evp.h>

#include "nqg/error.hpp"
#include "nqg/io.hpp"

#ifndef NQG_VERSION
#define NQG_VERSION "0.0.0"
#endif

namespace nqg {

std::string version_string() { return NQG_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

namespace {

std::string fmt17(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string fixed(double v, int digits = 15) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::filesystem::path output_dir(const ScenarioConfig& c, const ExperimentOptions& o) {
  auto dir = o.out_dir.empty() ? c.output_dir : o.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

template <class Writer>
std::filesystem::path write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  writer(out);
  return path;
}

void run_single(const ScenarioConfig& c, const ExperimentOptions& o, ExperimentReport& r) {
  const BranchPair pair = evolve_branches(c, o.threads);
  const auto result = transition_probability(pair);
  r.results.push_back(result);
  r.summary.push_back("rho_trans = " + fixed(result.rho_trans));
  r.summary.push_back("overlap = " + fmt17(result.overlap.real()) + " + " +
                      fmt17(result.overlap.imag()) + "i");
  const auto dir = output_dir(c, o);
  for (const auto& [name, psi] : {std::pair{"psi_l", &pair.left()}, {"psi_r", &pair.right()}}) {
    r.artifacts.push_back(write_file(dir / (std::string(name) + ".nqgw"),
                                     [&](std::ostream& out) { write_wavefunction(out, *psi); }));
    r.artifacts.push_back(write_file(dir / (std::string(name) + ".csv"),
                                     [&](std::ostream& out) { write_slice_csv(out, *psi); }));
  }
}

void run_sweep(const ScenarioConfig& c, const ExperimentOptions& o, ExperimentReport& r) {
  if (!o.sweep_parameter) throw InvalidArgument("sweep needs --param");
  if (o.sweep_values.empty()) throw InvalidArgument("sweep needs --values");
  for (double v : o.sweep_values) {
    const auto findings = validate(with_parameter(c, *o.sweep_parameter, v), "sweep");
    for (const auto& f : findings) {
      if (f.severity == Severity::error) {
        throw InvalidArgument("sweep " + std::string(to_string(*o.sweep_parameter)) + " = " +
                              fmt17(v) + ": " + f.field + ": " + f.message);
      }
    }
  }
  r.sweep_rows = sweep(c, *o.sweep_parameter, o.sweep_values, o.threads);
  for (const auto& row : r.sweep_rows) {
    r.summary.push_back(std::string(to_string(*o.sweep_parameter)) + " = " + fmt17(row.value) +
                        ": rho_trans = " + fixed(row.rho_trans));
  }
  r.artifacts.push_back(write_file(output_dir(c, o) / "sweep.csv", [&](std::ostream& out) {
    write_sweep_csv(out, *o.sweep_parameter, r.sweep_rows);
  }));
}

void run_covariance(const ScenarioConfig& c, const ExperimentOptions& o, ExperimentReport& r) {
  const BranchPair pair = evolve_branches(c, o.threads);
  const auto original = transition_probability(pair);
  r.results.push_back(original);
  r.summary.push_back("rho_trans = " + fixed(original.rho_trans));
  const Grid grid = pair.grid();

  std::ostringstream csv;
  csv << std::setprecision(17);
  if (!o.independent) {
    const auto d = make_deformation(*c.deformation, grid.dim());
    const auto report = weak_covariance_check(pair, d);
    r.covariance.push_back(report);
    r.summary.push_back("common deformation: deviation = " + fmt17(report.deviation));
    r.summary.push_back(report.deviation < 1e-6 ? "c-covariance holds (deviation < 1e-6)"
                                                : "c-covariance check FAILED (deviation >= 1e-6)");
    csv << "mode,overlap_before_re,overlap_before_im,overlap_after_re,overlap_after_im,deviation\n"
        << "common," << report.overlap_before.real() << ',' << report.overlap_before.imag() << ','
        << report.overlap_after.real() << ',' << report.overlap_after.imag() << ','
        << report.deviation << '\n';
  } else {
    const SupportRegion support{c.packet.center, gaussian_support_radius(c.packet.width)};
    const auto deformations = disjoint_deformation_pair(support, grid);
    const BranchPair deformed(push_forward(pair.left(), deformations.first),
                              push_forward(pair.right(), deformations.second), pair.history());
    const auto tilde = transition_probability(deformed, kTransformedNormTolerance);
    r.results.push_back(tilde);
    r.summary.push_back("independent deformations: rho_tilde = " + fixed(tilde.rho_trans));
    if (std::abs(tilde.rho_trans - original.rho_trans) > 1e-6) {
      r.summary.push_back("q-covariance violation witness: rho_tilde differs from rho_trans by " +
                          fmt17(std::abs(tilde.rho_trans - original.rho_trans)));
    }
    csv << "mode,rho_trans,rho_tilde,overlap_tilde_re,overlap_tilde_im\n"
        << "independent," << original.rho_trans << ',' << tilde.rho_trans << ','
        << tilde.overlap.real() << ',' << tilde.overlap.imag() << '\n';
  }
  r.artifacts.push_back(write_file(output_dir(c, o) / "covariance.csv",
                                   [&](std::ostream& out) { out << csv.str(); }));
}

void run_gauge(const ScenarioConfig& c, const ExperimentOptions& o, ExperimentReport& r) {
  const int dim = c.grid.dim;
  std::vector<GaugePrescription> prescriptions{GaugePrescription::identity(dim)};
  prescriptions.front().t0 = c.times.t0;
  for (const auto& p : c.prescriptions) {
    prescriptions.push_back(make_prescription(p, dim, c.times.t0));
  }
  r.gauge_rows = compare_gauges(c, prescriptions, o.threads);
  std::ostringstream csv;
  csv << "prescription,rho_trans,overlap_re,overlap_im\n" << std::setprecision(17);
  for (const auto& row : r.gauge_rows) {
    r.summary.push_back("prescription " + row.prescription_id + ": rho_trans = " +
                        fixed(row.rho_trans));
    csv << row.prescription_id << ',' << row.rho_trans << ',' << row.overlap.real() << ','
        << row.overlap.imag() << '\n';
  }
  r.artifacts.push_back(write_file(output_dir(c, o) / "gauge.csv",
                                   [&](std::ostream& out) { out << csv.str(); }));
}

void run_residual(const ScenarioConfig& c, const ExperimentOptions& o, ExperimentReport& r) {
  const MetricSpec& spec = *c.metric;
  const MetricField metric = make_metric(spec);
  const auto& dir = spec.direction;
  const double len = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  for (double radius : spec.radii) {
    const SpacetimePoint p{0.0, radius * dir[0] / len, radius * dir[1] / len,
                           radius * dir[2] / len};
    ResidualSample s{p, harmonic_residual(metric, p, spec.step)};
    double worst = 0.0;
    for (double v : s.residual) worst = std::max(worst, std::abs(v));
    r.summary.push_back(spec.family + " at |x| = " + fmt17(radius) + ": max |residual| = " +
                        fmt17(worst));
    r.residuals.push_back(s);
  }
  r.artifacts.push_back(write_file(output_dir(c, o) / "residual.csv", [&](std::ostream& out) {
    write_residual_csv(out, r.residuals);
  }));
}

}  // namespace

ExperimentReport run_experiment(const std::string& experiment, const ScenarioConfig& config,
                                const std::string& scenario_text,
                                const ExperimentOptions& options) {
  static const std::set<std::string> known{"run", "sweep", "covariance", "gauge", "residual"};
  if (!known.count(experiment)) throw InvalidArgument("unknown experiment '" + experiment + "'");

  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.experiment = experiment;
  report.scenario_text = scenario_text;
  report.input_hash = sha256_hex(scenario_text);
  report.version = version_string();

  const std::string validation_key =
      experiment == "covariance" && options.independent ? "covariance-independent" : experiment;
  report.findings = validate(config, validation_key);
  if (has_errors(report.findings)) {
    std::ostringstream msg;
    msg << "scenario failed validation:";
    for (const auto& f : report.findings) {
      if (f.severity == Severity::error) msg << "\n  " << f.field << ": " << f.message;
    }
    throw InvalidArgument(msg.str());
  }

  if (experiment == "run") run_single(config, options, report);
  if (experiment == "sweep") run_sweep(config, options, report);
  if (experiment == "covariance") run_covariance(config, options, report);
  if (experiment == "gauge") run_gauge(config, options, report);
  if (experiment == "residual") run_residual(config, options, report);

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto dir = output_dir(config, options);
  write_report_json(dir / "report.json", report);
  report.artifacts.push_back(dir / "report.json");
  return report;
}

ExperimentReport run_experiment(const std::string& experiment,
                                const std::filesystem::path& config_path,
                                const ExperimentOptions& options) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open scenario file " + config_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return run_experiment(experiment, parse_scenario(text), text, options);
}

void write_report_json(const std::filesystem::path& path, const ExperimentReport& report) {
  using nlohmann::json;
  json j;
  j["experiment"] = report.experiment;
  j["version"] = report.version;
  j["input_sha256"] = report.input_hash;
  j["wall_time_seconds"] = report.wall_time_seconds;
  j["scenario"] = report.scenario_text;
  j["findings"] = json::array();
  for (const auto& f : report.findings) {
    j["findings"].push_back({{"severity", f.severity == Severity::error ? "error" : "warning"},
                             {"field", f.field},
                             {"message", f.message}});
  }
  j["results"] = json::array();
  for (const auto& r : report.results) {
    j["results"].push_back({{"rho_trans", r.rho_trans},
                            {"overlap_re", r.overlap.real()},
                            {"overlap_im", r.overlap.imag()},
                            {"t_total", r.history.t_total},
                            {"dt", r.history.dt},
                            {"initial_state", r.history.initial_state}});
  }
  j["covariance"] = json::array();
  for (const auto& c : report.covariance) {
    j["covariance"].push_back({{"overlap_before", {c.overlap_before.real(), c.overlap_before.imag()}},
                               {"overlap_after", {c.overlap_after.real(), c.overlap_after.imag()}},
                               {"deviation", c.deviation}});
  }
  j["sweep"] = json::array();
  for (const auto& s : report.sweep_rows) {
    j["sweep"].push_back({{"value", s.value},
                          {"rho_trans", s.rho_trans},
                          {"overlap", {s.overlap.real(), s.overlap.imag()}}});
  }
  j["gauge"] = json::array();
  for (const auto& g : report.gauge_rows) {
    j["gauge"].push_back({{"prescription", g.prescription_id},
                          {"rho_trans", g.rho_trans},
                          {"overlap", {g.overlap.real(), g.overlap.imag()}}});
  }
  j["residuals"] = json::array();
  for (const auto& s : report.residuals) {
    j["residuals"].push_back({{"point", s.point}, {"residual", s.residual}});
  }
  j["summary"] = report.summary;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace nqg
