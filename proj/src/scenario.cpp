#include "nqg/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nqg/error.hpp"
#include "nqg/gauge.hpp"
#include "nqg/propagator.hpp"

namespace nqg {

Grid ScenarioConfig::make_grid() const { return Grid(grid.dim, grid.n, grid.length); }

double ScenarioConfig::time_step() const {
  return times.dt ? *times.dt : default_time_step(make_grid(), test_mass);
}

std::size_t ScenarioConfig::step_count() const {
  if (times.t_total <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(times.t_total / time_step() * (1.0 - 1e-12)));
}

std::vector<NewtonianSource> ScenarioConfig::left_sources() const {
  if (sources.mass == 0.0) return {};
  return {NewtonianSource{sources.left, sources.mass, sources.softening}};
}

std::vector<NewtonianSource> ScenarioConfig::right_sources() const {
  if (sources.mass == 0.0) return {};
  return {NewtonianSource{sources.right, sources.mass, sources.softening}};
}

HoleDiffeomorphism make_deformation(const DeformationSpec& spec, int dim) {
  return HoleDiffeomorphism(dim, spec.center, spec.radius, spec.amplitude, spec.profile);
}

namespace {

namespace pt = boost::property_tree;

double parse_number(const std::string& text, const std::string& field) {
  std::string s = text;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw InvalidArgument(field + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, field));
  if (out.empty()) throw InvalidArgument(field + ": empty list");
  return out;
}

Coord parse_vector(const std::string& text, const std::string& field, int components) {
  const auto v = parse_list(text, field);
  if (static_cast<int>(v.size()) != components) {
    throw InvalidArgument(field + ": expected " + std::to_string(components) +
                          " components, got " + std::to_string(v.size()));
  }
  Coord c{0.0, 0.0, 0.0};
  std::copy(v.begin(), v.end(), c.begin());
  return c;
}

bool parse_bool(const std::string& text, const std::string& field) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidArgument(field + ": '" + text + "' is not a boolean");
}

/// Reads one section, rejecting keys it does not know.
class Section {
 public:
  Section(const pt::ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> take(const std::string& key) {
    seen_.insert(key);
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) return *v;
    return std::nullopt;
  }
  std::string field(const std::string& key) const { return name_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (auto v = take(key)) out = parse_number(*v, field(key));
  }
  void vector(const std::string& key, Coord& out, int components) {
    if (auto v = take(key)) out = parse_vector(*v, field(key), components);
  }

  void finish() const {
    for (const auto& [key, value] : tree_) {
      if (!seen_.count(key)) throw InvalidArgument("unknown key " + field(key));
    }
  }

 private:
  const pt::ptree& tree_;
  std::string name_;
  std::set<std::string> seen_;
};

DeformationSpec parse_deformation(Section& s, const std::string& prefix, int dim) {
  DeformationSpec d;
  s.vector(prefix + "center", d.center, dim);
  s.number(prefix + "radius", d.radius);
  s.vector(prefix + "amplitude", d.amplitude, dim);
  if (auto v = s.take(prefix + "profile")) d.profile = parse_bump_profile(*v);
  return d;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  // '#' comment lines are accepted alongside ';'.
  std::stringstream cleaned;
  {
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t");
      if (first != std::string::npos && line[first] == '#') line[first] = ';';
      cleaned << line << '\n';
    }
  }
  pt::ptree tree;
  try {
    pt::read_ini(cleaned, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument("scenario line " + std::to_string(e.line()) + ": " + e.message());
  }

  ScenarioConfig c;
  const pt::ptree empty;
  auto child = [&](const std::string& name) -> const pt::ptree& {
    const auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  {
    Section s(child("scenario"), "scenario");
    if (auto v = s.take("name")) c.name = *v;
    s.finish();
  }
  {
    Section s(child("grid"), "grid");
    double dim = c.grid.dim, n = static_cast<double>(c.grid.n);
    s.number("dim", dim);
    s.number("n", n);
    s.number("length", c.grid.length);
    if (dim != std::floor(dim) || dim < 1 || dim > 3) {
      throw InvalidArgument("grid.dim must be 1, 2 or 3");
    }
    if (n != std::floor(n) || n < 2 || n > 1e9) throw InvalidArgument("grid.n must be an integer >= 2");
    c.grid.dim = static_cast<int>(dim);
    c.grid.n = static_cast<std::size_t>(n);
    s.finish();
  }
  const int dim = c.grid.dim;
  // Defaults for vectors are given along axis 0; trim them to the dimension.
  c.sources.left = {-2.0, 0.0, 0.0};
  c.sources.right = {2.0, 0.0, 0.0};
  {
    Section s(child("packet"), "packet");
    s.vector("center", c.packet.center, dim);
    s.number("width", c.packet.width);
    s.vector("momentum", c.packet.momentum, dim);
    s.finish();
  }
  {
    Section s(child("sources"), "sources");
    s.vector("x_l", c.sources.left, dim);
    s.vector("x_r", c.sources.right, dim);
    s.number("M", c.sources.mass);
    s.number("eps", c.sources.softening);
    s.finish();
  }
  {
    Section s(child("masses"), "masses");
    s.number("m", c.test_mass);
    s.finish();
  }
  {
    Section s(child("times"), "times");
    s.number("t_total", c.times.t_total);
    if (auto v = s.take("dt")) c.times.dt = parse_number(*v, "times.dt");
    s.number("t0", c.times.t0);
    s.finish();
  }
  if (tree.find("deformation") != tree.not_found()) {
    Section s(child("deformation"), "deformation");
    c.deformation = parse_deformation(s, "", dim);
    s.finish();
  }
  if (tree.find("metric") != tree.not_found()) {
    Section s(child("metric"), "metric");
    MetricSpec m;
    if (auto v = s.take("family")) m.family = *v;
    s.number("mass", m.mass);
    s.number("h", m.step);
    if (auto v = s.take("radii")) m.radii = parse_list(*v, s.field("radii"));
    s.vector("direction", m.direction, 3);
    s.vector("source_position", m.source_position, 3);
    s.vector("source_velocity", m.source_velocity, 3);
    s.number("softening", m.softening);
    if (auto v = s.take("linearized")) m.linearized = parse_bool(*v, s.field("linearized"));
    s.finish();
    c.metric = m;
  }
  {
    Section s(child("output"), "output");
    if (auto v = s.take("dir")) c.output_dir = *v;
    s.finish();
  }

  static const std::set<std::string> known{"scenario", "grid",        "packet", "sources",
                                           "masses",   "times",       "deformation",
                                           "metric",   "output"};
  for (const auto& [name, section] : tree) {
    if (name.rfind("prescription:", 0) == 0) {
      Section s(section, name);
      PrescriptionSpec p;
      p.id = name.substr(std::string("prescription:").size());
      if (p.id.empty()) throw InvalidArgument("prescription section needs an id: [prescription:<id>]");
      if (section.find("left_radius") != section.not_found()) {
        p.left = parse_deformation(s, "left_", dim);
      }
      if (section.find("right_radius") != section.not_found()) {
        p.right = parse_deformation(s, "right_", dim);
      }
      s.finish();
      c.prescriptions.push_back(std::move(p));
    } else if (!known.count(name)) {
      if (section.empty() && !section.data().empty()) {
        throw InvalidArgument("key '" + name + "' outside of any section");
      }
      throw InvalidArgument("unknown section [" + name + "]");
    }
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::error; });
}

namespace {

class Collector {
 public:
  void error(std::string field, std::string message) {
    findings.push_back({Severity::error, std::move(field), std::move(message)});
  }
  void warning(std::string field, std::string message) {
    findings.push_back({Severity::warning, std::move(field), std::move(message)});
  }
  /// Runs `check`, turning a library InvalidArgument into a finding.
  template <class F>
  bool guard(const std::string& field, F&& check) {
    try {
      check();
      return true;
    } catch (const InvalidArgument& e) {
      error(field, e.what());
      return false;
    }
  }
  std::vector<Finding> findings;
};

bool finite(const Coord& c) {
  return std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); });
}

void validate_deformation(Collector& out, const std::string& field, const DeformationSpec& spec,
                          const Grid& grid) {
  out.guard(field, [&] { make_deformation(spec, grid.dim()).check_inside(grid); });
}

}  // namespace

std::vector<Finding> validate(const ScenarioConfig& c, std::string_view experiment) {
  Collector out;
  std::optional<Grid> grid;
  out.guard("grid", [&] { grid = c.make_grid(); });
  if (!grid) return out.findings;
  const double h = grid->spacing();
  const double half = 0.5 * grid->length();

  bool masses_ok = true;
  if (!(c.test_mass > 0.0) || !std::isfinite(c.test_mass)) {
    out.error("masses.m", "test mass must be positive");
    masses_ok = false;
  }

  // Packet: resolution, and a free-dispersion bound on the boundary tail
  // at both ends of the run.
  const auto& p = c.packet;
  if (!finite(p.center) || !finite(p.momentum)) out.error("packet", "non-finite packet vector");
  if (!(p.width > 0.0)) {
    out.error("packet.width", "must be positive");
  } else if (p.width < kMinPointsPerWidth * h) {
    std::ostringstream msg;
    msg << "width " << p.width << " < 3 * spacing; needs spacing <= " << p.width / 3.0;
    out.error("packet.width", msg.str());
  } else if (masses_ok && std::isfinite(c.times.t_total) && c.times.t_total >= 0.0) {
    const double t = c.times.t_total;
    const double m = c.test_mass;
    const double w4 = std::pow(p.width, 4);
    const double spread = p.width * std::sqrt(1.0 + t * t / (4.0 * m * m * w4));
    for (int d = 0; d < grid->dim(); ++d) {
      const double start = half - std::abs(p.center[d]);
      const double finish = half - std::abs(p.center[d] + p.momentum[d] * t / m);
      if (start <= 0.0 || packet_tail_amplitude(start, p.width) >= kBoundaryTailLimit) {
        out.error("packet.center", "initial packet amplitude at the boundary exceeds 1e-10 on axis " +
                                       std::to_string(d) + "; enlarge grid.length");
      } else if (finish <= 0.0 || packet_tail_amplitude(finish, spread) >= kBoundaryTailLimit) {
        out.error("grid.length", "freely dispersing packet reaches the boundary (amplitude >= 1e-10) "
                                 "on axis " + std::to_string(d) + " before t_total");
      }
    }
  }

  // Sources.
  const auto& s = c.sources;
  if (!finite(s.left) || !finite(s.right)) out.error("sources", "non-finite source position");
  if (s.left == s.right) {
    out.error("sources.x_l", "x_l equals x_r: degenerate scenario with a single source position");
  }
  for (int d = 0; d < grid->dim(); ++d) {
    if (std::abs(s.left[d]) >= half || std::abs(s.right[d]) >= half) {
      out.error("sources", "source position outside the periodic box");
      break;
    }
  }
  if (!(s.mass >= 0.0) || !std::isfinite(s.mass)) {
    out.error("sources.M", "source mass must be finite and non-negative");
  } else if (s.mass > 0.0) {
    if (!(s.softening >= h)) {
      std::ostringstream msg;
      msg << "softening " << s.softening << " is below the grid spacing " << h;
      out.error("sources.eps", msg.str());
    }
    if (masses_ok && s.mass < 10.0 * c.test_mass) {
      out.warning("sources.M", "source mass is not much greater than the test mass; the "
                               "frozen-source approximation is questionable");
    }
  }

  // Times.
  if (!(c.times.t_total >= 0.0) || !std::isfinite(c.times.t_total)) {
    out.error("times.t_total", "must be finite and non-negative");
  }
  if (c.times.dt && !(*c.times.dt > 0.0 && std::isfinite(*c.times.dt))) {
    out.error("times.dt", "must be positive");
  } else if (masses_ok && std::isfinite(c.times.t_total)) {
    const double dt = c.time_step();
    if (c.times.t_total / dt > kMaxSteps) {
      out.error("times.dt", "t_total / dt exceeds 1e6 steps");
    }
    if (s.mass > 0.0 && s.softening > 0.0 && dt * c.test_mass * s.mass / s.softening > 1.0) {
      out.warning("times.dt", "dt * max|V| > 1; the potential phase per step is not small");
    }
  }

  if (c.deformation) validate_deformation(out, "deformation", *c.deformation, *grid);
  std::set<std::string> ids;
  for (const auto& pr : c.prescriptions) {
    const std::string field = "prescription:" + pr.id;
    if (!ids.insert(pr.id).second) out.error(field, "duplicate prescription id");
    if (pr.id == "identity") out.error(field, "the id 'identity' is reserved");
    if (pr.left) validate_deformation(out, field + ".left", *pr.left, *grid);
    if (pr.right) validate_deformation(out, field + ".right", *pr.right, *grid);
  }

  if (c.metric) {
    const auto& m = *c.metric;
    out.guard("metric", [&] {
      const MetricField field = make_metric(m);
      if (!(m.step > 0.0)) throw InvalidArgument("metric.h must be positive");
      const double dir = std::sqrt(m.direction[0] * m.direction[0] +
                                   m.direction[1] * m.direction[1] +
                                   m.direction[2] * m.direction[2]);
      if (!(dir > 0.0)) throw InvalidArgument("metric.direction must be non-zero");
      for (double r : m.radii) {
        for (int mu = 0; mu < 4; ++mu) {
          for (double sign : {-1.0, 0.0, 1.0}) {
            SpacetimePoint q{0.0, r * m.direction[0] / dir, r * m.direction[1] / dir,
                             r * m.direction[2] / dir};
            q[mu] += sign * m.step;
            if (!field.in_domain(q)) {
              throw InvalidArgument("metric.radii: point at r = " + std::to_string(r) +
                                    " or its finite-difference stencil leaves the valid domain");
            }
          }
        }
      }
    });
  }

  if (experiment == "covariance" && !c.deformation) {
    out.error("deformation", "the covariance experiment needs a [deformation] section");
  }
  if (experiment == "covariance-independent" && p.width > 0.0) {
    const SupportRegion u{p.center, gaussian_support_radius(p.width)};
    const auto geo = disjoint_pair_geometry(u, grid->dim());
    if (!(grid->length() > geo.required_length)) {
      std::ostringstream msg;
      msg << "disjoint deformation pair needs grid.length > " << geo.required_length;
      out.error("grid.length", msg.str());
    }
  }
  if (experiment == "residual" && !c.metric) {
    out.error("metric", "the residual experiment needs a [metric] section");
  }
  return out.findings;
}

}  // namespace nqg
