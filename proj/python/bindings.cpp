#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nqg/decoherence.hpp"
#include "nqg/diffeo.hpp"
#include "nqg/error.hpp"
#include "nqg/experiment.hpp"
#include "nqg/gauge.hpp"
#include "nqg/io.hpp"
#include "nqg/potential.hpp"
#include "nqg/propagator.hpp"
#include "nqg/scenario.hpp"

namespace py = pybind11;
using namespace nqg;

namespace {

py::array_t<Complex> amplitudes(const WaveFunction& psi) {
  const auto a = psi.amplitudes();
  const auto& g = psi.grid();
  std::vector<py::ssize_t> shape(g.dim(), static_cast<py::ssize_t>(g.n()));
  py::array_t<Complex> out(shape);
  std::copy(a.begin(), a.end(), out.mutable_data());
  return out;
}

WaveFunction from_array(const Grid& grid, py::array_t<Complex, py::array::c_style | py::array::forcecast> a) {
  if (static_cast<std::size_t>(a.size()) != grid.size()) {
    throw InvalidArgument("array size does not match the grid");
  }
  return WaveFunction(grid, std::vector<Complex>(a.data(), a.data() + a.size()));
}

Coord coord(const std::vector<double>& v) {
  if (v.size() > 3) throw InvalidArgument("at most three components");
  Coord c{0.0, 0.0, 0.0};
  std::copy(v.begin(), v.end(), c.begin());
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Branch decoherence on a periodic lattice";

  auto error = py::register_exception<Error>(m, "Error");
  auto invalid = py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<GridMismatch>(m, "GridMismatch", invalid.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", numerical.ptr());
  py::register_exception<PrescriptionMismatch>(m, "PrescriptionMismatch", numerical.ptr());

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, std::size_t, double>(), py::arg("dim"), py::arg("n"), py::arg("length"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("n", &Grid::n)
      .def_property_readonly("length", &Grid::length)
      .def_property_readonly("spacing", &Grid::spacing)
      .def_property_readonly("size", &Grid::size)
      .def("coordinate", &Grid::coordinate)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
      .def("__repr__", [](const Grid& g) {
        return "Grid(dim=" + std::to_string(g.dim()) + ", n=" + std::to_string(g.n()) +
               ", length=" + std::to_string(g.length()) + ")";
      });

  py::class_<WaveFunction>(m, "WaveFunction")
      .def(py::init(&from_array), py::arg("grid"), py::arg("amplitudes"))
      .def_property_readonly("grid", &WaveFunction::grid)
      .def_property_readonly("amplitudes", &amplitudes)
      .def("scaled", &WaveFunction::scaled)
      .def("conjugated", &WaveFunction::conjugated);

  m.def("inner_product", &inner_product);
  m.def("norm", &norm);
  m.def(
      "gaussian_packet",
      [](const Grid& g, const std::vector<double>& center, double width,
         const std::vector<double>& momentum) {
        return gaussian_packet(g, coord(center), width, coord(momentum));
      },
      py::arg("grid"), py::arg("center"), py::arg("width"),
      py::arg("momentum") = std::vector<double>{});
  m.def("position_expectation", &position_expectation);
  m.def("position_spread", &position_spread, py::arg("psi"), py::arg("axis") = 0);
  m.def("save_wavefunction", &save_wavefunction);
  m.def("load_wavefunction", &load_wavefunction);

  py::class_<NewtonianSource>(m, "NewtonianSource")
      .def(py::init([](const std::vector<double>& p, double mass, double softening) {
             return NewtonianSource{coord(p), mass, softening};
           }),
           py::arg("position"), py::arg("mass"), py::arg("softening"));
  py::class_<PotentialField>(m, "PotentialField")
      .def_property_readonly("values",
                             [](const PotentialField& v) {
                               return py::array_t<double>(v.values().size(), v.values().data());
                             })
      .def("max_abs", &PotentialField::max_abs);
  m.def(
      "sample_potential",
      [](const Grid& g, const std::vector<NewtonianSource>& s, double m) {
        return sample_potential(g, s, m);
      },
      py::arg("grid"), py::arg("sources"), py::arg("test_mass"));
  m.def("zero_potential", &zero_potential);
  m.def("evolve", &evolve, py::arg("psi"), py::arg("potential"), py::arg("t_total"),
        py::arg("dt"), py::arg("mass"), py::call_guard<py::gil_scoped_release>());
  m.def("default_time_step", &default_time_step);

  py::class_<BranchPair>(m, "BranchPair")
      .def(py::init([](const WaveFunction& l, const WaveFunction& r) { return BranchPair(l, r); }))
      .def_property_readonly("left", &BranchPair::left)
      .def_property_readonly("right", &BranchPair::right);
  py::class_<DecoherenceResult>(m, "DecoherenceResult")
      .def_readonly("overlap", &DecoherenceResult::overlap)
      .def_readonly("rho_trans", &DecoherenceResult::rho_trans);
  m.def("transition_probability", &transition_probability, py::arg("pair"),
        py::arg("norm_tolerance") = kBranchNormTolerance);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &ScenarioConfig::name)
      .def_property_readonly("n", [](const ScenarioConfig& c) { return c.grid.n; })
      .def_property(
          "source_mass", [](const ScenarioConfig& c) { return c.sources.mass; },
          [](ScenarioConfig& c, double v) { c.sources.mass = v; })
      .def_property(
          "t_total", [](const ScenarioConfig& c) { return c.times.t_total; },
          [](ScenarioConfig& c, double v) { c.times.t_total = v; });
  m.def("parse_scenario", &parse_scenario);
  m.def("load_scenario", &load_scenario);
  m.def("validate", [](const ScenarioConfig& c, const std::string& experiment) {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& f : validate(c, experiment)) {
      out.emplace_back(f.severity == Severity::error ? "error" : "warning", f.field, f.message);
    }
    return out;
  }, py::arg("config"), py::arg("experiment") = "");
  m.def("evolve_branches", &evolve_branches, py::arg("config"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("run_double_slit", &run_double_slit, py::arg("config"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "sweep",
      [](const ScenarioConfig& c, const std::string& param, const std::vector<double>& values,
         int threads) {
        std::vector<std::tuple<double, double, Complex>> rows;
        for (const auto& r : sweep(c, parse_sweep_parameter(param), values, threads)) {
          rows.emplace_back(r.value, r.rho_trans, r.overlap);
        }
        return rows;
      },
      py::arg("config"), py::arg("param"), py::arg("values"), py::arg("threads") = 1);

  py::enum_<BumpProfile>(m, "BumpProfile")
      .value("standard", BumpProfile::standard)
      .value("plateau", BumpProfile::plateau);
  py::class_<HoleDiffeomorphism>(m, "HoleDiffeomorphism")
      .def(py::init([](int dim, const std::vector<double>& c, double r,
                       const std::vector<double>& a, BumpProfile p) {
             return HoleDiffeomorphism(dim, coord(c), r, coord(a), p);
           }),
           py::arg("dim"), py::arg("center"), py::arg("radius"), py::arg("amplitude"),
           py::arg("profile") = BumpProfile::standard)
      .def_static("identity", &HoleDiffeomorphism::identity)
      .def("lipschitz_bound", &HoleDiffeomorphism::lipschitz_bound)
      .def("inverse", &HoleDiffeomorphism::inverse)
      .def("__call__", [](const HoleDiffeomorphism& d, const std::vector<double>& x) {
        return d(coord(x));
      })
      .def("inverse_map", [](const HoleDiffeomorphism& d, const std::vector<double>& y) {
        return d.inverse_map(coord(y));
      });
  m.def(
      "push_forward",
      [](const WaveFunction& psi, const HoleDiffeomorphism& d) { return push_forward(psi, d); },
      py::call_guard<py::gil_scoped_release>());
  m.def("gaussian_support_radius", &gaussian_support_radius);
  m.def("disjoint_deformation_pair",
        [](const std::vector<double>& center, double radius, const Grid& grid) {
          const auto p = disjoint_deformation_pair({coord(center), radius}, grid);
          return py::make_tuple(p.first, p.second);
        });
  py::class_<CovarianceReport>(m, "CovarianceReport")
      .def_readonly("overlap_before", &CovarianceReport::overlap_before)
      .def_readonly("overlap_after", &CovarianceReport::overlap_after)
      .def_readonly("deviation", &CovarianceReport::deviation);
  m.def("weak_covariance_check",
        [](const BranchPair& p, const HoleDiffeomorphism& d) { return weak_covariance_check(p, d); });

  py::class_<MetricField>(m, "MetricField")
      .def_static("minkowski", &MetricField::minkowski)
      .def_static("schwarzschild_standard", &MetricField::schwarzschild_standard)
      .def_static("schwarzschild_harmonic", &MetricField::schwarzschild_harmonic)
      .def("metric", &MetricField::metric)
      .def("density", &MetricField::density);
  m.def("harmonic_residual", &harmonic_residual, py::arg("metric"), py::arg("point"),
        py::arg("h"));

  py::class_<GaugePrescription>(m, "GaugePrescription")
      .def(py::init([](std::string id, const HoleDiffeomorphism& l, const HoleDiffeomorphism& r) {
             return GaugePrescription{std::move(id), l, r, 0.0};
           }),
           py::arg("id"), py::arg("left"), py::arg("right"))
      .def_static("identity", &GaugePrescription::identity, py::arg("dim"),
                  py::arg("id") = "identity")
      .def_readonly("id", &GaugePrescription::id);
  m.def("realign", [](const BranchPair& p, const GaugePrescription& g) { return realign(p, g); });
  m.def("deform", [](const BranchPair& p, const GaugePrescription& g) { return deform(p, g); });
  m.def(
      "compare_gauges",
      [](const ScenarioConfig& c, const std::vector<GaugePrescription>& ps, int threads) {
        std::vector<std::pair<std::string, double>> rows;
        for (const auto& r : compare_gauges(c, ps, threads)) {
          rows.emplace_back(r.prescription_id, r.rho_trans);
        }
        return rows;
      },
      py::arg("config"), py::arg("prescriptions"), py::arg("threads") = 1);

  m.def(
      "run_experiment",
      [](const std::string& experiment, const std::filesystem::path& config,
         const std::filesystem::path& out, int threads, bool independent) {
        ExperimentOptions o;
        o.out_dir = out;
        o.threads = threads;
        o.independent = independent;
        return run_experiment(experiment, config, o).summary;
      },
      py::arg("experiment"), py::arg("config"), py::arg("out"), py::arg("threads") = 1,
      py::arg("independent") = false);

  m.attr("__version__") = version_string();
}
