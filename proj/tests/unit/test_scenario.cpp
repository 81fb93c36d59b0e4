#include <filesystem>
#include <string>

#include "doctest.h"
#include "nqg/error.hpp"
#include "nqg/scenario.hpp"
#include "support.hpp"

using namespace nqg;

namespace {

const char* kRegression = R"(# double slit
[scenario]
name = reg

[grid]
dim = 1
n = 1024
length = 40

[packet]
center = 0
width = 1

[sources]
x_l = -2
x_r = 2
M = 50
eps = 0.5

[masses]
m = 1

[times]
t_total = 2
dt = 2.5e-4
)";

bool mentions(const std::vector<Finding>& findings, const std::string& field,
              Severity severity = Severity::error) {
  for (const auto& f : findings) {
    if (f.field == field && f.severity == severity) return true;
  }
  return false;
}

std::string expect_parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

}  // namespace

TEST_CASE("parse the regression scenario") {
  const auto c = parse_scenario(kRegression);
  CHECK(c.name == "reg");
  CHECK(c.grid.n == 1024);
  CHECK(c.sources.left[0] == -2.0);
  CHECK(c.sources.mass == 50.0);
  CHECK(c.times.dt.value() == 2.5e-4);
  CHECK(c.step_count() == 8000);
  CHECK(validate(c).empty());
}

TEST_CASE("parse vectors, prescriptions and metrics") {
  const auto c = parse_scenario(R"(
[grid]
dim = 2
n = 128
length = 40
[packet]
center = 0.5, -1
momentum = 1, 0
[sources]
x_l = -2, 0
x_r = 2, 0
[deformation]
center = 0, 0
radius = 3
amplitude = 0.5, 0.25
profile = plateau
[prescription:a]
right_center = 1, 0
right_radius = 2
right_amplitude = 0.2, 0
[metric]
family = weak_field_newtonian
radii = 2, 5
source_velocity = 0.1, 0, 0
linearized = false
)");
  CHECK(c.packet.center[1] == -1.0);
  CHECK(c.deformation->profile == BumpProfile::plateau);
  REQUIRE(c.prescriptions.size() == 1);
  CHECK(c.prescriptions[0].id == "a");
  CHECK_FALSE(c.prescriptions[0].left.has_value());
  CHECK(c.prescriptions[0].right->radius == 2.0);
  CHECK(c.metric->radii == std::vector<double>{2.0, 5.0});
  CHECK_FALSE(c.metric->linearized);
}

TEST_CASE("parse errors name the field") {
  CHECK(expect_parse_error("[grid]\nsize = 3\n").find("grid.size") != std::string::npos);
  CHECK(expect_parse_error("[gird]\nn = 3\n").find("gird") != std::string::npos);
  CHECK(expect_parse_error("[grid]\nn = abc\n").find("grid.n") != std::string::npos);
  CHECK(expect_parse_error("[packet]\ncenter = 1, 2\n").find("packet.center") !=
        std::string::npos);
  CHECK(expect_parse_error("[grid]\nn\n").find("line") != std::string::npos);
  CHECK(expect_parse_error("[deformation]\nprofile = boxy\n").find("boxy") != std::string::npos);
}

TEST_CASE("validator") {
  auto c = testing::regression_config();
  CHECK(validate(c).empty());

  SUBCASE("under-resolved width") {
    c.grid.n = 64;
    CHECK(mentions(validate(c), "packet.width"));
  }
  SUBCASE("degenerate sources") {
    c.sources.right = c.sources.left;
    CHECK(mentions(validate(c), "sources.x_l"));
  }
  SUBCASE("non power of two") {
    c.grid.n = 1000;
    CHECK(mentions(validate(c), "grid"));
  }
  SUBCASE("packet near the boundary") {
    c.packet.center = {15, 0, 0};
    CHECK(mentions(validate(c), "packet.center"));
  }
  SUBCASE("packet disperses into the boundary") {
    c.times.t_total = 20.0;
    c.times.dt = 1e-3;
    CHECK(mentions(validate(c), "grid.length"));
  }
  SUBCASE("softening below spacing") {
    c.sources.softening = 0.01;
    CHECK(mentions(validate(c), "sources.eps"));
  }
  SUBCASE("negative mass") {
    c.sources.mass = -1.0;
    CHECK(mentions(validate(c), "sources.M"));
  }
  SUBCASE("light source is only a warning") {
    c.sources.mass = 5.0;
    const auto f = validate(c);
    CHECK(mentions(f, "sources.M", Severity::warning));
    CHECK_FALSE(has_errors(f));
  }
  SUBCASE("too many steps") {
    c.times.dt = 1e-7;
    CHECK(mentions(validate(c), "times.dt"));
  }
  SUBCASE("large potential phase per step warns") {
    c.times.dt = 2e-2;
    CHECK(mentions(validate(c), "times.dt", Severity::warning));
  }
  SUBCASE("deformation too steep") {
    c.deformation = DeformationSpec{{0, 0, 0}, 1.0, {1.0, 0, 0}, BumpProfile::standard};
    CHECK(mentions(validate(c), "deformation"));
  }
  SUBCASE("deformation across the seam") {
    c.deformation = DeformationSpec{{18, 0, 0}, 3.0, {0.1, 0, 0}, BumpProfile::standard};
    CHECK(mentions(validate(c), "deformation"));
  }
  SUBCASE("prescription ids") {
    c.prescriptions = {{"identity", {}, {}}, {"x", {}, {}}, {"x", {}, {}}};
    CHECK(mentions(validate(c), "prescription:identity"));
    CHECK(mentions(validate(c), "prescription:x"));
  }
  SUBCASE("experiment requirements") {
    CHECK(mentions(validate(c, "covariance"), "deformation"));
    CHECK(mentions(validate(c, "residual"), "metric"));
    CHECK(mentions(validate(c, "covariance-independent"), "grid.length"));
    c.grid = {1, 2048, 80.0};
    CHECK_FALSE(has_errors(validate(c, "covariance-independent")));
  }
  SUBCASE("metric stencil inside the horizon") {
    MetricSpec m;
    m.family = "schwarzschild_standard";
    m.radii = {2.0005};
    c.metric = m;
    CHECK(mentions(validate(c), "metric"));
  }
}

TEST_CASE("shipped scenarios validate cleanly") {
  const std::filesystem::path dir = NQG_SCENARIO_DIR;
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".ini") continue;
    const auto c = load_scenario(entry.path());
    const auto f = validate(c);
    CAPTURE(entry.path().string());
    CHECK(f.empty());
    ++count;
  }
  CHECK(count >= 6);
}
