#include "doctest.h"

#include "gwr/errors.hpp"
#include "gwr/scenario.hpp"
#include "gwr/trace_io.hpp"

#include <cmath>
#include <filesystem>
#include <string>

using namespace gwr;
namespace fs = std::filesystem;

namespace {

const char* kTriangle = R"({
  "name": "tri",
  "dimension": 2,
  "agents": [[0, 0], [10, 0], [5, 8]],
  "edges": [{"i": 1, "j": 2, "target_sq": 100}],
  "angles": [
    {"apex": 1, "i": 2, "j": 3, "target_deg": 60},
    {"apex": 3, "i": 1, "j": 2, "target_cos": 0.5}
  ],
  "sim": {"dt": 0.01, "t_max": 5, "gain_dist": 0.01, "integrator": "euler", "seed": 9}
})";

int error_line(const std::string& text, const ParseOptions& opt = {}) {
  try {
    parse_scenario(text, opt);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("parses a valid document with 1-based indices") {
    const Scenario sc = parse_scenario(kTriangle);
    CHECK(sc.name == "tri");
    CHECK(sc.spec.n == 3);
    CHECK(sc.spec.edges[0].i == 0);
    CHECK(sc.spec.edges[0].j == 1);
    CHECK(sc.spec.angles[0].target_cos == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sc.spec.angles[1].apex == 2);
    CHECK(sc.sim.dt == 0.01);
    CHECK(sc.sim.gains.dist == 0.01);
    CHECK(sc.sim.gains.angle == 1.0);
    CHECK(sc.sim.integrator == Integrator::euler);
    CHECK(sc.seed == 9);
    CHECK_FALSE(sc.desired);
    CHECK(sc.warnings.empty());
  }

  TEST_CASE("syntax errors carry the line") {
    const std::string broken = replace(kTriangle, "\"dimension\": 2,", "\"dimension\": 2,,");
    CHECK(error_line(broken) == 3);
  }

  TEST_CASE("validation errors point at the offending entry") {
    CHECK(error_line(replace(kTriangle, "\"target_sq\": 100", "\"target_sq\": -1")) == 5);
    CHECK(error_line(replace(kTriangle, "\"target_cos\": 0.5", "\"target_cos\": 1.0")) == 8);
    CHECK(error_line(replace(kTriangle, "\"apex\": 3", "\"apex\": 7")) == 8);
    CHECK(error_line(replace(kTriangle, "[5, 8]", "[5]")) == 4);
    CHECK(error_line(replace(kTriangle, "[10, 0]", "[0, 0]")) == 4);
    CHECK(error_line(replace(kTriangle, "\"dt\": 0.01", "\"dt\": 0")) == 10);
    CHECK(error_line(replace(kTriangle, "\"euler\"", "\"leapfrog\"")) == 10);
  }

  TEST_CASE("unknown keys: warning by default, error when strict") {
    const std::string extra = replace(kTriangle, "\"name\": \"tri\",", "\"name\": \"tri\", \"colour\": 1,");
    const Scenario sc = parse_scenario(extra);
    REQUIRE(sc.warnings.size() == 1);
    CHECK(sc.warnings[0].find("colour") != std::string::npos);
    ParseOptions strict;
    strict.strict = true;
    CHECK(error_line(extra, strict) == 2);
    CHECK_NOTHROW(parse_scenario(kTriangle, strict));
  }

  TEST_CASE("missing files and non-object documents") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/x.json"), ParseError);
    CHECK_THROWS_AS(parse_scenario("[1, 2]"), ParseError);
    CHECK_THROWS_AS(parse_scenario("{}"), ParseError);
  }

  TEST_CASE("experiment block") {
    const Scenario sc = load_scenario(std::string(GWR_SCENARIO_DIR) + "/sim3.json");
    REQUIRE(sc.experiment);
    CHECK(sc.experiment->type == "montecarlo");
    CHECK(sc.experiment->number("trials") == 100.0);
    CHECK_FALSE(sc.experiment->number("missing"));
  }

  TEST_CASE("every bundled scenario loads strictly") {
    ParseOptions strict;
    strict.strict = true;
    int count = 0;
    for (const auto& entry : fs::directory_iterator(GWR_SCENARIO_DIR)) {
      if (entry.path().extension() != ".json") continue;
      CAPTURE(entry.path().string());
      CHECK_NOTHROW(load_scenario(entry.path().string(), strict));
      ++count;
    }
    CHECK(count >= 14);
  }

  TEST_CASE("perturbation stays within the requested ball") {
    const Scenario sc = parse_scenario(kTriangle);
    const double diam = formation_diameter(sc.initial);
    CHECK(diam == doctest::Approx(10.0));
    const Configuration a = perturbed(sc.initial, 0.05, 4);
    const Configuration b = perturbed(sc.initial, 0.05, 4);
    CHECK(a.vector() == b.vector());
    for (int i = 0; i < 3; ++i) {
      CHECK((a.point(i) - sc.initial.point(i)).norm() <= 0.05 * diam);
    }
    CHECK(perturbed(sc.initial, 0.0, 4).vector() == sc.initial.vector());
    CHECK_THROWS_AS(perturbed(sc.initial, -1.0, 4), InvalidArgument);
  }

  TEST_CASE("trace files round-trip") {
    const Scenario sc = parse_scenario(kTriangle);
    SimConfig c = sc.sim;
    c.record_every = 10;
    const auto tr = simulate(sc.spec, sc.initial, c);
    const fs::path dir = fs::temp_directory_path() / "gwr_trace_roundtrip";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_trace(tr, dir.string());

    const CsvTable pos = read_csv((dir / kPositionsFile).string());
    CHECK(pos.header == std::vector<std::string>{"t", "agent", "x", "y"});
    CHECK(pos.rows.size() == 3 * tr.times.size());
    CHECK(pos.rows.back()[2] == tr.final_configuration().point(2)[0]);
    CHECK(pos.rows.front()[1] == 1.0);

    const CsvTable err = read_csv((dir / kErrorsFile).string());
    CHECK(err.header == std::vector<std::string>{"t", "constraint_id", "error"});
    CHECK(err.rows.size() == 3 * tr.times.size());
    CHECK(err.rows.back()[2] == tr.errors.back()[2]);

    const CsvTable mon = read_csv((dir / kMonitorsFile).string());
    CHECK(mon.rows.size() == tr.times.size());
    CHECK(mon.header.front() == "t");
    CHECK(format_double(0.1) == "0.10000000000000001");
    fs::remove_all(dir);
  }
}
