#include "doctest.h"

#include "gwr/errors.hpp"
#include "gwr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace gwr;
using Pts = std::vector<std::vector<double>>;

namespace {

FrameworkSpec triangle_spec() {
  FrameworkSpec s;
  s.n = 3;
  s.edges = {{0, 1, 100.0}};
  s.angles = {{0, 1, 2, 0.5}, {2, 0, 1, 0.5}};
  return s;
}

bool has_code(const ValidationReport& r, const std::string& code) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("reversed duplicate edge is reported") {
    FrameworkSpec s;
    s.n = 3;
    s.edges = {{0, 1, 1.0}, {1, 0, 1.0}};
    const auto r = validate(s);
    CHECK_FALSE(r.ok());
    CHECK(has_code(r, "duplicate_edge"));
    CHECK(r.violations.front().location == "edges/1");
  }

  TEST_CASE("three-agent edge plus two 60 degree angles is valid") {
    const auto r = validate(triangle_spec());
    CHECK(r.ok());
    CHECK(r.summary().empty());
  }

  TEST_CASE("cosine target of exactly one is rejected") {
    FrameworkSpec s = triangle_spec();
    s.angles[0].target_cos = 1.0;
    CHECK(has_code(validate(s), "angle_target"));
    s.angles[0].target_cos = -1.0;
    CHECK(has_code(validate(s), "angle_target"));
  }

  TEST_CASE("other malformed specs") {
    FrameworkSpec s = triangle_spec();
    s.edges[0].target_sq = 0.0;
    CHECK(has_code(validate(s), "edge_target"));

    s = triangle_spec();
    s.edges[0].j = 3;
    CHECK(has_code(validate(s), "index_range"));

    s = triangle_spec();
    s.edges[0].j = 0;
    CHECK(has_code(validate(s), "self_loop"));

    s = triangle_spec();
    s.angles.push_back({0, 2, 1, 0.5});  // legs swapped
    CHECK(has_code(validate(s), "duplicate_angle"));

    s = triangle_spec();
    s.angles[1].i = 2;
    CHECK(has_code(validate(s), "repeated_vertex"));

    s = triangle_spec();
    s.n = 2;
    CHECK(has_code(validate(s), "vertex_count"));

    FrameworkSpec empty;
    empty.n = 3;
    CHECK(has_code(validate(empty), "empty"));
    CHECK_THROWS_AS(require_valid(empty), InvalidArgument);
  }

  TEST_CASE("sensing graph of the three-agent mixed spec") {
    const SensingGraph g = sensing_graph(triangle_spec());
    const std::vector<std::pair<int, int>> want{{0, 1}, {0, 2}, {1, 2}};
    CHECK(g.edges == want);
    CHECK(g.distance_neighbors[0] == std::vector<int>{1});
    CHECK(g.angle_rows_as_apex[2] == std::vector<int>{1});
  }

  TEST_CASE("single angle with no distances induces a triangle") {
    FrameworkSpec s;
    s.n = 3;
    s.angles = {{0, 1, 2, 0.1}};
    const std::vector<std::pair<int, int>> want{{0, 1}, {0, 2}, {1, 2}};
    CHECK(sensing_graph(s).edges == want);
  }

  TEST_CASE("one edge and four angles on four agents senses five pairs") {
    FrameworkSpec s;
    s.n = 4;
    s.edges = {{0, 1, 1.0}};
    s.angles = {{1, 2, 0, 0.1}, {2, 0, 1, 0.2}, {0, 2, 3, 0.3}, {3, 0, 2, 0.4}};
    const std::vector<std::pair<int, int>> want{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}};
    CHECK(sensing_graph(s).edges == want);
  }

  TEST_CASE("sensing graph ignores constraint order and is idempotent") {
    FrameworkSpec s;
    s.n = 5;
    s.edges = {{0, 1, 1.0}, {3, 4, 2.0}};
    s.angles = {{1, 2, 0, 0.1}, {2, 3, 4, 0.2}, {4, 0, 2, 0.3}};
    const SensingGraph g = sensing_graph(s);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 10; ++k) {
      FrameworkSpec t = s;
      std::shuffle(t.edges.begin(), t.edges.end(), rng);
      std::shuffle(t.angles.begin(), t.angles.end(), rng);
      const SensingGraph h = sensing_graph(t);
      CHECK(h.edges == g.edges);
      CHECK(h.neighbors == g.neighbors);
    }
    CHECK(sensing_graph(s).edges == g.edges);
    for (int v = 0; v < s.n; ++v) CHECK_FALSE(g.neighbors[v].empty());
  }

  TEST_CASE("separation guard") {
    const FrameworkSpec s = triangle_spec();
    Configuration ok(2, Pts{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.8}});
    CHECK_NOTHROW(require_separated(s, ok));
    Configuration bad(2, Pts{{0.0, 0.0}, {0.0, 0.0}, {0.5, 0.8}});
    CHECK_THROWS_AS(require_separated(s, bad), DegenerateConfiguration);
    Configuration wrong(2, Pts{{0.0, 0.0}, {1.0, 0.0}});
    CHECK_THROWS_AS(require_separated(s, wrong), InvalidArgument);
    CHECK(min_constraint_separation(s, ok) == doctest::Approx(std::sqrt(0.25 + 0.64)));
  }

  TEST_CASE("configuration layout") {
    Configuration c(3, Pts{{1, 2, 3}, {4, 5, 6}});
    CHECK(c.size() == 2);
    CHECK(c.point(1)[2] == 6.0);
    CHECK(c.relative(0, 1)[0] == -3.0);
    CHECK(c.as_columns()(1, 1) == 5.0);
    CHECK_THROWS_AS(Configuration(2, Pts{{1, 2, 3}}), InvalidArgument);
    CHECK_THROWS_AS(Configuration(4, Eigen::VectorXd::Zero(8)), InvalidArgument);
  }

  TEST_CASE("subset keeps row order") {
    const FrameworkSpec s = triangle_spec();
    const FrameworkSpec t = s.subset({2, 0});
    CHECK(t.num_distances() == 1);
    CHECK(t.num_angles() == 1);
    CHECK(t.angles[0] == s.angles[1]);
    CHECK(s.without(0).num_distances() == 0);
    CHECK(s.target(1) == 0.5);
    CHECK_THROWS_AS(s.target(3), InvalidArgument);
  }
}
