#include "gwr/graph.hpp"

#include "gwr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

namespace gwr {

double FrameworkSpec::target(int row) const {
  if (row < 0 || row >= num_constraints()) {
    throw InvalidArgument("constraint row out of range");
  }
  if (row < num_distances()) return edges[row].target_sq;
  return angles[row - num_distances()].target_cos;
}

FrameworkSpec FrameworkSpec::subset(const std::vector<int>& rows) const {
  FrameworkSpec out;
  out.n = n;
  out.d = d;
  for (int row : rows) {
    if (row < 0 || row >= num_constraints()) {
      throw InvalidArgument("constraint row out of range");
    }
    if (row < num_distances()) {
      out.edges.push_back(edges[row]);
    } else {
      out.angles.push_back(angles[row - num_distances()]);
    }
  }
  return out;
}

FrameworkSpec FrameworkSpec::without(int row) const {
  std::vector<int> keep;
  keep.reserve(num_constraints());
  for (int r = 0; r < num_constraints(); ++r) {
    if (r != row) keep.push_back(r);
  }
  return subset(keep);
}

Configuration::Configuration(int d, Eigen::VectorXd p) : d_(d), p_(std::move(p)) {
  if (d_ != 2 && d_ != 3) throw InvalidArgument("dimension must be 2 or 3");
  if (p_.size() % d_ != 0) {
    throw InvalidArgument("position vector length is not a multiple of the dimension");
  }
}

Configuration::Configuration(int d, const std::vector<std::vector<double>>& points) : d_(d) {
  if (d_ != 2 && d_ != 3) throw InvalidArgument("dimension must be 2 or 3");
  p_.resize(static_cast<Eigen::Index>(points.size()) * d_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (static_cast<int>(points[i].size()) != d_) {
      throw InvalidArgument("agent " + std::to_string(i + 1) + " has " +
                            std::to_string(points[i].size()) + " coordinates, expected " +
                            std::to_string(d_));
    }
    for (int c = 0; c < d_; ++c) p_[static_cast<Eigen::Index>(i) * d_ + c] = points[i][c];
  }
}

Eigen::MatrixXd Configuration::as_columns() const {
  return Eigen::Map<const Eigen::MatrixXd>(p_.data(), d_, size());
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) os << "; ";
    os << violations[k].code << ": " << violations[k].message;
  }
  return os.str();
}

namespace {

std::string one_based(int i) { return std::to_string(i + 1); }

}  // namespace

ValidationReport validate(const FrameworkSpec& spec) {
  ValidationReport report;
  std::string loc;
  auto add = [&](std::string code, std::string msg) {
    report.violations.push_back({std::move(code), std::move(msg), loc});
  };

  if (spec.d != 2 && spec.d != 3) add("dimension", "dimension must be 2 or 3");
  if (spec.n < 3) add("vertex_count", "at least 3 vertices are required");
  if (spec.num_constraints() < 1) add("empty", "no distance or angle constraints");

  auto in_range = [&](int v) { return v >= 0 && v < spec.n; };

  std::set<std::pair<int, int>> seen_edges;
  for (std::size_t g = 0; g < spec.edges.size(); ++g) {
    const auto& e = spec.edges[g];
    loc = "edges/" + std::to_string(g);
    const std::string where = "edge #" + std::to_string(g + 1);
    if (!in_range(e.i) || !in_range(e.j)) {
      add("index_range", where + " references a vertex outside [1, n]");
      continue;
    }
    if (e.i == e.j) {
      add("self_loop", where + " joins vertex " + one_based(e.i) + " to itself");
      continue;
    }
    if (!(e.target_sq > 0.0) || !std::isfinite(e.target_sq)) {
      add("edge_target", where + " has non-positive squared-length target");
    }
    auto key = std::minmax(e.i, e.j);
    if (!seen_edges.insert(key).second) {
      add("duplicate_edge", "duplicate edge (" + one_based(key.first) + "," +
                                one_based(key.second) + ")");
    }
  }

  std::set<std::tuple<int, int, int>> seen_angles;
  for (std::size_t h = 0; h < spec.angles.size(); ++h) {
    const auto& a = spec.angles[h];
    loc = "angles/" + std::to_string(h);
    const std::string where = "angle #" + std::to_string(h + 1);
    if (!in_range(a.apex) || !in_range(a.i) || !in_range(a.j)) {
      add("index_range", where + " references a vertex outside [1, n]");
      continue;
    }
    if (a.apex == a.i || a.apex == a.j || a.i == a.j) {
      add("repeated_vertex", where + " must use three distinct vertices");
      continue;
    }
    if (!(a.target_cos > -1.0 && a.target_cos < 1.0)) {
      add("angle_target", where + " cosine target must lie in the open interval (-1, 1)");
    }
    auto legs = std::minmax(a.i, a.j);
    if (!seen_angles.insert({a.apex, legs.first, legs.second}).second) {
      add("duplicate_angle", "duplicate angle at apex " + one_based(a.apex) + " between " +
                                 one_based(legs.first) + " and " + one_based(legs.second));
    }
  }
  return report;
}

void require_valid(const FrameworkSpec& spec) {
  auto report = validate(spec);
  if (!report.ok()) throw InvalidArgument("invalid framework: " + report.summary());
}

SensingGraph sensing_graph(const FrameworkSpec& spec) {
  require_valid(spec);
  std::set<std::pair<int, int>> pairs;
  auto add = [&](int a, int b) { pairs.insert(std::minmax(a, b)); };
  for (const auto& e : spec.edges) add(e.i, e.j);
  for (const auto& a : spec.angles) {
    add(a.i, a.j);
    add(a.apex, a.i);
    add(a.apex, a.j);
  }

  SensingGraph g;
  g.n = spec.n;
  g.edges.assign(pairs.begin(), pairs.end());
  g.neighbors.assign(spec.n, {});
  g.distance_neighbors.assign(spec.n, {});
  g.angle_rows_as_apex.assign(spec.n, {});
  g.angle_rows_as_leg.assign(spec.n, {});
  for (const auto& [a, b] : g.edges) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  }
  for (const auto& e : spec.edges) {
    g.distance_neighbors[e.i].push_back(e.j);
    g.distance_neighbors[e.j].push_back(e.i);
  }
  for (int h = 0; h < spec.num_angles(); ++h) {
    const auto& a = spec.angles[h];
    g.angle_rows_as_apex[a.apex].push_back(h);
    g.angle_rows_as_leg[a.i].push_back(h);
    g.angle_rows_as_leg[a.j].push_back(h);
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
  for (auto& nb : g.distance_neighbors) std::sort(nb.begin(), nb.end());
  return g;
}

std::vector<std::pair<int, int>> constraint_pairs(const FrameworkSpec& spec) {
  std::set<std::pair<int, int>> pairs;
  for (const auto& e : spec.edges) pairs.insert(std::minmax(e.i, e.j));
  for (const auto& a : spec.angles) {
    pairs.insert(std::minmax(a.apex, a.i));
    pairs.insert(std::minmax(a.apex, a.j));
  }
  return {pairs.begin(), pairs.end()};
}

double min_constraint_separation(const FrameworkSpec& spec, const Configuration& cfg) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : constraint_pairs(spec)) {
    best = std::min(best, (cfg.point(a) - cfg.point(b)).norm());
  }
  return best;
}

void require_compatible(const FrameworkSpec& spec, const Configuration& cfg) {
  if (cfg.dim() != spec.d || cfg.size() != spec.n) {
    throw InvalidArgument("configuration has " + std::to_string(cfg.size()) + " agents in R^" +
                          std::to_string(cfg.dim()) + ", framework expects " +
                          std::to_string(spec.n) + " in R^" + std::to_string(spec.d));
  }
}

void require_separated(const FrameworkSpec& spec, const Configuration& cfg, double eps) {
  require_compatible(spec, cfg);
  if (!cfg.vector().allFinite()) throw DegenerateConfiguration("non-finite positions");
  for (const auto& [a, b] : constraint_pairs(spec)) {
    if ((cfg.point(a) - cfg.point(b)).norm() <= eps) {
      throw DegenerateConfiguration("agents " + one_based(a) + " and " + one_based(b) +
                                    " are closer than the separation guard");
    }
  }
}

double min_pair_distance(const Configuration& cfg) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < cfg.size(); ++a) {
    for (int b = a + 1; b < cfg.size(); ++b) {
      best = std::min(best, (cfg.point(a) - cfg.point(b)).norm());
    }
  }
  return best;
}

}  // namespace gwr
