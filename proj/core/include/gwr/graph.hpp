#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace gwr {

/// Default separation guard for constraint-relevant pairs.
inline constexpr double kDefaultSeparation = 1e-9;

/// Squared-distance constraint between agents i and j (0-based).
struct DistanceConstraint {
  int i = 0;
  int j = 0;
  double target_sq = 0.0;

  friend bool operator==(const DistanceConstraint&, const DistanceConstraint&) = default;
};

/// Cosine constraint on the angle at `apex` subtended by agents i and j.
struct AngleConstraint {
  int apex = 0;
  int i = 0;
  int j = 0;
  double target_cos = 0.0;

  friend bool operator==(const AngleConstraint&, const AngleConstraint&) = default;
};

/// Constraint model of a framework (G, A): vertex count, ambient dimension,
/// distance edges and angle triples with their desired values. Indices are
/// 0-based; the scenario reader converts from the 1-based file format.
///
/// Row order everywhere in the library is all distances (in listed order)
/// followed by all angles (in listed order).
struct FrameworkSpec {
  int n = 0;
  int d = 2;
  std::vector<DistanceConstraint> edges;
  std::vector<AngleConstraint> angles;

  int num_distances() const noexcept { return static_cast<int>(edges.size()); }
  int num_angles() const noexcept { return static_cast<int>(angles.size()); }
  int num_constraints() const noexcept { return num_distances() + num_angles(); }
  bool has_distances() const noexcept { return !edges.empty(); }

  /// Target value for constraint row `row` (squared length or cosine).
  double target(int row) const;

  /// Framework restricted to the listed constraint rows, keeping order.
  FrameworkSpec subset(const std::vector<int>& rows) const;

  /// Framework with one constraint row removed.
  FrameworkSpec without(int row) const;
};

/// Stacked positions p in R^{dn}; agent i occupies entries [d*i, d*i + d).
class Configuration {
 public:
  Configuration() = default;
  Configuration(int d, Eigen::VectorXd p);
  Configuration(int d, const std::vector<std::vector<double>>& points);

  int dim() const noexcept { return d_; }
  int size() const noexcept { return d_ == 0 ? 0 : static_cast<int>(p_.size()) / d_; }
  const Eigen::VectorXd& vector() const noexcept { return p_; }
  Eigen::VectorXd& vector() noexcept { return p_; }

  auto point(int i) const { return p_.segment(d_ * i, d_); }
  auto point(int i) { return p_.segment(d_ * i, d_); }

  /// z_ij = p_i - p_j.
  Eigen::VectorXd relative(int i, int j) const { return point(i) - point(j); }

  /// d x n matrix whose columns are the agent positions (C_p).
  Eigen::MatrixXd as_columns() const;

 private:
  int d_ = 0;
  Eigen::VectorXd p_;
};

/// Undirected sensing graph induced by the constraints: every distance edge
/// and all three sides of every angle triple.
struct SensingGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  ///< canonical (i < j), sorted
  std::vector<std::vector<int>> neighbors;  ///< N^s_k, sorted
  std::vector<std::vector<int>> distance_neighbors;  ///< N^d_k
  std::vector<std::vector<int>> angle_rows_as_apex;  ///< angle indices with apex k
  std::vector<std::vector<int>> angle_rows_as_leg;  ///< angle indices with k as i or j
};

struct Violation {
  std::string code;
  std::string message;
  std::string location;  ///< "edges/<k>" or "angles/<k>" (0-based), empty if global
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const FrameworkSpec& spec);

/// Throws InvalidArgument with the validation summary if the spec is malformed.
void require_valid(const FrameworkSpec& spec);

SensingGraph sensing_graph(const FrameworkSpec& spec);

/// All unordered pairs whose separation must stay positive: distance edges
/// and the two legs (apex-i, apex-j) of every angle.
std::vector<std::pair<int, int>> constraint_pairs(const FrameworkSpec& spec);

/// Smallest distance among `constraint_pairs`.
double min_constraint_separation(const FrameworkSpec& spec, const Configuration& cfg);

/// Throws DegenerateConfiguration if any constraint pair is closer than `eps`.
void require_separated(const FrameworkSpec& spec, const Configuration& cfg,
                       double eps = kDefaultSeparation);

/// Throws InvalidArgument when cfg does not match the spec's n and d.
void require_compatible(const FrameworkSpec& spec, const Configuration& cfg);

/// Smallest distance over all agent pairs.
double min_pair_distance(const Configuration& cfg);

}  // namespace gwr
