#pragma once

#include "gwr/graph.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace gwr {

/// Row-stacked Jacobian of F_W: sigma = m + w rows (distances, then angles),
/// d*n columns.
using WeakRigidityMatrix = Eigen::MatrixXd;

/// Numerical-rank policy. By default singular values above
/// max(rows, cols) * eps * sigma_max count; `absolute_tol` overrides that.
struct RankPolicy {
  std::optional<double> absolute_tol;
};

struct RankResult {
  int rank = 0;
  Eigen::VectorXd singular_values;  ///< descending
  double tolerance = 0.0;
};

RankResult numerical_rank(const Eigen::MatrixXd& matrix, const RankPolicy& policy = {});

/// F_W(p): squared edge lengths followed by angle cosines.
Eigen::VectorXd eval_fw(const FrameworkSpec& spec, const Configuration& cfg,
                        double eps_sep = kDefaultSeparation);

/// Analytic weak rigidity matrix. Angle rows use the projection form
/// P_z = (I - z z^T / |z|^2) / |z|.
WeakRigidityMatrix weak_rigidity_matrix(const FrameworkSpec& spec, const Configuration& cfg,
                                        double eps_sep = kDefaultSeparation);

/// Infinitesimal rotation generators: J0 in 2D, J1..J3 in 3D.
std::vector<Eigen::MatrixXd> rotation_generators(int d);

/// Columns: translations (1_n kron I_d), rotations (I_n kron J) p, and p
/// itself when `include_scaling`.
Eigen::MatrixXd trivial_motion_basis(const Configuration& cfg, bool include_scaling);

/// dn - d(d+1)/2 when E is non-empty, dn - (d^2+d+2)/2 otherwise.
int rank_threshold(const FrameworkSpec& spec);

/// Rank of the centered d x n position matrix, i.e. the dimension of the
/// affine span of the agents.
int affine_span_rank(const Configuration& cfg, double relative_tol = 1e-9);

struct RigidityReport {
  int rank = 0;
  int threshold = 0;
  int num_constraints = 0;
  bool is_giwr = false;
  bool is_minimal = false;
  bool e_empty = false;
  std::vector<double> singular_values;
  double sigma_max = 0.0;
  double rank_tolerance = 0.0;
  double trivial_basis_residual = 0.0;  ///< max_v |R_W v| / |v|
  int span_rank = 0;
  bool span_deficient = false;  ///< affine span of p is not all of R^d
};

RigidityReport classify(const FrameworkSpec& spec, const Configuration& cfg,
                        const RankPolicy& policy = {});

struct DistanceImplication {
  bool premise = false;     ///< distance-only framework infinitesimally rigid
  bool conclusion = false;  ///< framework with added angles is GIWR
  bool holds() const noexcept { return !premise || conclusion; }
};

/// Infinitesimal distance rigidity (rank of R_D = 1/2 dD/dp) implies GIWR
/// once any angles are added.
DistanceImplication check_distance_rigidity_implication(
    const FrameworkSpec& distance_only, const Configuration& cfg,
    const std::vector<AngleConstraint>& added_angles, const RankPolicy& policy = {});

/// Uniform draw in [-half_width, half_width]^{dn}, redrawn while any
/// constraint pair is closer than `min_separation`.
Configuration sample_configuration(const FrameworkSpec& spec, std::mt19937_64& rng,
                                   double half_width = 10.0, double min_separation = 1e-3);

/// rank(R_W(cfg)) equals the largest rank seen over `samples` random draws.
bool is_regular_point(const FrameworkSpec& spec, const Configuration& cfg, int samples,
                      std::uint64_t seed, const RankPolicy& policy = {});

struct ConstraintPartition {
  std::vector<int> minimal;    ///< rows of a minimally GIWR sub-framework
  std::vector<int> remainder;  ///< all other rows
};

/// Greedy row selection in listed order; a row is kept iff it raises the
/// rank of the rows kept so far.
ConstraintPartition partition_constraints(const FrameworkSpec& spec, const Configuration& cfg,
                                          const RankPolicy& policy = {});

/// Central-difference Jacobian of F_W with step h * max(1, |p|_inf).
Eigen::MatrixXd finite_difference_jacobian(const FrameworkSpec& spec, const Configuration& cfg,
                                           double relative_step = 1e-6);

using JacobianFn =
    std::function<Eigen::MatrixXd(const FrameworkSpec&, const Configuration&)>;

/// Largest entrywise |analytic - central difference| at cfg.
double jacobian_fd_error(const FrameworkSpec& spec, const Configuration& cfg,
                         const JacobianFn& jacobian = {});

}  // namespace gwr
