#pragma once

#include "gwr/graph.hpp"

#include <Eigen/Core>

#include <map>

namespace gwr {

/// Proportional gains on distance and angle errors (K = diag(gain)).
struct Gains {
  double dist = 1.0;
  double angle = 1.0;
};

/// e = F_W(p) - F_W*: squared-length errors then cosine errors.
Eigen::VectorXd error_vector(const FrameworkSpec& spec, const Configuration& cfg,
                             double eps_sep = kDefaultSeparation);

/// K e.
Eigen::VectorXd weighted_error(const FrameworkSpec& spec, const Eigen::VectorXd& e,
                               const Gains& gains);

/// V = 1/2 e^T K e.
double potential(const FrameworkSpec& spec, const Configuration& cfg, const Gains& gains = {},
                 double eps_sep = kDefaultSeparation);

/// u = -R_W^T K e, accumulated constraint by constraint.
Eigen::VectorXd control_input(const FrameworkSpec& spec, const Configuration& cfg,
                              const Gains& gains = {}, double eps_sep = kDefaultSeparation);

/// Relative positions p_j - p_k seen by one agent, keyed by neighbor index.
using Measurements = std::map<int, Eigen::VectorXd>;

/// Measurements of agent k over its sensing neighbors.
Measurements measure(const FrameworkSpec& spec, const Configuration& cfg, int k);

/// Per-agent law for agent k, built only from its own measurements.
/// The result is expressed in the same frame as `measurements`.
Eigen::VectorXd agent_control_from_measurements(const FrameworkSpec& spec, int k,
                                                const Measurements& measurements,
                                                const Gains& gains = {});

Eigen::VectorXd agent_control_input(const FrameworkSpec& spec, const Configuration& cfg, int k,
                                    const Gains& gains = {});

/// E(p) with u = -(E kron I_d) p. Contributions are scaled by K e.
Eigen::MatrixXd interaction_matrix(const FrameworkSpec& spec, const Configuration& cfg,
                                   const Gains& gains = {}, double eps_sep = kDefaultSeparation);

/// Nine coefficients of p_k, p_i, p_j for one angle (rows: alpha, beta,
/// gamma; columns: k, i, j), unscaled by the error.
Eigen::Matrix3d angle_coefficients(const Eigen::VectorXd& z_ki, const Eigen::VectorXd& z_kj);

}  // namespace gwr
