#pragma once

// Per-constraint gradient blocks shared by the rigidity matrix and the
// control law. Internal to gwr_core.

#include <Eigen/Core>

namespace gwr::detail {

struct AngleGradient {
  Eigen::VectorXd apex;
  Eigen::VectorXd leg_i;
  Eigen::VectorXd leg_j;
  double cosine = 0.0;
};

/// Gradient of cos(theta) = z_ki^T z_kj / (|z_ki| |z_kj|) with respect to
/// p_k, p_i, p_j, where z_ki = p_k - p_i and z_kj = p_k - p_j.
///
/// d cos / d p_i = -(z_kj/|z_kj|)^T P_{z_ki}, with P_z v = (v - zhat zhat^T v) / |z|.
inline AngleGradient angle_gradient(const Eigen::Ref<const Eigen::VectorXd>& z_ki,
                                    const Eigen::Ref<const Eigen::VectorXd>& z_kj) {
  const double len_i = z_ki.norm();
  const double len_j = z_kj.norm();
  const Eigen::VectorXd u_i = z_ki / len_i;
  const Eigen::VectorXd u_j = z_kj / len_j;
  const double c = u_i.dot(u_j);

  AngleGradient g;
  g.cosine = c;
  g.leg_i = -(u_j - c * u_i) / len_i;
  g.leg_j = -(u_i - c * u_j) / len_j;
  g.apex = -(g.leg_i + g.leg_j);
  return g;
}

}  // namespace gwr::detail
