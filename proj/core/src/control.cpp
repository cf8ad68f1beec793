#include "gwr/control.hpp"

#include "gwr/errors.hpp"
#include "gwr/rigidity.hpp"
#include "kernels.hpp"

namespace gwr {

Eigen::VectorXd error_vector(const FrameworkSpec& spec, const Configuration& cfg,
                             double eps_sep) {
  Eigen::VectorXd e = eval_fw(spec, cfg, eps_sep);
  for (int row = 0; row < spec.num_constraints(); ++row) e[row] -= spec.target(row);
  return e;
}

Eigen::VectorXd weighted_error(const FrameworkSpec& spec, const Eigen::VectorXd& e,
                               const Gains& gains) {
  Eigen::VectorXd ke = e;
  ke.head(spec.num_distances()) *= gains.dist;
  ke.tail(spec.num_angles()) *= gains.angle;
  return ke;
}

double potential(const FrameworkSpec& spec, const Configuration& cfg, const Gains& gains,
                 double eps_sep) {
  const Eigen::VectorXd e = error_vector(spec, cfg, eps_sep);
  return 0.5 * e.dot(weighted_error(spec, e, gains));
}

Eigen::VectorXd control_input(const FrameworkSpec& spec, const Configuration& cfg,
                              const Gains& gains, double eps_sep) {
  require_separated(spec, cfg, eps_sep);
  const int d = spec.d;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(d * spec.n);
  for (const auto& c : spec.edges) {
    const Eigen::VectorXd z = cfg.relative(c.i, c.j);
    const double ke = gains.dist * (z.squaredNorm() - c.target_sq);
    u.segment(d * c.i, d) -= 2.0 * ke * z;
    u.segment(d * c.j, d) += 2.0 * ke * z;
  }
  for (const auto& a : spec.angles) {
    const auto g = detail::angle_gradient(cfg.relative(a.apex, a.i), cfg.relative(a.apex, a.j));
    const double ke = gains.angle * (g.cosine - a.target_cos);
    u.segment(d * a.apex, d) -= ke * g.apex;
    u.segment(d * a.i, d) -= ke * g.leg_i;
    u.segment(d * a.j, d) -= ke * g.leg_j;
  }
  return u;
}

Measurements measure(const FrameworkSpec& spec, const Configuration& cfg, int k) {
  require_compatible(spec, cfg);
  const SensingGraph g = sensing_graph(spec);
  if (k < 0 || k >= spec.n) throw InvalidArgument("agent index out of range");
  Measurements m;
  for (int j : g.neighbors[k]) m[j] = cfg.point(j) - cfg.point(k);
  return m;
}

namespace {

const Eigen::VectorXd& lookup(const Measurements& m, int j, int k) {
  auto it = m.find(j);
  if (it == m.end()) {
    throw InvalidArgument("agent " + std::to_string(k + 1) + " has no measurement of agent " +
                          std::to_string(j + 1));
  }
  return it->second;
}

}  // namespace

Eigen::VectorXd agent_control_from_measurements(const FrameworkSpec& spec, int k,
                                                const Measurements& measurements,
                                                const Gains& gains) {
  require_valid(spec);
  if (k < 0 || k >= spec.n) throw InvalidArgument("agent index out of range");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(spec.d);

  // distance neighbors: z_kj = -(p_j - p_k)
  for (const auto& c : spec.edges) {
    if (c.i != k && c.j != k) continue;
    const int other = c.i == k ? c.j : c.i;
    const Eigen::VectorXd z_kj = -lookup(measurements, other, k);
    u -= 2.0 * gains.dist * (z_kj.squaredNorm() - c.target_sq) * z_kj;
  }

  for (const auto& a : spec.angles) {
    if (a.apex == k) {
      const auto g = detail::angle_gradient(-lookup(measurements, a.i, k),
                                            -lookup(measurements, a.j, k));
      u -= gains.angle * (g.cosine - a.target_cos) * g.apex;
    } else if (a.i == k || a.j == k) {
      // z_{apex,k} = m_apex and z_{apex,other} = m_apex - m_other
      const int other = a.i == k ? a.j : a.i;
      const Eigen::VectorXd& m_apex = lookup(measurements, a.apex, k);
      const Eigen::VectorXd z_other = m_apex - lookup(measurements, other, k);
      const auto g = detail::angle_gradient(m_apex, z_other);
      u -= gains.angle * (g.cosine - a.target_cos) * g.leg_i;
    }
  }
  return u;
}

Eigen::VectorXd agent_control_input(const FrameworkSpec& spec, const Configuration& cfg, int k,
                                    const Gains& gains) {
  require_separated(spec, cfg);
  return agent_control_from_measurements(spec, k, measure(spec, cfg, k), gains);
}

Eigen::Matrix3d angle_coefficients(const Eigen::VectorXd& z_ki, const Eigen::VectorXd& z_kj) {
  const double a = z_ki.norm();
  const double b = z_kj.norm();
  const double c = z_ki.dot(z_kj) / (a * b);
  const double ab = 1.0 / (a * b);
  const double ca = c / (a * a);
  const double cb = c / (b * b);
  Eigen::Matrix3d m;
  m << 2.0 * ab - ca - cb, -ab + ca, -ab + cb,  //
      -ab + ca, -ca, ab,                        //
      -ab + cb, ab, -cb;
  return m;
}

Eigen::MatrixXd interaction_matrix(const FrameworkSpec& spec, const Configuration& cfg,
                                   const Gains& gains, double eps_sep) {
  const Eigen::VectorXd ke = weighted_error(spec, error_vector(spec, cfg, eps_sep), gains);
  Eigen::MatrixXd em = Eigen::MatrixXd::Zero(spec.n, spec.n);
  int row = 0;
  for (const auto& c : spec.edges) {
    const double v = 2.0 * ke[row++];
    em(c.i, c.i) += v;
    em(c.j, c.j) += v;
    em(c.i, c.j) -= v;
    em(c.j, c.i) -= v;
  }
  for (const auto& a : spec.angles) {
    const Eigen::Matrix3d coef =
        angle_coefficients(cfg.relative(a.apex, a.i), cfg.relative(a.apex, a.j));
    const int idx[3] = {a.apex, a.i, a.j};
    const double v = ke[row++];
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) em(idx[r], idx[s]) += v * coef(r, s);
    }
  }
  return em;
}

}  // namespace gwr
