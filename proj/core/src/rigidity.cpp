#include "gwr/rigidity.hpp"

#include "gwr/errors.hpp"
#include "kernels.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gwr {

RankResult numerical_rank(const Eigen::MatrixXd& matrix, const RankPolicy& policy) {
  RankResult out;
  if (!matrix.allFinite()) throw InvalidArgument("matrix has non-finite entries");
  if (matrix.size() == 0) {
    out.singular_values = Eigen::VectorXd(0);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values[0] : 0.0;
  if (policy.absolute_tol) {
    out.tolerance = *policy.absolute_tol;
  } else {
    out.tolerance = static_cast<double>(std::max(matrix.rows(), matrix.cols())) *
                    std::numeric_limits<double>::epsilon() * smax;
  }
  for (Eigen::Index k = 0; k < out.singular_values.size(); ++k) {
    if (out.singular_values[k] > out.tolerance) ++out.rank;
  }
  return out;
}

Eigen::VectorXd eval_fw(const FrameworkSpec& spec, const Configuration& cfg, double eps_sep) {
  require_separated(spec, cfg, eps_sep);
  Eigen::VectorXd f(spec.num_constraints());
  int row = 0;
  for (const auto& e : spec.edges) f[row++] = cfg.relative(e.i, e.j).squaredNorm();
  for (const auto& a : spec.angles) {
    const Eigen::VectorXd zi = cfg.relative(a.apex, a.i);
    const Eigen::VectorXd zj = cfg.relative(a.apex, a.j);
    f[row++] = zi.dot(zj) / (zi.norm() * zj.norm());
  }
  return f;
}

WeakRigidityMatrix weak_rigidity_matrix(const FrameworkSpec& spec, const Configuration& cfg,
                                        double eps_sep) {
  require_separated(spec, cfg, eps_sep);
  const int d = spec.d;
  WeakRigidityMatrix r = Eigen::MatrixXd::Zero(spec.num_constraints(), d * spec.n);
  int row = 0;
  for (const auto& e : spec.edges) {
    const Eigen::VectorXd z = cfg.relative(e.i, e.j);
    r.block(row, d * e.i, 1, d) = 2.0 * z.transpose();
    r.block(row, d * e.j, 1, d) = -2.0 * z.transpose();
    ++row;
  }
  for (const auto& a : spec.angles) {
    const auto g = detail::angle_gradient(cfg.relative(a.apex, a.i), cfg.relative(a.apex, a.j));
    r.block(row, d * a.apex, 1, d) = g.apex.transpose();
    r.block(row, d * a.i, 1, d) = g.leg_i.transpose();
    r.block(row, d * a.j, 1, d) = g.leg_j.transpose();
    ++row;
  }
  return r;
}

std::vector<Eigen::MatrixXd> rotation_generators(int d) {
  if (d == 2) {
    Eigen::MatrixXd j0(2, 2);
    j0 << 0, -1, 1, 0;
    return {j0};
  }
  if (d == 3) {
    Eigen::MatrixXd j1(3, 3), j2(3, 3), j3(3, 3);
    j1 << 0, 0, 0, 0, 0, -1, 0, 1, 0;
    j2 << 0, 0, 1, 0, 0, 0, -1, 0, 0;
    j3 << 0, -1, 0, 1, 0, 0, 0, 0, 0;
    return {j1, j2, j3};
  }
  throw InvalidArgument("dimension must be 2 or 3");
}

Eigen::MatrixXd trivial_motion_basis(const Configuration& cfg, bool include_scaling) {
  const int d = cfg.dim();
  const int n = cfg.size();
  if (n < 2) throw InvalidArgument("trivial motion basis needs at least 2 agents");
  const auto gens = rotation_generators(d);
  const int b = d + static_cast<int>(gens.size()) + (include_scaling ? 1 : 0);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(d * n, b);
  for (int i = 0; i < n; ++i) basis.block(d * i, 0, d, d).setIdentity();
  int col = d;
  for (const auto& j : gens) {
    for (int i = 0; i < n; ++i) basis.block(d * i, col, d, 1) = j * cfg.point(i);
    ++col;
  }
  if (include_scaling) basis.col(col) = cfg.vector();
  return basis;
}

int rank_threshold(const FrameworkSpec& spec) {
  const int d = spec.d;
  if (spec.has_distances()) return d * spec.n - d * (d + 1) / 2;
  return d * spec.n - (d * d + d + 2) / 2;
}

int affine_span_rank(const Configuration& cfg, double relative_tol) {
  Eigen::MatrixXd c = cfg.as_columns();
  if (c.cols() == 0) return 0;
  const Eigen::VectorXd centroid = c.rowwise().mean();
  c.colwise() -= centroid;
  const double scale = cfg.as_columns().cwiseAbs().maxCoeff();
  RankPolicy policy;
  policy.absolute_tol = relative_tol * std::max(scale, 1.0);
  return numerical_rank(c, policy).rank;
}

RigidityReport classify(const FrameworkSpec& spec, const Configuration& cfg,
                        const RankPolicy& policy) {
  require_valid(spec);
  const Eigen::MatrixXd r = weak_rigidity_matrix(spec, cfg);
  const RankResult rk = numerical_rank(r, policy);

  RigidityReport rep;
  rep.rank = rk.rank;
  rep.threshold = rank_threshold(spec);
  rep.num_constraints = spec.num_constraints();
  rep.e_empty = !spec.has_distances();
  rep.is_giwr = rep.rank == rep.threshold;
  // Removing any row drops the rank iff the rows are independent, so a GIWR
  // framework is minimal exactly when sigma equals the rank.
  rep.is_minimal = rep.is_giwr && rep.num_constraints == rep.rank;
  rep.singular_values.assign(rk.singular_values.data(),
                             rk.singular_values.data() + rk.singular_values.size());
  rep.sigma_max = rk.singular_values.size() ? rk.singular_values[0] : 0.0;
  rep.rank_tolerance = rk.tolerance;

  const Eigen::MatrixXd basis = trivial_motion_basis(cfg, rep.e_empty);
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    const double nv = basis.col(c).norm();
    if (nv == 0.0) continue;
    rep.trivial_basis_residual =
        std::max(rep.trivial_basis_residual, (r * basis.col(c)).norm() / nv);
  }
  rep.span_rank = affine_span_rank(cfg);
  rep.span_deficient = rep.span_rank < std::min(spec.d, spec.n - 1);
  return rep;
}

DistanceImplication check_distance_rigidity_implication(
    const FrameworkSpec& distance_only, const Configuration& cfg,
    const std::vector<AngleConstraint>& added_angles, const RankPolicy& policy) {
  if (distance_only.num_angles() != 0) {
    throw InvalidArgument("distance-only framework must not carry angle constraints");
  }
  DistanceImplication out;
  const int d = distance_only.d;
  const int full = d * distance_only.n - d * (d + 1) / 2;
  if (distance_only.has_distances()) {
    const Eigen::MatrixXd rd = 0.5 * weak_rigidity_matrix(distance_only, cfg);
    out.premise = numerical_rank(rd, policy).rank == full;
  }
  FrameworkSpec combined = distance_only;
  combined.angles = added_angles;
  out.conclusion = classify(combined, cfg, policy).is_giwr;
  return out;
}

Configuration sample_configuration(const FrameworkSpec& spec, std::mt19937_64& rng,
                                   double half_width, double min_separation) {
  std::uniform_real_distribution<double> coord(-half_width, half_width);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Eigen::VectorXd p(spec.d * spec.n);
    for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = coord(rng);
    Configuration cfg(spec.d, std::move(p));
    if (min_constraint_separation(spec, cfg) > min_separation) return cfg;
  }
  throw InvalidArgument("could not draw a non-degenerate configuration");
}

bool is_regular_point(const FrameworkSpec& spec, const Configuration& cfg, int samples,
                      std::uint64_t seed, const RankPolicy& policy) {
  if (samples <= 0) throw InvalidArgument("regular-point test needs at least one sample");
  require_valid(spec);
  const int here = numerical_rank(weak_rigidity_matrix(spec, cfg), policy).rank;
  std::mt19937_64 rng(seed);
  int best = 0;
  for (int s = 0; s < samples; ++s) {
    const Configuration q = sample_configuration(spec, rng);
    best = std::max(best, numerical_rank(weak_rigidity_matrix(spec, q), policy).rank);
  }
  return here >= best;
}

ConstraintPartition partition_constraints(const FrameworkSpec& spec, const Configuration& cfg,
                                          const RankPolicy& policy) {
  const RigidityReport rep = classify(spec, cfg, policy);
  if (!rep.is_giwr) {
    throw NotGIWR("framework is not GIWR (rank " + std::to_string(rep.rank) + ", threshold " +
                  std::to_string(rep.threshold) + ")");
  }
  const Eigen::MatrixXd r = weak_rigidity_matrix(spec, cfg);
  ConstraintPartition out;
  Eigen::MatrixXd kept(0, r.cols());
  int rank = 0;
  for (int row = 0; row < r.rows(); ++row) {
    Eigen::MatrixXd trial(kept.rows() + 1, r.cols());
    trial << kept, r.row(row);
    const int rk = numerical_rank(trial, policy).rank;
    if (rk > rank) {
      kept = std::move(trial);
      rank = rk;
      out.minimal.push_back(row);
    } else {
      out.remainder.push_back(row);
    }
  }
  return out;
}

Eigen::MatrixXd finite_difference_jacobian(const FrameworkSpec& spec, const Configuration& cfg,
                                           double relative_step) {
  const double h = relative_step * std::max(1.0, cfg.vector().cwiseAbs().maxCoeff());
  Eigen::MatrixXd jac(spec.num_constraints(), cfg.vector().size());
  for (Eigen::Index c = 0; c < jac.cols(); ++c) {
    Configuration plus = cfg, minus = cfg;
    plus.vector()[c] += h;
    minus.vector()[c] -= h;
    jac.col(c) = (eval_fw(spec, plus) - eval_fw(spec, minus)) / (2.0 * h);
  }
  return jac;
}

double jacobian_fd_error(const FrameworkSpec& spec, const Configuration& cfg,
                         const JacobianFn& jacobian) {
  const Eigen::MatrixXd analytic =
      jacobian ? jacobian(spec, cfg) : weak_rigidity_matrix(spec, cfg);
  const Eigen::MatrixXd fd = finite_difference_jacobian(spec, cfg);
  if (analytic.rows() != fd.rows() || analytic.cols() != fd.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  return (analytic - fd).cwiseAbs().maxCoeff();
}

}  // namespace gwr
