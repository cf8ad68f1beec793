#include "gwr/equilibria.hpp"

#include "gwr/control.hpp"
#include "gwr/errors.hpp"
#include "gwr/rigidity.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace gwr {

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::desired: return "desired";
    case EquilibriumKind::incorrect: return "incorrect";
    case EquilibriumKind::not_equilibrium: return "not_equilibrium";
  }
  return "unknown";
}

Eigen::MatrixXd vector_field_jacobian(const FrameworkSpec& spec, const Configuration& cfg,
                                      const Gains& gains) {
  const double h = 1e-5 * (1.0 + cfg.vector().cwiseAbs().maxCoeff());
  const Eigen::Index dim = cfg.vector().size();
  Eigen::MatrixXd j(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Configuration plus = cfg, minus = cfg;
    plus.vector()[c] += h;
    minus.vector()[c] -= h;
    j.col(c) = -(control_input(spec, plus, gains) - control_input(spec, minus, gains)) / (2.0 * h);
  }
  return j;
}

double collinearity_measure(const Configuration& cfg) {
  Eigen::MatrixXd c = cfg.as_columns();
  c.colwise() -= c.rowwise().mean().eval();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
  const Eigen::VectorXd s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0.0;
  return s[s.size() - 1] / s[0];
}

namespace {

std::vector<double> ascending_eigenvalues(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

EquilibriumReport classify_equilibrium(const FrameworkSpec& spec, const Configuration& cfg,
                                       const EquilibriumTolerances& tols, const Gains& gains) {
  EquilibriumReport rep;
  rep.err_norm = error_vector(spec, cfg).norm();
  rep.grad_norm = control_input(spec, cfg).norm();
  if (rep.err_norm < tols.tol_e) {
    rep.kind = EquilibriumKind::desired;
  } else if (rep.grad_norm < tols.tol_g) {
    rep.kind = EquilibriumKind::incorrect;
  }
  rep.collinearity = collinearity_measure(cfg);

  const Eigen::MatrixXd j = vector_field_jacobian(spec, cfg, gains);
  rep.symmetry_residual = (j - j.transpose()).cwiseAbs().maxCoeff();
  rep.symmetry_ok = rep.symmetry_residual <= tols.symmetry * std::max(1.0, j.cwiseAbs().maxCoeff());
  rep.hessian = 0.5 * (j + j.transpose());
  rep.hessian_spectrum = ascending_eigenvalues(rep.hessian);
  rep.min_eig = rep.hessian_spectrum.front();
  rep.near_zero_eigs = static_cast<int>(
      std::count_if(rep.hessian_spectrum.begin(), rep.hessian_spectrum.end(),
                    [&](double v) { return std::abs(v) <= tols.trivial_eig; }));

  // complement of the trivial motions
  const Eigen::MatrixXd basis = trivial_motion_basis(cfg, !spec.has_distances());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.rows());
  const Eigen::Index rest = basis.rows() - basis.cols();
  if (rest > 0) {
    const Eigen::MatrixXd comp = q.rightCols(rest);
    rep.restricted_min_eig = ascending_eigenvalues(comp.transpose() * rep.hessian * comp).front();
  }

  rep.e_matrix_spectrum = ascending_eigenvalues(interaction_matrix(spec, cfg, gains));
  rep.e_matrix_min_eig = rep.e_matrix_spectrum.front();
  return rep;
}

namespace {

void require_planar_triple(const FrameworkSpec& spec) {
  if (spec.n != 3 || spec.d != 2) {
    throw InvalidPrecondition("operation is defined for 3 agents in the plane (got n=" +
                              std::to_string(spec.n) + ", d=" + std::to_string(spec.d) + ")");
  }
}

}  // namespace

bool collinear_equilibrium_check(const FrameworkSpec& spec, const Configuration& cfg,
                                 const EquilibriumTolerances& tols, const Gains& gains) {
  require_planar_triple(spec);
  const EquilibriumReport rep = classify_equilibrium(spec, cfg, tols, gains);
  return rep.kind != EquilibriumKind::incorrect || rep.collinearity <= tols.tol_col;
}

BlockStructure block_structure_check(const FrameworkSpec& spec, const Configuration& cfg,
                                     const EquilibriumTolerances& tols, const Gains& gains) {
  require_planar_triple(spec);
  if (collinearity_measure(cfg) > tols.tol_col) {
    throw NotCollinear("configuration is not collinear");
  }
  Eigen::MatrixXd c = cfg.as_columns();
  c.colwise() -= c.rowwise().mean().eval();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullU);
  const Eigen::Vector2d axis = svd.matrixU().col(0);
  const double ang = std::atan2(axis[1], axis[0]);
  Eigen::Matrix2d rot;
  rot << std::cos(ang), std::sin(ang), -std::sin(ang), std::cos(ang);

  Eigen::VectorXd p(cfg.vector().size());
  for (int i = 0; i < cfg.size(); ++i) p.segment(2 * i, 2) = rot * cfg.point(i);
  BlockStructure out;
  out.aligned = Configuration(2, p);

  const Eigen::MatrixXd j = vector_field_jacobian(spec, out.aligned, gains);
  const Eigen::MatrixXd sym = 0.5 * (j + j.transpose());
  const int n = spec.n;
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(2 * n);
  for (int i = 0; i < n; ++i) {
    perm.indices()[2 * i] = i;          // x_i -> slot i
    perm.indices()[2 * i + 1] = n + i;  // y_i -> slot n + i
  }
  out.permuted = perm * sym * perm.transpose();
  out.j_max = out.permuted.cwiseAbs().maxCoeff();
  out.off_block_residual = out.permuted.topRightCorner(n, n).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd em = interaction_matrix(spec, out.aligned, gains);
  out.e_block_residual = (out.permuted.bottomRightCorner(n, n) - em).cwiseAbs().maxCoeff();
  return out;
}

Configuration draw_trial_configuration(const FrameworkSpec& spec, std::uint64_t seed, int trial,
                                       const BasinOptions& options) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> coord(-options.half_width, options.half_width);
  const int d = spec.d;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Eigen::VectorXd p(d * spec.n);
    if (options.mode == SamplingMode::random) {
      for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = coord(rng);
    } else {
      // A line parallel to the first axis keeps the off-axis coordinates
      // bitwise equal, so round-off cannot push the agents off the line. The
      // flow is rotation invariant, so nothing is lost.
      Eigen::VectorXd offset(d);
      for (int k = 0; k < d; ++k) offset[k] = coord(rng);
      for (int i = 0; i < spec.n; ++i) {
        p.segment(d * i, d) = offset;
        p[d * i] = coord(rng);
      }
    }
    Configuration cfg(d, std::move(p));
    if (min_constraint_separation(spec, cfg) <= options.min_separation) continue;
    if (options.mode == SamplingMode::random && collinearity_measure(cfg) <= options.tol_col) {
      continue;
    }
    return cfg;
  }
  throw InvalidArgument("could not draw an admissible initial configuration");
}

BasinStats monte_carlo_basin(const FrameworkSpec& spec, int trials, std::uint64_t seed,
                             const SimConfig& simcfg, const BasinOptions& options) {
  require_planar_triple(spec);
  require_valid(spec);
  if (trials < 0) throw InvalidArgument("trial count must be non-negative");
  simcfg.check();

  BasinStats stats;
  stats.trials = trials;
  stats.seed = seed;
  stats.half_width = options.half_width;
  stats.mode = options.mode;
  stats.outcomes.resize(static_cast<std::size_t>(trials));

  auto run = [&](int t) {
    TrialOutcome& o = stats.outcomes[static_cast<std::size_t>(t)];
    o.trial = t;
    o.initial = draw_trial_configuration(spec, seed, t, options);
    const SimulationTrace tr = simulate(spec, o.initial, simcfg);
    o.flag = tr.flag;
    o.time = tr.times.back();
    o.final_err = tr.final_error_norm();
    o.final_grad = tr.monitors.back().grad_norm;
    o.cp_rank_constant = monitor_cp_rank(tr);
    o.cp_rank = tr.monitors.front().cp_rank;
    o.final = tr.final_configuration();
  };

  unsigned workers = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max(trials, 1))));
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) run(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int t = static_cast<int>(w); t < trials; t += static_cast<int>(workers)) run(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  double time_sum = 0.0;
  for (const auto& o : stats.outcomes) {
    switch (o.flag) {
      case TerminalFlag::converged:
        ++stats.n_desired;
        time_sum += o.time;
        break;
      case TerminalFlag::incorrect_equilibrium: ++stats.n_incorrect; break;
      case TerminalFlag::horizon: ++stats.n_horizon; break;
      case TerminalFlag::degenerate: ++stats.n_degenerate; break;
    }
  }
  if (stats.n_desired > 0) stats.mean_convergence_time = time_sum / stats.n_desired;
  return stats;
}

}  // namespace gwr
