#include "gwr/dynamics.hpp"

#include "gwr/errors.hpp"
#include "gwr/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gwr {

std::string to_string(TerminalFlag flag) {
  switch (flag) {
    case TerminalFlag::converged: return "converged";
    case TerminalFlag::incorrect_equilibrium: return "incorrect_equilibrium";
    case TerminalFlag::horizon: return "horizon";
    case TerminalFlag::degenerate: return "degenerate";
  }
  return "unknown";
}

std::string to_string(Integrator integrator) {
  return integrator == Integrator::euler ? "euler" : "rk4";
}

Integrator parse_integrator(const std::string& name) {
  if (name == "euler") return Integrator::euler;
  if (name == "rk4") return Integrator::rk4;
  throw InvalidArgument("unknown integrator '" + name + "' (expected euler or rk4)");
}

void SimConfig::check() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be positive");
  if (!(err_tol > 0.0)) throw InvalidArgument("err_tol must be positive");
  if (grad_tol < 0.0) throw InvalidArgument("grad_tol must be non-negative");
  if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
}

Eigen::VectorXd centroid(const Configuration& cfg) {
  return cfg.as_columns().rowwise().mean();
}

double centered_spread(const Configuration& cfg) {
  Eigen::MatrixXd c = cfg.as_columns();
  c.colwise() -= c.rowwise().mean().eval();
  return c.norm();
}

double formation_scale(const Configuration& cfg) {
  return centered_spread(cfg) / std::sqrt(static_cast<double>(cfg.size()));
}

namespace {

int raw_rank(const Configuration& cfg) {
  RankPolicy policy;
  policy.absolute_tol = 1e-9 * std::max(1.0, cfg.vector().cwiseAbs().maxCoeff());
  return numerical_rank(cfg.as_columns(), policy).rank;
}

}  // namespace

MonitorSample monitor_sample(const FrameworkSpec& spec, const Configuration& cfg,
                             const Gains& gains, bool with_rw_rank) {
  MonitorSample m;
  m.centroid = centroid(cfg);
  m.scale = formation_scale(cfg);
  m.cp_rank = affine_span_rank(cfg);
  m.cp_rank_raw = raw_rank(cfg);
  m.min_pair_dist = min_pair_distance(cfg);
  m.potential = potential(spec, cfg, gains);
  m.grad_norm = control_input(spec, cfg).norm();
  if (with_rw_rank) m.rw_rank = numerical_rank(weak_rigidity_matrix(spec, cfg)).rank;
  return m;
}

namespace {

Eigen::VectorXd step(const FrameworkSpec& spec, const Eigen::VectorXd& p, const SimConfig& c) {
  auto f = [&](const Eigen::VectorXd& x) {
    return control_input(spec, Configuration(spec.d, x), c.gains, c.eps_sep);
  };
  if (c.integrator == Integrator::euler) return p + c.dt * f(p);
  const Eigen::VectorXd k1 = f(p);
  const Eigen::VectorXd k2 = f(p + 0.5 * c.dt * k1);
  const Eigen::VectorXd k3 = f(p + 0.5 * c.dt * k2);
  const Eigen::VectorXd k4 = f(p + c.dt * k3);
  return p + (c.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

SimulationTrace simulate(const FrameworkSpec& spec, const Configuration& cfg0,
                         const SimConfig& simcfg) {
  simcfg.check();
  require_valid(spec);
  require_separated(spec, cfg0, simcfg.eps_sep);

  SimulationTrace trace;
  trace.spec = spec;
  trace.config = simcfg;

  auto record = [&](double t, const Configuration& cfg, const Eigen::VectorXd& e) {
    trace.times.push_back(t);
    trace.positions.push_back(cfg);
    trace.errors.push_back(e);
    trace.monitors.push_back(monitor_sample(spec, cfg, simcfg.gains, simcfg.track_rw_rank));
  };
  auto stationary = [&](const Configuration& cfg) {
    return simcfg.grad_tol > 0.0 && control_input(spec, cfg).norm() < simcfg.grad_tol;
  };

  Configuration cfg = cfg0;
  Eigen::VectorXd e = error_vector(spec, cfg, simcfg.eps_sep);
  record(0.0, cfg, e);
  if (e.norm() < simcfg.err_tol) {
    trace.flag = TerminalFlag::converged;
    return trace;
  }
  if (stationary(cfg)) {
    trace.flag = TerminalFlag::incorrect_equilibrium;
    return trace;
  }

  const long total = static_cast<long>(std::ceil(simcfg.t_max / simcfg.dt - 1e-9));
  trace.flag = TerminalFlag::horizon;
  bool recorded_last = true;
  for (long s = 1; s <= total; ++s) {
    Eigen::VectorXd next;
    try {
      next = step(spec, cfg.vector(), simcfg);
      if (!next.allFinite()) throw DegenerateConfiguration("non-finite state");
      Configuration trial(spec.d, next);
      e = error_vector(spec, trial, simcfg.eps_sep);
      if (!e.allFinite()) throw DegenerateConfiguration("non-finite error");
      cfg = std::move(trial);
    } catch (const DegenerateConfiguration&) {
      trace.flag = TerminalFlag::degenerate;
      break;
    }
    trace.steps = s;
    const double t = static_cast<double>(s) * simcfg.dt;
    recorded_last = false;
    if (e.norm() < simcfg.err_tol) {
      trace.flag = TerminalFlag::converged;
    } else if (stationary(cfg)) {
      trace.flag = TerminalFlag::incorrect_equilibrium;
    }
    if (trace.flag != TerminalFlag::horizon || s % simcfg.record_every == 0) {
      record(t, cfg, e);
      recorded_last = true;
    }
    if (trace.flag != TerminalFlag::horizon) break;
  }
  if (!recorded_last) {
    record(static_cast<double>(trace.steps) * simcfg.dt, cfg, e);
  }
  return trace;
}

double monitor_centroid(const SimulationTrace& trace) {
  if (trace.empty()) throw InvalidArgument("empty trace");
  const Eigen::VectorXd& c0 = trace.monitors.front().centroid;
  double worst = 0.0;
  for (const auto& m : trace.monitors) worst = std::max(worst, (m.centroid - c0).norm());
  return worst;
}

double monitor_scale(const SimulationTrace& trace) {
  if (trace.spec.has_distances()) {
    throw InvalidPrecondition("scale is only invariant when there are no distance constraints");
  }
  if (trace.empty()) throw InvalidArgument("empty trace");
  const double s0 = trace.monitors.front().scale;
  double worst = 0.0;
  for (const auto& m : trace.monitors) worst = std::max(worst, std::abs(m.scale - s0));
  return worst;
}

bool monitor_cp_rank(const SimulationTrace& trace) {
  return std::all_of(trace.monitors.begin(), trace.monitors.end(), [&](const MonitorSample& m) {
    return m.cp_rank == trace.monitors.front().cp_rank;
  });
}

bool monitor_rw_rank(const SimulationTrace& trace) {
  if (!trace.empty() && trace.monitors.front().rw_rank < 0) {
    throw InvalidPrecondition("trace was recorded without R_W rank tracking");
  }
  return std::all_of(trace.monitors.begin(), trace.monitors.end(), [&](const MonitorSample& m) {
    return m.rw_rank == trace.monitors.front().rw_rank;
  });
}

bool collision_certificate(const FrameworkSpec& spec, const Configuration& cfg0,
                           const Configuration& desired, double zeta) {
  require_compatible(spec, cfg0);
  require_compatible(spec, desired);
  const int n = spec.n;
  const Eigen::VectorXd po = centroid(cfg0);
  double spread_term = std::sqrt(static_cast<double>(n)) * centered_spread(cfg0);
  for (int l = 0; l < n; ++l) spread_term += (po - desired.point(l)).norm();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((desired.point(i) - desired.point(j)).norm() - spread_term <= zeta) return false;
    }
  }
  return true;
}

int lyapunov_violations(const SimulationTrace& trace, double rel_tol) {
  int count = 0;
  for (std::size_t k = 1; k < trace.monitors.size(); ++k) {
    const double prev = trace.monitors[k - 1].potential;
    if (trace.monitors[k].potential - prev > rel_tol * prev) ++count;
  }
  return count;
}

LogErrorFit fit_log_error(const SimulationTrace& trace, double upper_fraction,
                          double lower_abs) {
  LogErrorFit fit;
  if (trace.empty()) return fit;
  const double e0 = trace.errors.front().norm();
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const double en = trace.errors[k].norm();
    if (en <= upper_fraction * e0 && en >= lower_abs && en > 0.0) {
      ts.push_back(trace.times[k]);
      ys.push_back(std::log(en));
    }
  }
  fit.samples = static_cast<int>(ts.size());
  if (fit.samples < 3) return fit;
  const double nn = static_cast<double>(fit.samples);
  double mt = 0.0, my = 0.0;
  for (int k = 0; k < fit.samples; ++k) {
    mt += ts[k];
    my += ys[k];
  }
  mt /= nn;
  my /= nn;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (int k = 0; k < fit.samples; ++k) {
    stt += (ts[k] - mt) * (ts[k] - mt);
    sty += (ts[k] - mt) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (stt == 0.0) return fit;
  fit.slope = sty / stt;
  fit.intercept = my - fit.slope * mt;
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
  return fit;
}

std::vector<Eigen::VectorXd> base_frame_offsets(const Configuration& cfg) {
  const int n = cfg.size();
  const int d = cfg.dim();
  if (n < 2) throw InvalidArgument("need at least two agents");
  const Eigen::VectorXd z21 = cfg.relative(1, 0);
  const double len = z21.norm();
  if (!(len > 0.0)) throw DegenerateConfiguration("agents 1 and 2 coincide");
  // Householder reflection taking z21/|z21| to the first axis.
  Eigen::VectorXd w = z21 / len;
  w[0] -= 1.0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d);
  if (w.norm() > 1e-12) h -= 2.0 * w * w.transpose() / w.squaredNorm();
  std::vector<Eigen::VectorXd> v;
  for (int i = 2; i < n; ++i) v.push_back(h * cfg.relative(i, 0));
  return v;
}

double recover_base_distance(double invariant_spread, const std::vector<Eigen::VectorXd>& v,
                             std::optional<double> hint) {
  const double n = static_cast<double>(v.size() + 2);
  double q = 0.0, c = 0.0;
  Eigen::VectorXd sum;
  for (const auto& x : v) {
    if (sum.size() == 0) sum = Eigen::VectorXd::Zero(x.size());
    sum += x;
    q += x.squaredNorm();
  }
  const double vv = sum.size() ? sum.squaredNorm() : 0.0;
  if (sum.size()) c = sum[0];
  const double s = invariant_spread * invariant_spread;

  // (1 - 1/n) r^2 - (2c/n) r + (Q - |V|^2/n - S) = 0
  const double a2 = 1.0 - 1.0 / n;
  const double a1 = -2.0 * c / n;
  const double a0 = q - vv / n - s;
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (disc < 0.0) throw NoRealRoot("scale-invariance quadratic has no real root");
  const double sq = std::sqrt(disc);
  // numerically stable pair of roots
  const double qq = -0.5 * (a1 + (a1 >= 0.0 ? sq : -sq));
  double r1 = qq / a2;
  double r2 = qq != 0.0 ? a0 / qq : r1;
  if (r1 > r2) std::swap(r1, r2);
  const bool ok1 = r1 >= 0.0;
  const bool ok2 = r2 >= 0.0;
  if (!ok1 && !ok2) throw NoRealRoot("scale-invariance quadratic has no non-negative root");
  if (ok1 != ok2) return ok2 ? r2 : r1;
  if (r1 == r2) return r1;
  if (hint) return std::abs(r1 - *hint) <= std::abs(r2 - *hint) ? r1 : r2;
  throw AmbiguousRoot("two non-negative roots for |z21|", r1, r2);
}

}  // namespace gwr
