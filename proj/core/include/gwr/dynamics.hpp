#pragma once

#include "gwr/control.hpp"
#include "gwr/graph.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace gwr {

enum class Integrator { euler, rk4 };

enum class TerminalFlag {
  converged,              ///< |e| < err_tol
  incorrect_equilibrium,  ///< |R_W^T e| < grad_tol while |e| >= err_tol
  horizon,                ///< t reached t_max
  degenerate,             ///< a constraint pair collapsed below eps_sep
};

std::string to_string(TerminalFlag flag);
std::string to_string(Integrator integrator);
Integrator parse_integrator(const std::string& name);

struct SimConfig {
  double dt = 1e-3;
  double t_max = 10.0;
  double err_tol = 1e-8;
  double grad_tol = 0.0;  ///< stationarity stop on |R_W^T e|; 0 disables
  Integrator integrator = Integrator::rk4;
  int record_every = 1;
  Gains gains;
  double eps_sep = kDefaultSeparation;
  bool track_rw_rank = true;  ///< SVD per kept step; off for cheap batch runs

  void check() const;  ///< throws InvalidArgument on non-positive dt/t_max/err_tol
};

struct MonitorSample {
  Eigen::VectorXd centroid;
  double scale = 0.0;     ///< sqrt(sum |p_i - p^o|^2 / n)
  int cp_rank = 0;        ///< rank of centered C_p
  int cp_rank_raw = 0;    ///< rank of C_p as stated (uncentered)
  int rw_rank = -1;       ///< -1 when not tracked
  double min_pair_dist = 0.0;
  double potential = 0.0;  ///< V = 1/2 e^T K e
  double grad_norm = 0.0;  ///< |R_W^T e|
};

struct SimulationTrace {
  FrameworkSpec spec;
  SimConfig config;
  std::vector<double> times;
  std::vector<Configuration> positions;
  std::vector<Eigen::VectorXd> errors;
  std::vector<MonitorSample> monitors;
  TerminalFlag flag = TerminalFlag::horizon;
  long steps = 0;  ///< integration steps taken

  bool empty() const noexcept { return times.empty(); }
  const Configuration& final_configuration() const { return positions.back(); }
  double final_error_norm() const { return errors.back().norm(); }
};

/// Integrates p' = -R_W^T K e. A collapse mid-run ends the trace with flag
/// `degenerate`; only an invalid initial configuration throws.
SimulationTrace simulate(const FrameworkSpec& spec, const Configuration& cfg0,
                         const SimConfig& simcfg);

/// Monitors of a single configuration (as recorded by simulate).
MonitorSample monitor_sample(const FrameworkSpec& spec, const Configuration& cfg,
                             const Gains& gains, bool with_rw_rank);

Eigen::VectorXd centroid(const Configuration& cfg);
double formation_scale(const Configuration& cfg);
double centered_spread(const Configuration& cfg);  ///< |p - 1_n kron p^o|

/// max_t |p^o(t) - p^o(0)|.
double monitor_centroid(const SimulationTrace& trace);

/// max_t |p^s(t) - p^s(0)|; InvalidPrecondition when the trace has distances.
double monitor_scale(const SimulationTrace& trace);

/// True iff the centered C_p rank is the same at every kept snapshot.
bool monitor_cp_rank(const SimulationTrace& trace);

/// True iff rw_rank is the same at every kept snapshot (requires tracking).
bool monitor_rw_rank(const SimulationTrace& trace);

/// Pairwise lower bound: |p*_i - p*_j| - sqrt(n)|p(0) - 1 kron p^o| - sum_l |p^o - p*_l| > zeta
/// for all pairs.
bool collision_certificate(const FrameworkSpec& spec, const Configuration& cfg0,
                           const Configuration& desired, double zeta);

/// Number of kept steps where V grew by more than rel_tol * V.
int lyapunov_violations(const SimulationTrace& trace, double rel_tol = 1e-9);

struct LogErrorFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int samples = 0;
};

/// Least-squares line through (t, log|e|) over the decay segment: samples
/// with |e| <= upper_fraction * |e(0)| and |e| >= lower_abs.
LogErrorFit fit_log_error(const SimulationTrace& trace, double upper_fraction = 0.1,
                          double lower_abs = 1e-7);

/// Relative positions z_{i1} = p_i - p_1 (i = 3..n) in a frame whose first
/// axis points along z_21.
std::vector<Eigen::VectorXd> base_frame_offsets(const Configuration& cfg);

/// Solves the scale-invariance quadratic for |z_21| given the invariant
/// |p(0) - 1 kron p^o(0)| and the offsets v in the z_21-aligned frame.
/// With two admissible roots the one closest to `hint` is returned; without
/// a hint AmbiguousRoot is thrown.
/// n = v.size() + 2.
double recover_base_distance(double invariant_spread, const std::vector<Eigen::VectorXd>& v,
                             std::optional<double> hint = std::nullopt);

}  // namespace gwr
