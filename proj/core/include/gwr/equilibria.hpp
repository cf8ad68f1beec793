#pragma once

#include "gwr/dynamics.hpp"
#include "gwr/graph.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace gwr {

enum class EquilibriumKind { desired, incorrect, not_equilibrium };

std::string to_string(EquilibriumKind kind);

struct EquilibriumTolerances {
  double tol_e = 1e-6;        ///< |e| below this counts as desired
  double tol_g = 1e-8;        ///< |R_W^T e| below this counts as stationary
  double tol_col = 1e-6;      ///< relative collinearity threshold
  double trivial_eig = 1e-6;  ///< |lambda| at or below this is a trivial direction
  double symmetry = 1e-6;     ///< allowed |J - J^T|_max before symmetrizing
};

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::not_equilibrium;
  double grad_norm = 0.0;
  double err_norm = 0.0;
  double collinearity = 0.0;  ///< sigma_min / sigma_max of centered positions
  Eigen::MatrixXd hessian;    ///< symmetrized J(p)
  std::vector<double> hessian_spectrum;  ///< ascending
  double min_eig = 0.0;
  double restricted_min_eig = 0.0;  ///< on the complement of trivial motions
  int near_zero_eigs = 0;
  double symmetry_residual = 0.0;
  bool symmetry_ok = true;
  std::vector<double> e_matrix_spectrum;  ///< ascending
  double e_matrix_min_eig = 0.0;
};

/// Central-difference Jacobian of grad V = R_W^T K e (the negative vector
/// field), step 1e-5 * (1 + |p|_inf). Not symmetrized.
Eigen::MatrixXd vector_field_jacobian(const FrameworkSpec& spec, const Configuration& cfg,
                                      const Gains& gains = {});

/// sigma_min / sigma_max of the centered d x n position matrix.
double collinearity_measure(const Configuration& cfg);

EquilibriumReport classify_equilibrium(const FrameworkSpec& spec, const Configuration& cfg,
                                       const EquilibriumTolerances& tols = {},
                                       const Gains& gains = {});

/// kind == incorrect implies collinear, for n = 3 in the plane.
bool collinear_equilibrium_check(const FrameworkSpec& spec, const Configuration& cfg,
                                 const EquilibriumTolerances& tols = {},
                                 const Gains& gains = {});

struct BlockStructure {
  double off_block_residual = 0.0;  ///< max |J_xy| after alignment
  double j_max = 0.0;               ///< max |J|
  double e_block_residual = 0.0;    ///< max |J_yy - E(p)|
  Eigen::MatrixXd permuted;         ///< J in (x..., y...) order
  Configuration aligned;            ///< cfg rotated onto the x-axis
};

/// Rotates a collinear planar configuration onto the x-axis and compares
/// the coordinate-grouped Jacobian with blkdiag(*, E(p)).
BlockStructure block_structure_check(const FrameworkSpec& spec, const Configuration& cfg,
                                     const EquilibriumTolerances& tols = {},
                                     const Gains& gains = {});

enum class SamplingMode { random, collinear };

struct BasinOptions {
  double half_width = 20.0;
  SamplingMode mode = SamplingMode::random;
  double tol_col = 1e-6;
  double min_separation = 1e-3;
  unsigned threads = 1;  ///< 0 = hardware concurrency
};

struct TrialOutcome {
  int trial = 0;
  TerminalFlag flag = TerminalFlag::horizon;
  double time = 0.0;
  double final_err = 0.0;
  double final_grad = 0.0;
  bool cp_rank_constant = true;
  int cp_rank = 0;
  Configuration initial;
  Configuration final;
};

struct BasinStats {
  int trials = 0;
  std::uint64_t seed = 0;
  int n_desired = 0;
  int n_incorrect = 0;
  int n_horizon = 0;
  int n_degenerate = 0;
  double mean_convergence_time = 0.0;  ///< over desired trials
  double half_width = 0.0;
  SamplingMode mode = SamplingMode::random;
  std::vector<TrialOutcome> outcomes;
};

/// Draws the initial configuration of one trial. Reproducible from
/// (seed, trial) alone.
Configuration draw_trial_configuration(const FrameworkSpec& spec, std::uint64_t seed, int trial,
                                       const BasinOptions& options);

BasinStats monte_carlo_basin(const FrameworkSpec& spec, int trials, std::uint64_t seed,
                             const SimConfig& simcfg, const BasinOptions& options = {});

}  // namespace gwr
