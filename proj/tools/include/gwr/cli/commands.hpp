#pragma once

#include "gwr/rigidity.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace gwr::cli {

struct GlobalOptions {
  std::string out;                    ///< output directory, empty = stdout only
  std::optional<std::uint64_t> seed;  ///< overrides the scenario seed
  bool strict = false;
  std::optional<double> tol_rank;     ///< absolute singular-value cutoff
  std::string format = "json";        ///< json | csv
};

struct SimulateOptions {
  std::optional<double> t_max;
  std::optional<int> record_every;
  std::optional<double> perturb;  ///< start from `desired` displaced by this fraction of its diameter
};

struct MonteCarloOptions {
  int trials = 100;
  bool collinear = false;
  unsigned threads = 1;
  bool details = false;  ///< include per-trial outcomes
};

struct EquilibriumOptions {
  bool settle = false;  ///< simulate first and classify the final configuration
};

int cmd_analyze(const std::string& scenario, const GlobalOptions& g, std::ostream& out,
                std::ostream& err);
int cmd_simulate(const std::string& scenario, const GlobalOptions& g, const SimulateOptions& s,
                 std::ostream& out, std::ostream& err);
int cmd_montecarlo(const std::string& scenario, const GlobalOptions& g,
                   const MonteCarloOptions& m, std::ostream& out, std::ostream& err);
int cmd_check_gradient(const std::string& scenario, int samples, const GlobalOptions& g,
                       std::ostream& out, std::ostream& err);
int cmd_equilibrium(const std::string& scenario, const GlobalOptions& g,
                    const EquilibriumOptions& e, std::ostream& out, std::ostream& err);
int cmd_plotdata(const std::string& trace_dir, const GlobalOptions& g, std::ostream& out,
                 std::ostream& err);
/// Dispatches on the scenario's `experiment` block.
int cmd_run(const std::string& scenario, const GlobalOptions& g, std::ostream& out,
            std::ostream& err);

struct GradientCheck {
  int samples = 0;
  std::uint64_t seed = 0;
  double max_error = 0.0;
  double tolerance = 1e-6;
  bool pass() const noexcept { return max_error <= tolerance; }
};

/// Max analytic-vs-central-difference Jacobian error over `samples` random
/// configurations in [-10, 10]^{dn} (constraint pairs kept at least 1 apart).
/// `jacobian` replaces the analytic matrix, which lets tests inject faults.
GradientCheck check_gradient(const FrameworkSpec& spec, int samples, std::uint64_t seed,
                             const JacobianFn& jacobian = {});

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gwr::cli
