#pragma once

#include "gwr/dynamics.hpp"
#include "gwr/graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gwr {

/// Optional `experiment` block: a subcommand name and free-form parameters.
/// Parameter values are kept as their JSON text.
struct Experiment {
  std::string type;
  std::map<std::string, std::string> parameters;

  std::optional<double> number(const std::string& key) const;
  std::optional<std::string> text(const std::string& key) const;
};

struct Scenario {
  std::string name;
  std::string description;
  FrameworkSpec spec;
  Configuration initial;
  std::optional<Configuration> desired;  ///< a realization of the targets, if given
  SimConfig sim;
  std::uint64_t seed = 0;
  std::optional<Experiment> experiment;
  std::vector<std::string> warnings;  ///< unknown keys in lax mode
};

struct ParseOptions {
  bool strict = false;  ///< unknown keys are errors instead of warnings
};

/// Parses and validates a scenario document. Indices in the file are
/// 1-based. Errors carry the 1-based source line when one can be located.
Scenario parse_scenario(const std::string& text, const ParseOptions& options = {});

Scenario load_scenario(const std::string& path, const ParseOptions& options = {});

/// Largest pairwise distance between agents.
double formation_diameter(const Configuration& cfg);

/// Each agent displaced uniformly inside a ball of radius
/// fraction * diameter, reproducible from the seed.
Configuration perturbed(const Configuration& cfg, double fraction, std::uint64_t seed);

}  // namespace gwr
