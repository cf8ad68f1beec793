#pragma once

#include "gwr/dynamics.hpp"

#include <string>
#include <vector>

namespace gwr {

/// File names written by write_trace.
inline constexpr const char* kPositionsFile = "positions.csv";
inline constexpr const char* kErrorsFile = "errors.csv";
inline constexpr const char* kMonitorsFile = "monitors.csv";

/// Writes positions.csv (t,agent,x,y[,z]), errors.csv (t,constraint_id,error)
/// and monitors.csv into `dir`, which must exist. Agent and constraint ids are
/// 1-based. Floats use 17 significant digits.
void write_trace(const SimulationTrace& trace, const std::string& dir);

/// One parsed CSV file: header names and numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Throws ParseError on unreadable files or non-numeric cells.
CsvTable read_csv(const std::string& path);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace gwr
