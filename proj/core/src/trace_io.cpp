#include "gwr/trace_io.hpp"

#include "gwr/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gwr {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& dir, const char* name) {
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream out(p);
  if (!out) throw InvalidArgument("cannot write " + p.string());
  return out;
}

}  // namespace

void write_trace(const SimulationTrace& trace, const std::string& dir) {
  const int d = trace.spec.d;
  static const char* axes[] = {"x", "y", "z"};

  auto pos = open_out(dir, kPositionsFile);
  pos << "t,agent";
  for (int c = 0; c < d; ++c) pos << ',' << axes[c];
  pos << '\n';
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const std::string t = format_double(trace.times[k]);
    for (int i = 0; i < trace.spec.n; ++i) {
      pos << t << ',' << i + 1;
      for (int c = 0; c < d; ++c) pos << ',' << format_double(trace.positions[k].point(i)[c]);
      pos << '\n';
    }
  }

  auto err = open_out(dir, kErrorsFile);
  err << "t,constraint_id,error\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const std::string t = format_double(trace.times[k]);
    for (Eigen::Index r = 0; r < trace.errors[k].size(); ++r) {
      err << t << ',' << r + 1 << ',' << format_double(trace.errors[k][r]) << '\n';
    }
  }

  auto mon = open_out(dir, kMonitorsFile);
  mon << "t";
  for (int c = 0; c < d; ++c) mon << ",centroid_" << axes[c];
  mon << ",scale,cp_rank,cp_rank_raw,rw_rank,min_pair_dist,potential,grad_norm\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const auto& m = trace.monitors[k];
    mon << format_double(trace.times[k]);
    for (int c = 0; c < d; ++c) mon << ',' << format_double(m.centroid[c]);
    mon << ',' << format_double(m.scale) << ',' << m.cp_rank << ',' << m.cp_rank_raw << ','
        << m.rw_rank << ',' << format_double(m.min_pair_dist) << ','
        << format_double(m.potential) << ',' << format_double(m.grad_norm) << '\n';
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw ParseError(path + ": missing header", 1);
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": non-numeric cell '" + cell + "'",
                         lineno);
      }
    }
    if (row.size() != table.header.size()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(table.header.size()) + " columns",
                       lineno);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace gwr
