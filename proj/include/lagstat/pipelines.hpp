#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lagstat/report.hpp"

namespace lagstat {

/// Command-line parameters; unset values take the per-command defaults listed in the README.
struct RunParams {
  std::optional<int> p, q, k;
  std::optional<int> pq_max;
  std::optional<int> modes;
  std::optional<double> eps;
  std::optional<double> c;
  std::optional<std::string> grid;  // "NTxNTHETA" for the kernel, "M" or "MxM" for graphs
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

/// Parses "800x400" or "64"; throws std::invalid_argument.
std::pair<int, int> parse_grid(const std::string& s);

RunResult run_cone(const RunParams& in);
RunResult run_stability(const RunParams& in);
RunResult run_kernel(const RunParams& in);
RunResult run_density(const RunParams& in);
RunResult run_graph(const RunParams& in);

/// Dispatch by name: cone, stability, kernel, density, graph. Throws std::invalid_argument otherwise.
RunResult run_command(const std::string& command, const RunParams& in);
const std::vector<std::string>& command_names();

}  // namespace lagstat
