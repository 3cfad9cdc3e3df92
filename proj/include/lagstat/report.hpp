#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace lagstat {

using Json = nlohmann::ordered_json;

/// %.17g, with nan / inf / -inf spelled out.
std::string format_number(double x);

using Cell = std::variant<double, std::int64_t, std::string>;

/// One CSV file: header line, then one line per row.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::string csv() const;
};

/// A named pass/fail tripwire with the measured value and its bound.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  std::string command;
  Json params = Json::object();  // resolved parameters, defaults filled in
  Json results = Json::object();
  std::vector<Table> tables;
  std::vector<Check> checks;

  void check(const std::string& name, bool pass, const std::string& detail);
  bool passed() const;
  std::vector<std::string> failures() const;
};

/// report.json contents: schema "1", command, version, parameters, results, checks.
Json report_json(const RunResult& r);

/// Sixteen hex digits of FNV-1a over the serialized command, parameters and version.
std::string run_hash(const RunResult& r);

struct WrittenRun {
  std::string dir;
  std::vector<std::string> files;  // relative to dir, manifest.json last
};

/// Writes <out>/<command>-<hash>/ with report.json, one CSV per table and manifest.json. The manifest
/// is the only file holding the wall time. Throws std::runtime_error with the system message on I/O failure.
WrittenRun write_run(const RunResult& r, const std::string& out, double wall_seconds);

}  // namespace lagstat
