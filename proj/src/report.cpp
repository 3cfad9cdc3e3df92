#include "lagstat/report.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "lagstat/stability.hpp"

namespace lagstat {

namespace {

const char* kSchema = "1";

std::string code_version() {
#ifdef LAGSTAT_VERSION
  return LAGSTAT_VERSION;
#else
  return "unknown";
#endif
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  f << text;
  f.close();
  if (!f) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != header.size()) throw std::invalid_argument("row width does not match the header of " + name);
  rows.push_back(std::move(row));
}

std::string Table::csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += '\n';
  }
  return out;
}

void RunResult::check(const std::string& name, bool pass, const std::string& detail) {
  checks.push_back({name, pass, detail});
}

bool RunResult::passed() const {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> RunResult::failures() const {
  std::vector<std::string> out;
  for (const Check& c : checks)
    if (!c.pass) out.push_back(c.name + ": " + c.detail);
  return out;
}

Json report_json(const RunResult& r) {
  Json j;
  j["schema"] = kSchema;
  j["command"] = r.command;
  j["version"] = code_version();
  j["params"] = r.params;
  j["results"] = r.results;
  Json checks = Json::array();
  for (const Check& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = checks;
  j["passed"] = r.passed();
  Json tables = Json::array();
  for (const Table& t : r.tables) tables.push_back({{"file", t.name + ".csv"}, {"columns", t.header}, {"rows", t.rows.size()}});
  j["tables"] = tables;
  return j;
}

std::string run_hash(const RunResult& r) {
  const std::string key = Json{{"command", r.command}, {"params", r.params}, {"version", code_version()}}.dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key.data(), key.size())));
  return buf;
}

WrittenRun write_run(const RunResult& r, const std::string& out, double wall_seconds) {
  namespace fs = std::filesystem;
  WrittenRun w;
  const fs::path dir = fs::path(out) / (r.command + "-" + run_hash(r));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  w.dir = dir.string();

  write_file(dir / "report.json", report_json(r).dump(2) + "\n");
  w.files.push_back("report.json");
  for (const Table& t : r.tables) {
    write_file(dir / (t.name + ".csv"), t.csv());
    w.files.push_back(t.name + ".csv");
  }

  Json m;
  m["schema"] = kSchema;
  m["command"] = r.command;
  m["version"] = code_version();
  m["hash"] = run_hash(r);
  m["params"] = r.params;
  m["wall_seconds"] = wall_seconds;
  m["passed"] = r.passed();
  m["outputs"] = w.files;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
  w.files.push_back("manifest.json");
  return w;
}

}  // namespace lagstat
