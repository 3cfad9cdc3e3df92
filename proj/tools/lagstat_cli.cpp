#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lagstat/pipelines.hpp"

using namespace lagstat;

namespace {

struct Flags {
  std::optional<int> p, q, k, pq_max, modes;
  std::optional<double> eps, c, tol;
  std::optional<std::string> grid;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--p", f.p, "cone parameter p");
  app->add_option("--q", f.q, "cone parameter q");
  app->add_option("--k", f.k, "cover multiplicity");
  app->add_option("--pq-max", f.pq_max, "largest p + q in sweeps");
  app->add_option("--modes", f.modes, "largest angular mode");
  app->add_option("--eps", f.eps, "profile width (stability) or band amplitude (graph)");
  app->add_option("--c", f.c, "cutoff parameter");
  app->add_option("--grid", f.grid, "kernel grid NTxNTHETA, or graph cells per side");
  app->add_option("--seed", f.seed, "seed for random banks and noise");
  app->add_option("--tol", f.tol, "certification tolerance");
  app->add_option("--out", f.out, "output root directory")->capture_default_str();
}

RunParams to_params(const Flags& f) {
  RunParams p;
  p.p = f.p;
  p.q = f.q;
  p.k = f.k;
  p.pq_max = f.pq_max;
  p.modes = f.modes;
  p.eps = f.eps;
  p.c = f.c;
  p.grid = f.grid;
  p.seed = f.seed;
  p.tol = f.tol;
  return p;
}

// 0 when every check passes, 1 on a failed check
int run_one(const std::string& name, const Flags& f) {
  const auto start = std::chrono::steady_clock::now();
  const RunResult r = run_command(name, to_params(f));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const WrittenRun w = write_run(r, f.out, wall);
  for (const Check& c : r.checks) std::printf("%s  %-28s %s\n", c.pass ? "pass" : "FAIL", c.name.c_str(), c.detail.c_str());
  std::printf("%s: %s -> %s\n", name.c_str(), r.passed() ? "all checks pass" : "checks failed", w.dir.c_str());
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian cone, stability, kernel, density and graph computations"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::string> names = command_names();
  names.push_back("all");
  for (const std::string& n : names) add_flags(app.add_subcommand(n, n == "all" ? "every command in turn" : "run " + n), flags);
  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd != "all") return run_one(cmd, flags);
    int status = 0;
    for (const std::string& n : command_names()) status |= run_one(n, flags);
    return status;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
