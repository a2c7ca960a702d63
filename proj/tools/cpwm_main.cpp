#include "cpwm/errors.hpp"
#include "cpwm/run.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;

void print_error_json(cpwm::ErrorKind kind, const std::string& message, const std::string& key) {
  json j;
  j["error"]["kind"] = [&] {
    switch (kind) {
      case cpwm::ErrorKind::validation: return "validation";
      case cpwm::ErrorKind::divergence: return "divergence";
      case cpwm::ErrorKind::comparison: return "comparison";
      case cpwm::ErrorKind::nonconvergence: return "nonconvergence";
    }
    return "validation";
  }();
  j["error"]["message"] = message;
  if (!key.empty()) j["error"]["key"] = key;
  std::cout << j.dump() << std::endl;
}

void print_bench_table(const cpwm::BenchReport& rep) {
  std::printf("suite %s\n", rep.suite.c_str());
  std::printf("  %-18s %-24s %14s %14s %10s %10s %-4s %8s\n", "config", "check", "computed",
              "reference", "|diff|", "target", "ok", "wall[s]");
  for (const auto& r : rep.rows)
    std::printf("  %-18s %-24s %14.8g %14.8g %10.3g %10.3g %-4s %8.2f\n", r.config.c_str(),
                r.label.c_str(), r.computed, r.reference, r.abs_diff, r.target,
                r.pass ? "ok" : "FAIL", r.wall_time_s);
  std::printf("  => %s\n", rep.pass ? "pass" : "FAIL");
}

int cmd_run(const std::string& config_path, const cpwm::RunOverrides& ov, bool quiet) {
  cpwm::RunConfig cfg = cpwm::load_config(config_path);
  cpwm::RunOutput out = cpwm::execute_run(cfg, ov);
  if (!quiet) std::cout << out.result_json << std::endl;
  return 0;
}

int cmd_bench(const std::string& suite, const std::string& bench_dir, const std::string& out_dir,
              bool quiet) {
  std::vector<std::string> names;
  if (suite == "all")
    names = cpwm::bench_suite_names();
  else
    names.push_back(suite);

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  int failures = 0;
  std::vector<std::string> failing;
  for (const auto& name : names) {
    cpwm::BenchReport rep = cpwm::run_bench_suite(name, bench_dir);
    if (!quiet) print_bench_table(rep);
    if (!out_dir.empty()) {
      std::ofstream f(std::filesystem::path(out_dir) / (name + ".json"));
      if (!f) cpwm::fail_validation("cannot write benchmark report in " + out_dir);
      f << rep.json << '\n';
    }
    for (const auto& r : rep.rows)
      if (!r.pass) {
        ++failures;
        failing.push_back(name + "/" + r.config + ": " + r.label);
      }
  }
  if (failures > 0) {
    std::string msg = std::to_string(failures) + " benchmark comparison(s) failed:";
    for (const auto& f : failing) msg += " [" + f + "]";
    print_error_json(cpwm::ErrorKind::comparison, msg, "");
    return cpwm::exit_code(cpwm::ErrorKind::comparison);
  }
  return 0;
}

int cmd_converge(const std::string& config_path, const cpwm::ConvergenceTargets& targets,
                 const std::string& out_dir, bool quiet) {
  cpwm::RunConfig cfg = cpwm::load_config(config_path);
  cpwm::ConvergenceReport rep = cpwm::run_convergence_cycle(cfg, targets);
  const std::string text = cpwm::convergence_report_json(rep);
  if (!quiet) std::cout << text << std::endl;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(std::filesystem::path(out_dir) / "convergence.json");
    if (!f) cpwm::fail_validation("cannot write convergence report in " + out_dir);
    f << text << '\n';
  }
  if (!rep.converged) {
    print_error_json(cpwm::ErrorKind::nonconvergence,
                     "targets not met within the cycle cap (" +
                         std::to_string(rep.cycles_used) + " cycles)",
                     "");
    return cpwm::exit_code(cpwm::ErrorKind::nonconvergence);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bipolar counterpropagating-wave scattering calculator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, bench_dir = "benchmarks", suite;
  bool with_oracle = false, quiet = false;
  int snapshot_stride = 0;

  auto* run = app.add_subcommand("run", "propagate one configuration and report probabilities");
  run->add_option("--config", config_path, "config file")->required();
  run->add_flag("--oracle", with_oracle, "attach independent-integration comparison");
  run->add_option("--out", out_dir, "output directory for result.json and snapshots");
  run->add_option("--snapshot-stride", snapshot_stride, "write a field snapshot every K shifts");
  run->add_flag("--quiet", quiet, "suppress stdout result");

  auto* bench = app.add_subcommand("bench", "run a shipped benchmark suite against references");
  bench->add_option("suite", suite, "suite name or 'all'")->required();
  bench->add_option("--bench-dir", bench_dir, "directory with the shipped benchmark configs");
  bench->add_option("--out", out_dir, "directory for per-suite JSON reports");
  bench->add_flag("--quiet", quiet, "suppress the table");

  auto* conv = app.add_subcommand("converge", "run the parameter-convergence cycle");
  double tol_refl = -1, tol_trans = -1;
  int max_cycles = 8;
  conv->add_option("--config", config_path, "base config file")->required();
  conv->add_option("--tol-refl", tol_refl, "target tolerance on P_refl");
  conv->add_option("--tol-trans", tol_trans, "target tolerance on P_trans");
  conv->add_option("--max-cycles", max_cycles, "cycle cap before giving up");
  conv->add_option("--out", out_dir, "output directory for convergence.json");
  conv->add_flag("--quiet", quiet, "suppress stdout report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help
    print_error_json(cpwm::ErrorKind::validation, e.what(), "");
    return cpwm::exit_code(cpwm::ErrorKind::validation);
  }

  try {
    if (run->parsed()) {
      cpwm::RunOverrides ov;
      ov.with_oracle = with_oracle;
      if (snapshot_stride > 0) ov.snapshot_stride = snapshot_stride;
      ov.out_dir = out_dir;
      return cmd_run(config_path, ov, quiet);
    }
    if (bench->parsed()) return cmd_bench(suite, bench_dir, out_dir, quiet);
    if (conv->parsed()) {
      cpwm::ConvergenceTargets targets;
      if (tol_refl > 0) targets.tol_refl = tol_refl;
      if (tol_trans > 0) targets.tol_trans = tol_trans;
      targets.max_cycles = max_cycles;
      return cmd_converge(config_path, targets, out_dir, quiet);
    }
  } catch (const cpwm::Error& e) {
    print_error_json(e.kind, e.what(), e.key);
    return cpwm::exit_code(e.kind);
  } catch (const std::exception& e) {
    print_error_json(cpwm::ErrorKind::validation, e.what(), "");
    return cpwm::exit_code(cpwm::ErrorKind::validation);
  }
  return 0;
}
