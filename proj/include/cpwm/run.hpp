#pragma once

#include "cpwm/config.hpp"
#include "cpwm/observables.hpp"
#include "cpwm/oracle.hpp"
#include "cpwm/propagators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpwm {

std::shared_ptr<const GridSpec> make_grid(const RunConfig& cfg);

//! CLI-flag overrides layered on top of the config file.
struct RunOverrides {
  bool with_oracle = false;
  std::optional<int> snapshot_stride;
  std::string out_dir;
};

struct RunOutput {
  ScatteringResult result;
  std::optional<OracleResult> oracle;
  std::string result_json; // pretty-printed result document
  int snapshots_written = 0;
  bool stopped_early = false;
};

//! Propagate to t_max and report edge probabilities; writes result.json and
//! snapshot CSVs into the output directory when one is set.
RunOutput execute_run(const RunConfig& cfg, const RunOverrides& ov = {});

//! Propagation + edge probabilities only (no artifacts); used by the
//! convergence cycle and the benchmark driver.
ScatteringResult probabilities_for(const RunConfig& cfg);

//! CSV columns: t, component(+/-), k, x, re_psi, im_psi, r, s.
void write_snapshot_csv(const BipolarState& state, const std::string& path);

struct BenchRow {
  std::string config;
  std::string label;
  double computed = 0, reference = 0, abs_diff = 0, target = 0;
  bool pass = false;
  double wall_time_s = 0;
};

struct BenchReport {
  std::string suite;
  bool pass = true;
  std::vector<BenchRow> rows;
  std::string json;
};

const std::vector<std::string>& bench_suite_names();

//! Runs one named benchmark suite from config files in bench_dir and checks
//! every probability against a reference computed on the spot (closed form
//! where one exists, otherwise the independent integration oracle), plus a
//! unitarity row per run.
BenchReport run_bench_suite(const std::string& suite, const std::string& bench_dir);

std::string convergence_report_json(const ConvergenceReport& rep);

} // namespace cpwm
