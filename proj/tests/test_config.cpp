#include "cpwm/config.hpp"
#include "cpwm/errors.hpp"
#include "cpwm/units.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <string>

using namespace cpwm;
using nlohmann::json;

namespace {

const char* FULL_CFG = R"(# comment line
; alternative comment
scheme = ramp
E = 400 cm-1
N = 23
dt = 0.3
x_L = -2.0
x_R = 2.5
x0 = 0.0
beta = 2.5
t_max = 7474
M = 2

[potential]
kind = sum

[potential.term]
kind = eckart
V0 = 0.0015
alpha = 2.5

[potential.term]
kind = tanh_ramp
V_L = 0
V_R = 400 cm-1
x0 = 0.0
beta = 2.5
)";

std::string drop_line(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line))
    if (line.rfind(key + " =", 0) != 0)
      out += line + "\n";
  return out;
}

} // namespace

TEST_CASE("full config parses with unit conversion and defaults") {
  auto cfg = parse_config_text(FULL_CFG);
  CHECK(cfg.scheme == SchemeKind::ramp);
  CHECK(cfg.E == doctest::Approx(400 * cm1_to_hartree).epsilon(1e-15));
  CHECK(cfg.E == doctest::Approx(1.8225e-3).epsilon(1e-4));
  CHECK(cfg.m == 2000.0); // default mass
  CHECK(cfg.N == 23);
  CHECK(cfg.dt == 0.3);
  CHECK(cfg.x_L == -2.0);
  CHECK(cfg.x_R == 2.5);
  CHECK(cfg.beta == 2.5);
  CHECK(cfg.t_max == 7474.0);
  CHECK(cfg.M == 2);
  CHECK(!cfg.t_shift.has_value());
  CHECK(!cfg.stationarity_tol.has_value());
  CHECK(!cfg.snapshot_stride.has_value());
  CHECK(cfg.out_dir.empty());
  REQUIRE(cfg.potential.kind == PotentialKind::sum);
  REQUIRE(cfg.potential.terms.size() == 2);
  const double x = 0.7;
  CHECK(cfg.potential.evaluate(x) == doctest::Approx(cfg.potential.terms[0].evaluate(x) +
                                                     cfg.potential.terms[1].evaluate(x))
                                          .epsilon(1e-15));
}

TEST_CASE("every required key is enforced by name") {
  for (const char* key : {"scheme", "E", "N", "dt", "x_L", "x_R", "t_max"}) {
    const std::string text = drop_line(FULL_CFG, key);
    try {
      parse_config_text(text);
      FAIL("expected a validation error for missing " << key);
    } catch (const Error& e) {
      CHECK(e.kind == ErrorKind::validation);
      CHECK(e.key == key);
    }
  }
  // ramp needs beta on top of the shared set
  try {
    parse_config_text(drop_line(FULL_CFG, "beta"));
    FAIL("expected a validation error for missing beta");
  } catch (const Error& e) {
    CHECK(e.key == "beta");
  }
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(parse_config_text(std::string(FULL_CFG) + "mystery = 1\n"), Error);
  CHECK_THROWS_AS(parse_config_text(std::string(FULL_CFG) + "just some words\n"), Error);
  CHECK_THROWS_AS(parse_config_text(std::string(FULL_CFG) + "[weird]\n"), Error);
  CHECK_THROWS_AS(parse_config_text(std::string(FULL_CFG) + "[potential\n"), Error);
  std::string bad_scheme = FULL_CFG;
  bad_scheme.replace(bad_scheme.find("ramp"), 4, "warp");
  CHECK_THROWS_AS(parse_config_text(bad_scheme), Error);
  std::string bad_number = FULL_CFG;
  bad_number.replace(bad_number.find("7474"), 4, "7x74");
  CHECK_THROWS_AS(parse_config_text(bad_number), Error);
  std::string frac_N = FULL_CFG;
  frac_N.replace(frac_N.find("N = 23"), 6, "N = 23.4");
  CHECK_THROWS_AS(parse_config_text(frac_N), Error);
  // unit tags only make sense on energies
  std::string dt_unit = FULL_CFG;
  dt_unit.replace(dt_unit.find("dt = 0.3"), 8, "dt = 0.3 cm-1");
  CHECK_THROWS_AS(parse_config_text(dt_unit), Error);
  // term sections need an enclosing sum
  std::string no_sum = FULL_CFG;
  no_sum.replace(no_sum.find("kind = sum"), 10, "kind = eckart");
  CHECK_THROWS_AS(parse_config_text(no_sum), Error);
  // potential section is mandatory
  const std::string whole = FULL_CFG;
  CHECK_THROWS_AS(parse_config_text(whole.substr(0, whole.find("[potential]"))), Error);
  CHECK_THROWS_AS(parse_config_text("[potential.term]\nkind = eckart\n"), Error);
}

TEST_CASE("load_config resolves tabulated files relative to the config") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cpwm_cfg_test";
  fs::create_directories(dir);
  {
    std::ofstream pot(dir / "pot.txt");
    for (int i = 0; i <= 40; ++i) {
      const double x = -2.0 + 0.1 * i;
      pot << x << ' ' << 1e-3 * std::exp(-x * x) << '\n';
    }
  }
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "scheme = constant\nE = 0.002\nN = 20\ndt = 1\n"
           "x_L = -2\nx_R = 2\nt_max = 100\n\n[potential]\nkind = tabulated\nfile = pot.txt\n";
  }
  auto cfg = load_config((dir / "run.cfg").string());
  CHECK(cfg.potential.kind == PotentialKind::tabulated);
  CHECK(!cfg.potential.source_file.empty());
  CHECK(cfg.potential.evaluate(0.0) == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK_THROWS_AS(load_config((dir / "absent.cfg").string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("parameter echo is canonical under re-parsing") {
  // ramp + sum potential
  auto cfg = parse_config_text(FULL_CFG);
  const std::string e1 = echo_params_json(cfg);
  const std::string e2 = echo_params_json(config_from_echo(e1));
  CHECK(e1 == e2);

  // constant + eckart, with the optional fields populated
  RunConfig c;
  c.scheme = SchemeKind::constant_velocity;
  c.potential = PotentialModel::make_eckart(0.011, 1.364, 0.25);
  c.E = 0.011;
  c.N = 25;
  c.dt = 0.046;
  c.x_L = -3.0;
  c.x_R = 2.1;
  c.t_max = 3204.0;
  c.stationarity_tol = 1e-7;
  c.snapshot_stride = 4;
  c.out_dir = "out/run1";
  const std::string f1 = echo_params_json(c);
  const std::string f2 = echo_params_json(config_from_echo(f1));
  CHECK(f1 == f2);

  auto j = json::parse(f1);
  CHECK(j["scheme"] == "constant");
  CHECK(j["N"] == 25);
  CHECK(j["potential"]["kind"] == "eckart");
  CHECK(j["potential"]["center"] == 0.25);
  CHECK(j["snapshot_stride"] == 4);
  CHECK(j["out"] == "out/run1");
  CHECK(!j.contains("beta")); // constant scheme carries no ramp fields
}

TEST_CASE("echo re-parse rejects broken documents") {
  CHECK_THROWS_AS(config_from_echo("not json at all"), Error);
  auto cfg = parse_config_text(FULL_CFG);
  auto j = json::parse(echo_params_json(cfg));
  j.erase("E");
  CHECK_THROWS_AS(config_from_echo(j.dump()), Error);
}
