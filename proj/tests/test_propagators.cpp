#include "cpwm/errors.hpp"
#include "cpwm/observables.hpp"
#include "cpwm/propagators.hpp"
#include "cpwm/units.hpp"

#include <cmath>
#include <complex>
#include <doctest.h>
#include <memory>
#include <optional>
#include <random>

using namespace cpwm;
using cd = std::complex<double>;

namespace {
const double V0_A = 400 * cm1_to_hartree;
const double MASS = 2000.0;

PotentialModel zero_potential() {
  return PotentialModel::make_tabulated({-2.0, -1.0, 1.0, 2.0}, {0.0, 0.0, 0.0, 0.0});
}
} // namespace

TEST_CASE("dividing-point matching satisfies continuity and flux conservation") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), vel(0.2, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const cd Lp(amp(rng), amp(rng)), Rm(amp(rng), amp(rng));
    const double vL = vel(rng), vR = vel(rng);
    const auto [Lm, Rp] = matching_at_dividing_point(Lp, Rm, vL, vR);
    CHECK(std::abs((Lp + Lm) - (Rp + Rm)) < 1e-14);
    CHECK(std::abs(vL * (Lp - Lm) - vR * (Rp - Rm)) < 1e-14);
    const double flux_in = vL * std::norm(Lp) + vR * std::norm(Rm);
    const double flux_out = vL * std::norm(Lm) + vR * std::norm(Rp);
    CHECK(std::abs(flux_in - flux_out) < 1e-12);
    CHECK(std::abs(Rp - (2.0 * vL * Lp + (vR - vL) * Rm) / (vL + vR)) < 1e-15);
    CHECK(std::abs(Lm - ((vL - vR) * Lp + 2.0 * vR * Rm) / (vL + vR)) < 1e-15);
  }
}

TEST_CASE("dividing-point matching limit cases") {
  const cd a(0.3, -0.7), b(-0.2, 0.5);
  {
    const auto [Lm, Rp] = matching_at_dividing_point(a, b, 1.3, 1.3);
    CHECK(std::abs(Rp - a) < 1e-15);
    CHECK(std::abs(Lm - b) < 1e-15);
  }
  {
    const double vL = 1.5, vR = 0.6;
    const auto [Lm, Rp] = matching_at_dividing_point(a, cd(0, 0), vL, vR);
    CHECK(std::abs(Rp / a - 2 * vL / (vL + vR)) < 1e-15);
    CHECK(std::abs(Lm / a - (vL - vR) / (vL + vR)) < 1e-15);
    // textbook step: incident flux splits exactly
    const double r = std::norm(Lm / a), t = std::norm(Rp / a);
    CHECK(std::abs(vL * (1 - r) - vR * t) < 1e-14);
  }
  {
    const auto [Lm, Rp] = matching_at_dividing_point(cd(0, 0), cd(0, 0), 1.0, 0.5);
    CHECK(Lm == cd(0, 0));
    CHECK(Rp == cd(0, 0));
  }
}

TEST_CASE("free particle keeps unit modulus over ten thousand steps") {
  const double E = 0.002;
  auto g = std::make_shared<GridSpec>(
      build_grid_spec(SchemeKind::constant_velocity, 20, -2.0, 2.0, 10.0, E, MASS, zero_potential()));
  Propagator prop(g, zero_potential());
  auto st = prop.initial_state();
  for (int k = 0; k < 10000; ++k)
    prop.step(st);
  for (int i = 0; i < g->N; ++i) {
    CHECK(std::abs(std::abs(st.fp[i]) - 1.0) < 1e-12);
    CHECK(std::abs(st.fm[i]) < 1e-12);
  }
}

TEST_CASE("exterior points only rotate, whatever the potential") {
  auto V = PotentialModel::make_eckart(V0_A, 3.0, 0.0);
  auto g = std::make_shared<GridSpec>(
      build_grid_spec(SchemeKind::constant_velocity, 20, -2.5, 2.5, 0.4, V0_A, MASS, V));
  Propagator prop(g, V);
  auto st = prop.initial_state();
  for (int k = 0; k + 1 < g->n; ++k) {
    prop.step(st);
    // the leading + point has outrun the - grid, so it must stay unit modulus
    CHECK(std::abs(std::abs(st.fp.back()) - 1.0) < 1e-12);
  }
}

TEST_CASE("one step changes the plus modulus only at second order") {
  auto V = PotentialModel::make_eckart(V0_A, 3.0, 0.0);
  const double E = V0_A;
  auto g = std::make_shared<GridSpec>(
      build_grid_spec(SchemeKind::constant_velocity, 28, -3.0, 2.5, 0.04, E, MASS, V));
  Propagator prop(g, V);
  auto st = prop.initial_state();
  prop.step(st);
  double worst = 0;
  for (int i = 0; i < g->N; ++i)
    worst = std::max(worst, std::abs(std::norm(st.fp[i]) - 1.0));
  // bound ~ (V dt)^2 + 2 V E dt^2; first-order part is a pure rotation
  const double bound = 3 * (V0_A * g->dt) * (V0_A * g->dt) + 3 * V0_A * E * g->dt * g->dt;
  CHECK(worst < bound);
  CHECK(bound < 1e-7);
}

TEST_CASE("zero propagation time returns the initial condition unchanged") {
  auto V = PotentialModel::make_eckart(V0_A, 3.0, 0.0);
  auto g = std::make_shared<GridSpec>(
      build_grid_spec(SchemeKind::constant_velocity, 12, -2.0, 2.0, 1.0, V0_A, MASS, V));
  Propagator prop(g, V);
  auto st = prop.initial_state();
  const auto ref = prop.initial_state();
  auto out = prop.propagate(st, 0.0);
  CHECK(out.n_steps == 0);
  CHECK(out.t_final == 0.0);
  CHECK(st.t == 0.0);
  for (int i = 0; i < g->N; ++i) {
    CHECK(st.fp[i] == ref.fp[i]);
    CHECK(st.fm[i] == ref.fm[i]);
  }
}

TEST_CASE("propagate runs whole shift cycles and reports them") {
  const double E = 0.002;
  auto g = std::make_shared<GridSpec>(
      build_grid_spec(SchemeKind::constant_velocity, 12, -2.0, 2.0, 30.0, E, MASS, zero_potential()));
  Propagator prop(g, zero_potential());
  auto st = prop.initial_state();
  int shifts = 0;
  PropagateOptions opts;
  opts.edge_samples = 3;
  opts.on_shift = [&](const BipolarState& s) {
    CHECK(s.p == 0);
    ++shifts;
  };
  auto out = prop.propagate(st, 2.5 * g->t_shift, opts);
  CHECK(shifts == 3);
  CHECK(out.n_steps == 3LL * g->n);
  CHECK(out.t_final == doctest::Approx(3 * g->t_shift).epsilon(1e-12));
  CHECK(!out.stopped_early);
}

TEST_CASE("ramp scheme with a flat effective potential reduces to constant velocity") {
  // E chosen so v = 1/4 and dx = 1/4 exactly: every trajectory coordinate is
  // then a dyadic double and both schemes sample V at bit-identical points,
  // leaving only the update-rule difference in the comparison below
  const double E = 62.5;
  const int N = 17, n = 8;
  auto V = PotentialModel::make_eckart(V0_A, 3.0, 0.0);

  EffectivePotential flat{0.0, 0.0, 0.0, 1.0};
  const double v = std::sqrt(2 * E / MASS);
  const double x_L = -2.0, x_R = 2.0;
  const double t_shift = (x_R - x_L) / (N - 1) / v;

  GridSpec rg;
  rg.scheme = SchemeKind::ramp;
  rg.N = N;
  rg.x_L = x_L;
  rg.x_R = x_R;
  rg.dt = t_shift / n;
  rg.t_shift = t_shift;
  rg.n = n;
  rg.E = E;
  rg.m = MASS;
  rg.V_asym_L = rg.V_asym_R = 0.0;
  rg.v = rg.v_L = rg.v_R = v;
  rg.veff = flat;
  rg.table = std::make_shared<TrajectoryTable>(
      precompute_trajectory(flat, E, MASS, x_L, x_R, rg.dt, N, n));
  rg.x_R_arrival = rg.table->x_at(static_cast<long long>(N - 1) * n);
  rg.base.resize(N);
  for (int i = 0; i < N; ++i)
    rg.base[i] = rg.table->x_at(static_cast<long long>(i) * n);

  auto cg = std::make_shared<GridSpec>(build_grid_spec(
      SchemeKind::constant_velocity, N, x_L, x_R, t_shift / (n - 0.5), E, MASS, V));
  REQUIRE(cg->n == n);
  REQUIRE(cg->dt == doctest::Approx(rg.dt).epsilon(1e-14));

  Propagator pr(std::make_shared<GridSpec>(rg), V);
  Propagator pc(cg, V);
  auto sr = pr.initial_state();
  auto sc = pc.initial_state();

  // the initial conditions agree up to the incident-wave phase at x_L plus
  // the quadrature rounding stored in the trajectory table's action
  const cd offset = std::polar(1.0, -MASS * v * x_L / hbar);
  for (int i = 0; i < N; ++i) {
    CHECK(std::abs(sr.fp[i] - sc.fp[i] * offset) < 1e-10);
    CHECK(std::abs(sr.fm[i] - sc.fm[i] * offset) < 1e-10);
  }

  // start both schemes from identical field values: with V_eff == 0 every
  // update factor must coincide, so the divergence per step is pure rounding
  sr.fp = sc.fp;
  sr.fm = sc.fm;
  double worst_rate = 0.0;
  for (int j = 1; j < n; ++j) { // stop before the shift re-injects
    pr.step(sr);
    pc.step(sc);
    double d = 0.0;
    for (int i = 0; i < N; ++i)
      d = std::max({d, std::abs(sr.fp[i] - sc.fp[i]), std::abs(sr.fm[i] - sc.fm[i])});
    worst_rate = std::max(worst_rate, d / j);
  }
  CHECK(worst_rate < 1e-14);
}

TEST_CASE("field updates are linear in the field values") {
  auto V = PotentialModel::make_eckart(V0_A, 3.0, 0.0);
  auto g = std::make_shared<GridSpec>(
      build_grid_spec(SchemeKind::constant_velocity, 14, -2.0, 2.0, 4.0, V0_A, MASS, V));
  Propagator prop(g, V);
  auto a = prop.initial_state();
  auto b = prop.initial_state();
  const double scale = 2.0;
  for (int i = 0; i < g->N; ++i)
    b.fp[i] *= scale;
  for (int j = 0; j + 1 < g->n; ++j) { // stop before the shift re-injects
    prop.step(a);
    prop.step(b);
  }
  for (int i = 0; i < g->N; ++i) {
    CHECK(std::abs(b.fp[i] - scale * a.fp[i]) < 1e-13);
    CHECK(std::abs(b.fm[i] - scale * a.fm[i]) < 1e-13);
  }
}

TEST_CASE("blow-up is reported as a divergence error") {
  auto V = PotentialModel::make_eckart(0.011, 1.364, 0.0);
  const double E = 1.1e-6; // extreme mismatch: V dt of order 100 radians
  auto g = std::make_shared<GridSpec>(
      build_grid_spec(SchemeKind::constant_velocity, 10, -2.0, 2.0, 9000.0, E, MASS, V));
  Propagator prop(g, V);
  auto st = prop.initial_state();
  try {
    prop.propagate(st, 100 * g->t_shift);
    FAIL("expected a divergence error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::divergence);
  }
}

TEST_CASE("stationarity tolerance stops the relaxation early") {
  auto V = PotentialModel::make_eckart(V0_A, 3.0, 0.0);
  auto g = std::make_shared<GridSpec>(
      build_grid_spec(SchemeKind::constant_velocity, 13, -2.0, 1.5, 0.081, V0_A, MASS, V));
  Propagator prop(g, V);
  auto st = prop.initial_state();
  PropagateOptions opts;
  opts.stationarity_tol = 1e-5;
  opts.edge_samples = 2;
  auto out = prop.propagate(st, 12000.0, opts);
  CHECK(out.stopped_early);
  CHECK(out.t_final < 12000.0);
  CHECK(out.t_final == doctest::Approx(out.n_steps * g->dt).epsilon(1e-10));
  auto res = edge_probabilities(st, g->v, g->v, 2);
  CHECK(std::abs(res.p_refl - 0.283358) < 1e-3);
}

TEST_CASE("summed continuity residual shrinks at first order in the time step") {
  auto V = PotentialModel::make_eckart(V0_A, 3.0, 0.0);
  const double E = V0_A;
  const int N = 20;
  const double x_L = -2.5, x_R = 2.5;
  const double v = std::sqrt(2 * E / MASS);
  const double t_shift = (x_R - x_L) / (N - 1) / v;

  auto residual_at = [&](double steps_per_shift) {
    auto g = std::make_shared<GridSpec>(build_grid_spec(
        SchemeKind::constant_velocity, N, x_L, x_R, t_shift / (steps_per_shift - 0.5), E, MASS, V));
    REQUIRE(g->n == static_cast<int>(steps_per_shift));
    Propagator prop(g, V);
    auto st = prop.initial_state();
    std::optional<BipolarState> prev, last;
    PropagateOptions opts;
    opts.edge_samples = 5;
    opts.on_shift = [&](const BipolarState& s) {
      prev = last;
      last = s;
    };
    prop.propagate(st, 60 * t_shift, opts);
    REQUIRE(prev.has_value());
    return continuity_residual(*prev, *last);
  };

  // the residual is c*dt plus a dt-independent spatial floor (~7e-7 at
  // N=20), so the halving ratio is measured where the first-order term
  // still dominates
  const double coarse = residual_at(30);
  const double fine = residual_at(60);
  CHECK(coarse > 0.0);
  CHECK(fine > 0.0);
  const double ratio = coarse / fine;
  CHECK(ratio > 1.7);
  CHECK(ratio < 2.3);
}

TEST_CASE("transmission is mirror symmetric for a reversed potential") {
  const double E = V0_A;
  auto run = [&](double center) {
    auto V = PotentialModel::make_eckart(V0_A, 3.0, center);
    auto g = std::make_shared<GridSpec>(
        build_grid_spec(SchemeKind::constant_velocity, 20, -2.5, 2.5, 0.1, E, MASS, V));
    Propagator prop(g, V);
    auto st = prop.initial_state();
    prop.propagate(st, 10000.0);
    return edge_probabilities(st, g->v, g->v, 4).p_trans;
  };
  const double t_fwd = run(0.3);
  const double t_rev = run(-0.3);
  CHECK(std::abs(t_fwd - t_rev) < 5e-4);
  CHECK(std::abs(t_fwd - 0.716642) < 5e-3);
}
