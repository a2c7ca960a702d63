#include "cpwm/trajgrid.hpp"

#include "cpwm/errors.hpp"
#include "cpwm/propagators.hpp"
#include "cpwm/units.hpp"

#include <cmath>
#include <fstream>

namespace cpwm {

static double ramp_speed(const EffectivePotential& veff, double E, double m, double x) {
  const double dE = E - evaluate_veff(veff, x).V;
  if (!(dE > 0.0))
    fail_validation("ramp trajectory: turning point (E <= V_eff) inside the range");
  return std::sqrt(2.0 * dE / m);
}

// Adaptive Simpson quadrature of dt = dx / v(x).
static double simpson(const EffectivePotential& veff, double E, double m, double a, double fa,
                      double b, double fb, double fm_, double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double lm = 0.5 * (a + mid), rm = 0.5 * (mid + b);
  const double flm = 1.0 / ramp_speed(veff, E, m, lm);
  const double frm = 1.0 / ramp_speed(veff, E, m, rm);
  const double left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm_);
  const double right = (b - mid) / 6.0 * (fm_ + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(veff, E, m, a, fa, mid, fm_, flm, left, 0.5 * tol, depth - 1) +
         simpson(veff, E, m, mid, fm_, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double traversal_time(const EffectivePotential& veff, double E, double m, double x_L, double x_R) {
  if (veff.is_zero())
    return (x_R - x_L) / std::sqrt(2.0 * E / m);
  const double fa = 1.0 / ramp_speed(veff, E, m, x_L);
  const double fb = 1.0 / ramp_speed(veff, E, m, x_R);
  const double fm_ = 1.0 / ramp_speed(veff, E, m, 0.5 * (x_L + x_R));
  const double whole = (x_R - x_L) / 6.0 * (fa + 4.0 * fm_ + fb);
  const double rough = (x_R - x_L) * std::max(fa, fb);
  return simpson(veff, E, m, x_L, fa, x_R, fb, fm_, whole, 1e-14 * rough, 48);
}

// One classical Runge-Kutta step of (x, s0): dx/dt = v(x), ds0/dt = m v^2.
static void rk4_step(const EffectivePotential& veff, double E, double m, double h, double& x,
                     double& s0) {
  auto vel = [&](double xx) { return ramp_speed(veff, E, m, xx); };
  const double k1 = vel(x);
  const double k2 = vel(x + 0.5 * h * k1);
  const double k3 = vel(x + 0.5 * h * k2);
  const double k4 = vel(x + h * k3);
  x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  s0 += m * h / 6.0 * (k1 * k1 + 2.0 * k2 * k2 + 2.0 * k3 * k3 + k4 * k4);
}

TrajectoryTable precompute_trajectory(const EffectivePotential& veff, double E, double m,
                                      double x_L, double x_R, double dt, int N, int n) {
  if (!(dt > 0.0))
    fail_validation("trajectory table: dt must be > 0");
  (void)x_R;
  TrajectoryTable tab;
  tab.n = n;
  tab.n_pre = n;
  tab.dt = dt;
  // power of two so dt subdivides without rounding; for a flat effective
  // potential the tabulated positions then stay exact dyadic values
  const int substeps = 128;
  tab.delta = dt / substeps;
  const long long last = static_cast<long long>(N) * n;
  const std::size_t total = static_cast<std::size_t>(last + tab.n_pre + 1);
  tab.x.resize(total);
  tab.v.resize(total);
  tab.Veff.resize(total);
  tab.dVeff.resize(total);
  tab.d2Veff.resize(total);
  tab.C.resize(total);
  tab.s0.resize(total);

  auto record = [&](long long slot, double x, double s0) {
    const auto w = evaluate_veff(veff, x);
    const std::size_t i = tab.idx(slot);
    tab.x[i] = x;
    tab.v[i] = std::sqrt(2.0 * (E - w.V) / m); // v from x keeps energy exact
    tab.Veff[i] = w.V;
    tab.dVeff[i] = w.dV;
    tab.d2Veff[i] = w.d2V;
    tab.C[i] = coupling_correction(E, w.V, w.dV, w.d2V, m);
    tab.s0[i] = s0;
  };

  // forward from (x_L, 0)
  double x = x_L, s0 = 0.0;
  record(0, x, s0);
  for (long long slot = 1; slot <= last; ++slot) {
    for (int j = 0; j < substeps; ++j)
      rk4_step(veff, E, m, tab.delta, x, s0);
    record(slot, x, s0);
  }
  // backward continuation for slots -1..-n
  x = x_L;
  s0 = 0.0;
  for (long long slot = -1; slot >= -tab.n_pre; --slot) {
    for (int j = 0; j < substeps; ++j)
      rk4_step(veff, E, m, -tab.delta, x, s0);
    record(slot, x, s0);
  }

  for (std::size_t i = 1; i < tab.x.size(); ++i)
    if (!(tab.x[i] > tab.x[i - 1]))
      fail_validation("trajectory table: positions not strictly increasing (turning point?)");
  return tab;
}

static std::pair<double, double> channel_speeds(double E, double m, double V_L, double V_R) {
  if (!(E > V_L) || !(E > V_R))
    fail_validation("closed channel: E must exceed both asymptotic potential values");
  return {std::sqrt(2.0 * (E - V_L) / m), std::sqrt(2.0 * (E - V_R) / m)};
}

static int substep_count(double t_shift, double dt_requested) {
  return static_cast<int>(std::ceil(t_shift / dt_requested - 1e-12));
}

GridSpec build_grid_spec(SchemeKind scheme, int N, double x_L, double x_R, double dt_requested,
                         double E, double m, const PotentialModel& V, double x0, double beta,
                         std::optional<double> t_shift_user) {
  if (N < 5)
    fail_validation("grid: N must be >= 5", "N");
  if (!(x_L < x_R))
    fail_validation("grid: x_left must be < x_right", "x_left");
  if (!(dt_requested > 0.0))
    fail_validation("grid: dt must be > 0", "dt");
  if (!(m > 0.0))
    fail_validation("grid: m must be > 0", "m");

  GridSpec g;
  g.scheme = scheme;
  g.N = N;
  g.x_L = x_L;
  g.x_R = x_R;
  g.E = E;
  g.m = m;
  const auto [VL, VR] = V.asymptotes();
  g.V_asym_L = VL;
  g.V_asym_R = VR;
  const auto [vL, vR] = channel_speeds(E, m, VL, VR);
  g.v_L = vL;
  g.v_R = vR;

  const double asym_scale = std::max({std::abs(VL), std::abs(VR), 1e-30});

  switch (scheme) {
  case SchemeKind::constant_velocity: {
    if (std::abs(VL - VR) > 1e-12 * std::max(asym_scale, E))
      fail_validation("constant-velocity scheme requires equal asymptotes (V_L = V_R)");
    g.v = vL;
    const double dx = (x_R - x_L) / (N - 1);
    g.t_shift = dx / g.v;
    g.n = substep_count(g.t_shift, dt_requested);
    g.dt = g.t_shift / g.n;
    g.base.resize(N);
    for (int i = 0; i < N; ++i)
      g.base[i] = x_L + i * dx;
    g.base[N - 1] = x_R;
    break;
  }
  case SchemeKind::discontinuous: {
    if (std::abs(VL - VR) <= 1e-12 * std::max(asym_scale, E))
      fail_validation("discontinuous scheme requires unequal asymptotes (V_L != V_R)");
    if (!(x_L < x0 && x0 < x_R))
      fail_validation("discontinuous scheme: x0 must lie strictly inside (x_left, x_right)", "x0");
    g.x0 = x0;
    double ts = t_shift_user
                    ? *t_shift_user
                    : ((x0 - x_L) / vL + (x_R - x0) / vR) / (N - 1);
    if (!(ts > 0.0))
      fail_validation("discontinuous scheme: t_shift must be > 0", "t_shift");
    g.t_shift = ts;
    g.dx_L = ts * vL;
    g.dx_R = ts * vR;
    // integer interval counts; the box only ever grows (outward)
    g.N_L = static_cast<int>(std::ceil((x0 - x_L) / g.dx_L - 1e-9));
    g.N_R = static_cast<int>(std::ceil((x_R - x0) / g.dx_R - 1e-9));
    if (g.N_L < 3 || g.N_R < 3)
      fail_validation("discontinuous scheme: need at least 3 grid intervals on each side of x0");
    g.x_L = x0 - g.N_L * g.dx_L;
    g.x_R = x0 + g.N_R * g.dx_R;
    g.N = g.N_L + g.N_R + 1;
    g.n = substep_count(g.t_shift, dt_requested);
    g.dt = g.t_shift / g.n;
    g.base.resize(g.N);
    for (int i = 0; i <= g.N_L; ++i)
      g.base[i] = x0 - (g.N_L - i) * g.dx_L;
    for (int i = 1; i <= g.N_R; ++i)
      g.base[g.N_L + i] = x0 + i * g.dx_R;
    break;
  }
  case SchemeKind::ramp: {
    if (!(beta > 0.0))
      fail_validation("ramp scheme: beta must be > 0", "beta");
    g.veff = EffectivePotential{VL, VR, x0, beta};
    if (std::abs(VL - VR) <= 1e-30)
      g.veff = EffectivePotential{0.0, 0.0, x0, beta}; // zero variant
    g.x0 = x0;
    g.t_shift = traversal_time(g.veff, E, m, x_L, x_R) / (N - 1);
    g.n = substep_count(g.t_shift, dt_requested);
    g.dt = g.t_shift / g.n;
    auto tab = precompute_trajectory(g.veff, E, m, x_L, x_R, g.dt, N, g.n);
    g.x_R_arrival = tab.x_at(static_cast<long long>(N - 1) * g.n);
    g.base.resize(N);
    for (int i = 0; i < N; ++i)
      g.base[i] = tab.x_at(static_cast<long long>(i) * g.n);
    g.table = std::make_shared<const TrajectoryTable>(std::move(tab));
    break;
  }
  }
  return g;
}

double GridSpec::plus_position(int i, int p) const {
  switch (scheme) {
  case SchemeKind::constant_velocity:
    return base[i] + p * v * dt;
  case SchemeKind::discontinuous:
    return base[i] + p * (plus_in_right(i) ? v_R : v_L) * dt;
  case SchemeKind::ramp:
    return table->x_at(static_cast<long long>(i) * n + p);
  }
  return 0.0;
}

double GridSpec::minus_position(int i, int p) const {
  switch (scheme) {
  case SchemeKind::constant_velocity:
    return base[i] - p * v * dt;
  case SchemeKind::discontinuous:
    return base[i] - p * (minus_in_right(i) ? v_R : v_L) * dt;
  case SchemeKind::ramp:
    return table->x_at(static_cast<long long>(i) * n - p);
  }
  return 0.0;
}

void advance_positions(BipolarState& state) {
  const GridSpec& g = *state.grid;
  if (state.p >= g.n)
    fail_validation("advance_positions: shift_cycle is due before advancing further");
  ++state.p;
  ++state.step_count;
  state.t = state.step_count * g.dt;
  for (int i = 0; i < g.N; ++i) {
    state.xp[i] = g.plus_position(i, state.p);
    state.xm[i] = g.minus_position(i, state.p);
  }
}

void shift_cycle(BipolarState& state) {
  const GridSpec& g = *state.grid;
  if (state.p != g.n)
    fail_validation("shift_cycle called off-cycle (steps-since-shift counter not full)");

  if (g.scheme == SchemeKind::discontinuous) {
    // Old + point N_L-1 and old - point N_L+1 have both arrived at x0;
    // continuity of Psi and Psi' across the velocity jump fixes the
    // outgoing pair before the hand-off.
    const auto [psi_Lm, psi_Rp] =
        matching_at_dividing_point(state.fp[g.N_L - 1], state.fm[g.N_L + 1], g.v_L, g.v_R);
    state.fp[g.N_L - 1] = psi_Rp;
    state.fm[g.N_L + 1] = psi_Lm;
  }

  const int N = g.N;
  for (int i = N - 1; i > 0; --i)
    state.fp[i] = state.fp[i - 1];
  state.fp[0] = std::exp(std::complex<double>(0.0, -g.E * state.t / hbar));
  for (int i = 0; i + 1 < N; ++i)
    state.fm[i] = state.fm[i + 1];
  state.fm[N - 1] = {0.0, 0.0};

  state.p = 0;
  for (int i = 0; i < N; ++i) {
    state.xp[i] = g.base[i];
    state.xm[i] = g.base[i];
  }
}

void dump_trajectory_csv(const TrajectoryTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    fail_validation("cannot open trajectory dump file " + path);
  out << "t,x,v,Veff,dVeff,d2Veff,C,s0\n";
  out.precision(17);
  for (long long slot = -table.n_pre; slot <= table.max_slot(); ++slot) {
    const std::size_t i = table.idx(slot);
    out << slot * table.dt << ',' << table.x[i] << ',' << table.v[i] << ',' << table.Veff[i]
        << ',' << table.dVeff[i] << ',' << table.d2Veff[i] << ',' << table.C[i] << ','
        << table.s0[i] << '\n';
  }
}

} // namespace cpwm
