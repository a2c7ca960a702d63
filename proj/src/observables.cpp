#include "cpwm/observables.hpp"

#include "cpwm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cpwm {

ScatteringResult edge_probabilities(const BipolarState& state, double v_L, double v_R, int M) {
  const auto& g = *state.grid;
  if (state.p != 0)
    fail_validation("edge probabilities require a shift-coincident state (p == 0)");
  if (M < 2 || M > g.N / 3)
    fail_validation("edge sample count M must satisfy 2 <= M <= N/3", "M");
  if (!(v_L > 0) || !(v_R > 0))
    fail_validation("edge probabilities require open channels on both sides");

  const double ratio = v_R / v_L;
  double rmin = 0, rmax = 0, rsum = 0;
  double tmin = 0, tmax = 0, tsum = 0;
  for (int i = 0; i < M; ++i) {
    const double refl = std::norm(state.fm[static_cast<size_t>(i)]);
    const double trans = ratio * std::norm(state.fp[static_cast<size_t>(g.N - 1 - i)]);
    if (i == 0) {
      rmin = rmax = refl;
      tmin = tmax = trans;
    } else {
      rmin = std::min(rmin, refl);
      rmax = std::max(rmax, refl);
      tmin = std::min(tmin, trans);
      tmax = std::max(tmax, trans);
    }
    rsum += refl;
    tsum += trans;
  }

  ScatteringResult out;
  out.M = M;
  out.t_final = state.t;
  out.n_steps = state.step_count;
  out.p_refl = rsum / M;
  out.u_refl = 0.5 * (rmax - rmin);
  out.p_trans = tsum / M;
  out.u_trans = 0.5 * (tmax - tmin);
  return out;
}

namespace {

// per-point, per-component propagation speed at shift-coincident times
double point_speed(const GridSpec& g, int i, bool plus) {
  switch (g.scheme) {
    case SchemeKind::constant_velocity: return g.v;
    case SchemeKind::discontinuous: {
      const bool right = plus ? g.plus_in_right(i) : g.minus_in_right(i);
      return right ? g.v_R : g.v_L;
    }
    case SchemeKind::ramp: return g.table->v[g.table->idx(static_cast<long long>(i) * g.n)];
  }
  return g.v;
}

} // namespace

double continuity_residual(const BipolarState& a, const BipolarState& b) {
  if (a.grid != b.grid)
    fail_validation("continuity residual requires two states on the same grid");
  const auto& g = *a.grid;
  if (a.p != 0 || b.p != 0)
    fail_validation("continuity residual requires shift-coincident states (p == 0)");
  if (b.step_count - a.step_count != g.n)
    fail_validation("continuity residual requires states exactly one shift cycle apart");

  const int N = g.N;
  std::vector<double> rho_a(N), rho_b(N), jbar(N);
  for (int i = 0; i < N; ++i) {
    const auto k = static_cast<size_t>(i);
    rho_a[k] = std::norm(a.fp[k]) + std::norm(a.fm[k]);
    rho_b[k] = std::norm(b.fp[k]) + std::norm(b.fm[k]);
    const double vp = point_speed(g, i, true);
    const double vm = point_speed(g, i, false);
    const double ja = vp * std::norm(a.fp[k]) - vm * std::norm(a.fm[k]);
    const double jb = vp * std::norm(b.fp[k]) - vm * std::norm(b.fm[k]);
    jbar[k] = 0.5 * (ja + jb);
  }

  double worst = 0;
  for (int i = 1; i + 1 < N; ++i) {
    const auto k = static_cast<size_t>(i);
    const double dx = a.xp[k + 1] - a.xp[k - 1];
    const double res = (rho_b[k] - rho_a[k]) / g.t_shift + (jbar[k + 1] - jbar[k - 1]) / dx;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

} // namespace cpwm
