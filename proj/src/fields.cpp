#include "cpwm/fields.hpp"

#include "cpwm/errors.hpp"
#include "cpwm/units.hpp"

#include <cmath>

namespace cpwm {

namespace {
constexpr double zero_eps = 1e-30;
} // namespace

void decompose(const std::complex<double>* psi, std::size_t n, FieldDecomposition& out) {
  if (n == 0)
    fail_validation("decompose: empty array");
  out.r.resize(n);
  out.s.resize(n);
  double s_prev = 0.0;
  bool prev_zero = true; // virtual preceding zero element with s = 0
  std::complex<double> psi_prev{0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::abs(psi[k]);
    out.r[k] = r;
    if (r < zero_eps) {
      out.s[k] = s_prev; // carry forward across the zero
      prev_zero = true;
    } else if (prev_zero) {
      out.s[k] = hbar * std::atan2(psi[k].imag(), psi[k].real());
      prev_zero = false;
    } else {
      // principal-value phase of psi_k / psi_prev without the division
      const std::complex<double> q = psi[k] * std::conj(psi_prev);
      out.s[k] = s_prev + hbar * std::atan2(q.imag(), q.real());
      prev_zero = false;
    }
    s_prev = out.s[k];
    psi_prev = psi[k];
  }
}

FieldDecomposition decompose(const std::vector<std::complex<double>>& psi) {
  FieldDecomposition out;
  decompose(psi.data(), psi.size(), out);
  return out;
}

namespace {

// Spline r and s of points [i0, i1) of the opposite grid, then evaluate at
// the target positions [j0, j1), writing reassembled complex values.
void spline_block(const double* opp_x, const FieldDecomposition& dec, int i0, int i1,
                  SplineInterpolant& sr, SplineInterpolant& ss, const std::vector<double>& tgt,
                  int j0, int j1, InterpWorkspace& ws, OppositeField& out) {
  sr.build(opp_x + i0, dec.r.data() + i0, static_cast<std::size_t>(i1 - i0));
  ss.build(opp_x + i0, dec.s.data() + i0, static_cast<std::size_t>(i1 - i0));
  const std::size_t cnt = static_cast<std::size_t>(j1 - j0);
  ws.rbuf.resize(cnt);
  ws.sbuf.resize(cnt);
  sr.eval_sorted(tgt.data() + j0, ws.rbuf.data(), cnt);
  ss.eval_sorted(tgt.data() + j0, ws.sbuf.data(), cnt);
  for (std::size_t j = 0; j < cnt; ++j)
    out.value[j0 + j] = std::polar(ws.rbuf[j], ws.sbuf[j] / hbar);
}

} // namespace

void interpolate_opposite(const BipolarState& state, Component which, InterpWorkspace& ws,
                          OppositeField& out) {
  const GridSpec& g = *state.grid;
  const int N = g.N;
  const bool plus = (which == Component::plus);
  const auto& tgt = plus ? state.xp : state.xm;
  const auto& opp_x = plus ? state.xm : state.xp;
  const auto& opp_f = plus ? state.fm : state.fp;
  if (N < 3)
    fail_validation("interpolate_opposite: opposite grid needs at least 3 points");

  decompose(opp_f.data(), static_cast<std::size_t>(N), ws.dec);
  out.value.assign(static_cast<std::size_t>(N), {0.0, 0.0});
  out.exterior.assign(static_cast<std::size_t>(N), 0);
  for (int i = 0; i < N; ++i)
    if (tgt[i] < opp_x.front() || tgt[i] > opp_x.back())
      out.exterior[i] = 1;

  if (g.scheme != SchemeKind::discontinuous) {
    spline_block(opp_x.data(), ws.dec, 0, N, ws.sr, ws.ss, tgt, 0, N, ws, out);
  } else {
    // Regional splines; region boundaries by point membership. Opposite
    // grid: the point based at x0 belongs left for the - grid, right for
    // the + grid. Targets likewise. Terminal-segment extension covers the
    // near-x0 gaps that open mid-cycle.
    const int NL = g.N_L;
    const int opp_left_end = plus ? (NL + 1) : NL;  // one past the last left point
    const int tgt_left_end = plus ? NL : (NL + 1);
    spline_block(opp_x.data(), ws.dec, 0, opp_left_end, ws.sr, ws.ss, tgt, 0, tgt_left_end, ws,
                 out);
    spline_block(opp_x.data(), ws.dec, opp_left_end, N, ws.sr2, ws.ss2, tgt, tgt_left_end, N, ws,
                 out);
  }
  for (int i = 0; i < N; ++i)
    if (out.exterior[i])
      out.value[i] = {0.0, 0.0};
}

OppositeField interpolate_opposite(const BipolarState& state, Component which) {
  InterpWorkspace ws;
  OppositeField out;
  interpolate_opposite(state, which, ws, out);
  return out;
}

BipolarState initial_condition(std::shared_ptr<const GridSpec> grid) {
  const GridSpec& g = *grid;
  BipolarState st;
  st.grid = std::move(grid);
  st.t = 0.0;
  st.step_count = 0;
  st.p = 0;
  st.xp = g.base;
  st.xm = g.base;
  st.fp.assign(static_cast<std::size_t>(g.N), {0.0, 0.0});
  st.fm.assign(static_cast<std::size_t>(g.N), {0.0, 0.0});

  switch (g.scheme) {
  case SchemeKind::constant_velocity: {
    const double k0 = g.m * g.v / hbar; // = sqrt(2 m (E - V_asym)) / hbar
    for (int i = 0; i < g.N; ++i)
      st.fp[i] = std::polar(1.0, k0 * st.xp[i]);
    break;
  }
  case SchemeKind::discontinuous: {
    const double kL = g.m * g.v_L / hbar, kR = g.m * g.v_R / hbar;
    for (int i = 0; i < g.N; ++i) {
      const double x = st.xp[i];
      const double phase = g.plus_in_right(i) ? kL * g.x0 + kR * (x - g.x0) : kL * x;
      st.fp[i] = std::polar(1.0, phase);
    }
    break;
  }
  case SchemeKind::ramp: {
    const TrajectoryTable& tab = *g.table;
    for (int i = 0; i < g.N; ++i) {
      const std::size_t slot = tab.idx(static_cast<long long>(i) * g.n);
      st.fp[i] = std::polar(std::sqrt(g.v_L / tab.v[slot]), tab.s0[slot] / hbar);
    }
    break;
  }
  }
  return st;
}

} // namespace cpwm
