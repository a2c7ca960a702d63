#include "cpwm/propagators.hpp"

#include "cpwm/errors.hpp"
#include "cpwm/observables.hpp"
#include "cpwm/units.hpp"

#include <cmath>

namespace cpwm {

std::pair<std::complex<double>, std::complex<double>>
matching_at_dividing_point(std::complex<double> psi_Lp, std::complex<double> psi_Rm, double v_L,
                           double v_R) {
  const double denom = v_L + v_R;
  const std::complex<double> psi_Rp = (2.0 * v_L * psi_Lp + (v_R - v_L) * psi_Rm) / denom;
  const std::complex<double> psi_Lm = ((v_L - v_R) * psi_Lp + 2.0 * v_R * psi_Rm) / denom;
  return {psi_Lm, psi_Rp};
}

Propagator::Propagator(std::shared_ptr<const GridSpec> grid, PotentialModel V)
    : grid_(std::move(grid)), V_(std::move(V)) {
  const GridSpec& g = *grid_;
  const long long lo = -g.n, hi = static_cast<long long>(g.N) * g.n;
  const std::size_t total = static_cast<std::size_t>(hi - lo + 1);
  Vslot_.resize(total);
  for (long long s = lo; s <= hi; ++s) {
    const double x = (g.scheme == SchemeKind::ramp)
                         ? g.table->x_at(s)
                         : (g.scheme == SchemeKind::constant_velocity
                                ? g.x_L + s * g.v * g.dt
                                : (s <= static_cast<long long>(g.N_L) * g.n
                                       ? g.x0 + (s - static_cast<long long>(g.N_L) * g.n) * g.v_L * g.dt
                                       : g.x0 + (s - static_cast<long long>(g.N_L) * g.n) * g.v_R * g.dt));
    Vslot_[cidx(s)] = V_.evaluate(x);
  }

  auto unit_phase = [](double phase) {
    std::complex<double> r = std::polar(1.0, phase);
    return r / std::abs(r);
  };

  switch (g.scheme) {
  case SchemeKind::constant_velocity: {
    rot_L_ = rot_R_ = unit_phase((g.E - 2.0 * g.V_asym_L) * g.dt / hbar);
    coupfac_.resize(total);
    for (std::size_t i = 0; i < total; ++i)
      coupfac_[i] = std::complex<double>(0.0, (Vslot_[i] - g.V_asym_L) * g.dt / hbar);
    break;
  }
  case SchemeKind::discontinuous: {
    rot_L_ = unit_phase((g.E - 2.0 * g.V_asym_L) * g.dt / hbar);
    rot_R_ = unit_phase((g.E - 2.0 * g.V_asym_R) * g.dt / hbar);
    coupfac_.resize(2 * total);
    // left-region coefficients in [0, total), right-region in [total, 2*total)
    for (std::size_t i = 0; i < total; ++i) {
      coupfac_[i] = std::complex<double>(0.0, (Vslot_[i] - g.V_asym_L) * g.dt / hbar);
      coupfac_[total + i] = std::complex<double>(0.0, (Vslot_[i] - g.V_asym_R) * g.dt / hbar);
    }
    break;
  }
  case SchemeKind::ramp: {
    const TrajectoryTable& tab = *g.table;
    expfac_p_.resize(total);
    expfac_m_.resize(total);
    coupfac_.resize(total);
    for (long long s = lo; s <= hi; ++s) {
      const std::size_t i = cidx(s);
      const std::size_t ti = tab.idx(s);
      const double dE = g.E - tab.Veff[ti];
      const double growth = 0.25 * tab.v[ti] * tab.dVeff[ti] / dE; // d ln r / dt for Psi+
      const double phase = (g.E - 2.0 * tab.Veff[ti]) * g.dt / hbar;
      expfac_p_[i] = std::exp(std::complex<double>(growth * g.dt, phase));
      expfac_m_[i] = std::exp(std::complex<double>(-growth * g.dt, phase));
      coupfac_[i] =
          std::complex<double>(0.0, (Vslot_[i] - tab.Veff[ti] - tab.C[ti]) * g.dt / hbar);
    }
    break;
  }
  }
}

BipolarState Propagator::initial_state() const {
  return initial_condition(grid_);
}

void Propagator::update_fields(BipolarState& st) const {
  const GridSpec& g = *grid_;
  const int N = g.N;
  const int p = st.p;
  interpolate_opposite(st, Component::plus, ws_, opp_p_);
  interpolate_opposite(st, Component::minus, ws_, opp_m_);

  const std::size_t total = Vslot_.size();
  switch (g.scheme) {
  case SchemeKind::constant_velocity:
  case SchemeKind::discontinuous: {
    for (int i = 0; i < N; ++i) {
      const long long s = static_cast<long long>(i) * g.n + p;
      const bool right = g.plus_in_right(i);
      const std::complex<double> rot = right ? rot_R_ : rot_L_;
      if (opp_p_.exterior[i]) {
        st.fp[i] *= rot;
      } else {
        const std::complex<double> cf =
            coupfac_[cidx(s) + (g.scheme == SchemeKind::discontinuous && right ? total : 0)];
        st.fp[i] = st.fp[i] * rot - cf * (st.fp[i] + opp_p_.value[i]);
      }
    }
    for (int i = 0; i < N; ++i) {
      const long long s = static_cast<long long>(i) * g.n - p;
      const bool right = g.minus_in_right(i);
      const std::complex<double> rot = right ? rot_R_ : rot_L_;
      if (opp_m_.exterior[i]) {
        st.fm[i] *= rot;
      } else {
        const std::complex<double> cf =
            coupfac_[cidx(s) + (g.scheme == SchemeKind::discontinuous && right ? total : 0)];
        st.fm[i] = st.fm[i] * rot - cf * (st.fm[i] + opp_m_.value[i]);
      }
    }
    break;
  }
  case SchemeKind::ramp: {
    for (int i = 0; i < N; ++i) {
      const std::size_t s = cidx(static_cast<long long>(i) * g.n + p);
      if (opp_p_.exterior[i])
        st.fp[i] *= expfac_p_[s];
      else
        st.fp[i] = st.fp[i] * expfac_p_[s] - coupfac_[s] * (st.fp[i] + opp_p_.value[i]);
    }
    for (int i = 0; i < N; ++i) {
      const std::size_t s = cidx(static_cast<long long>(i) * g.n - p);
      if (opp_m_.exterior[i])
        st.fm[i] *= expfac_m_[s];
      else
        st.fm[i] = st.fm[i] * expfac_m_[s] - coupfac_[s] * (st.fm[i] + opp_m_.value[i]);
    }
    break;
  }
  }
}

void Propagator::check_divergence(const BipolarState& st) const {
  constexpr double lim2 = 1e12; // |Psi| > 1e6
  for (int i = 0; i < grid_->N; ++i) {
    const double a = std::norm(st.fp[i]), b = std::norm(st.fm[i]);
    if (!(a <= lim2) || !(b <= lim2)) // NaN fails both comparisons
      throw Error(ErrorKind::divergence,
                  "field divergence: |Psi| exceeded 1e6 (or became non-finite) at t = " +
                      std::to_string(st.t));
  }
}

void Propagator::step(BipolarState& st) const {
  update_fields(st);
  advance_positions(st);
  if (st.p == grid_->n) {
    check_divergence(st);
    shift_cycle(st);
  }
}

PropagateOutcome Propagator::propagate(BipolarState& st, double t_max,
                                       const PropagateOptions& opts) const {
  const GridSpec& g = *grid_;
  PropagateOutcome out;
  out.t_final = st.t;
  if (st.p != 0)
    fail_validation("propagate: state must start at a shift-coincident time");
  long long cycles =
      t_max <= 0.0 ? 0 : static_cast<long long>(std::ceil(t_max / g.t_shift - 1e-9));

  bool have_prev = false;
  double prev_refl = 0.0, prev_trans = 0.0;
  for (long long c = 0; c < cycles; ++c) {
    for (int j = 0; j < g.n; ++j)
      step(st);
    out.n_steps += g.n;
    out.t_final = st.t;
    if (opts.on_shift)
      opts.on_shift(st);
    if (opts.stationarity_tol > 0.0) {
      const ScatteringResult r = edge_probabilities(st, g.v_L, g.v_R, opts.edge_samples);
      if (have_prev && std::abs(r.p_refl - prev_refl) < opts.stationarity_tol &&
          std::abs(r.p_trans - prev_trans) < opts.stationarity_tol) {
        out.stopped_early = true;
        return out;
      }
      prev_refl = r.p_refl;
      prev_trans = r.p_trans;
      have_prev = true;
    }
  }
  return out;
}

} // namespace cpwm
