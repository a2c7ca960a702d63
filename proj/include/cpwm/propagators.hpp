#pragma once

#include "cpwm/fields.hpp"
#include "cpwm/trajgrid.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace cpwm {

//! Continuity of Psi and Psi' across the velocity jump at x0, with each
//! side's derivative relation Psi'_{L/R,pm} = ±i (m v_{L/R}/hbar) Psi_{L/R,pm}:
//!   Psi_L+ + Psi_L- = Psi_R+ + Psi_R-
//!   v_L (Psi_L+ - Psi_L-) = v_R (Psi_R+ - Psi_R-)
//! solved for the two outgoing components.
std::pair<std::complex<double>, std::complex<double>>
matching_at_dividing_point(std::complex<double> psi_Lp, std::complex<double> psi_Rm, double v_L,
                           double v_R);

struct PropagateOutcome {
  long long n_steps = 0;
  double t_final = 0;
  bool stopped_early = false;
};

struct PropagateOptions {
  double stationarity_tol = -1.0; // < 0: no early stop
  int edge_samples = 5;           // M used by the stationarity check
  // invoked at every shift-coincident time (after the shift)
  std::function<void(const BipolarState&)> on_shift;
};

//! One scheme bound to one grid and potential; precomputes every per-slot
//! coefficient so the inner loop is table reads and complex arithmetic.
class Propagator {
public:
  Propagator(std::shared_ptr<const GridSpec> grid, PotentialModel V);

  const GridSpec& grid() const { return *grid_; }
  const PotentialModel& potential() const { return V_; }

  BipolarState initial_state() const;

  //! One full time step: field update from the time-t state (Jacobi), then
  //! position advance; the shift cycle (and discontinuous matching) fires
  //! automatically when the substep counter fills.
  void step(BipolarState& state) const;

  //! Runs whole shift cycles until t >= t_max (t_max rounded up to a whole
  //! number of cycles; t_max <= 0 returns immediately).
  PropagateOutcome propagate(BipolarState& state, double t_max,
                             const PropagateOptions& opts = {}) const;

private:
  void update_fields(BipolarState& state) const;
  void check_divergence(const BipolarState& state) const;

  std::shared_ptr<const GridSpec> grid_;
  PotentialModel V_;

  // per-slot caches, indexed slot + n (slots -n .. N*n)
  std::vector<double> Vslot_;
  std::vector<std::complex<double>> expfac_p_, expfac_m_; // ramp amplitude-phase factors
  std::vector<std::complex<double>> coupfac_;             // (i/hbar)*dt*(coupling coefficient)
  std::complex<double> rot_L_{1, 0}, rot_R_{1, 0};        // constant/discontinuous phase factors

  mutable InterpWorkspace ws_;
  mutable OppositeField opp_p_, opp_m_;

  std::size_t cidx(long long slot) const { return static_cast<std::size_t>(slot + grid_->n); }
};

} // namespace cpwm
