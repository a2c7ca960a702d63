#pragma once

#include "cpwm/potential.hpp"

#include <optional>

namespace cpwm {

struct OracleResult {
  double p_refl = 0;
  double p_trans = 0;
  double err_est = 0;  // Richardson + unitarity defect + asymptotic-tail bias
  double h_used = 0;
  double x_min = 0, x_max = 0; // range actually integrated (after extension)
};

//! Reference R/T probabilities from direct stationary-state integration
//! (Numerov, O(h^4)), swept leftward from a pure transmitted wave so the
//! growing solution under a barrier is the physical one. The range is
//! auto-extended in 0.5 bohr steps until the potential is flat relative to
//! the local kinetic energy; incident/reflected amplitudes come from a
//! two-point plane-wave projection at the left end. With no explicit h the
//! step is Richardson-halved until the error estimate reaches
//! max(1e-13, 1e-9 * min(P_refl, P_trans)); an explicit h does a single
//! h, h/2 pair.
OracleResult integrate_scattering(const PotentialModel& V, double E, double m,
                                  double x_min, double x_max,
                                  std::optional<double> h = std::nullopt);

//! Closed-form transmission through V0*sech^2(alpha*x) at energy E.
double eckart_exact_transmission(double V0, double alpha, double E, double m);

//! Closed-form reflection off a monotonic tanh step of width 1/beta.
double smooth_step_exact_reflection(double V_L, double V_R, double beta, double E, double m);

} // namespace cpwm
