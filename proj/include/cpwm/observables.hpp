#pragma once

#include "cpwm/trajgrid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpwm {

//! Reflection/transmission probabilities as mean +- oscillatory uncertainty.
struct ScatteringResult {
  double p_refl = 0, u_refl = 0;
  double p_trans = 0, u_trans = 0;
  int M = 0;
  double t_final = 0;
  long long n_steps = 0;
  double wall_time_s = 0;
};

//! Means over the M leftmost |Psi-|^2 samples (P_refl) and the M rightmost
//! (v_R/v_L)|Psi+|^2 samples (P_trans); uncertainty is half the peak-to-peak
//! spread, which bounds the edge oscillation amplitude directly.
//! Requires a shift-coincident state and 2 <= M <= N/3.
ScatteringResult edge_probabilities(const BipolarState& state, double v_L, double v_R, int M);

//! Max-norm of the discrete residual of d(rho+ + rho-)/dt + d(j+ + j-)/dx
//! between two consecutive shift-coincident states (time difference over
//! t_shift, centered space differences, fluxes averaged over the two
//! states). The coupling source terms cancel in the sum, so this is pure
//! discretization error. Diagnostic only; never used in the solver path.
double continuity_residual(const BipolarState& a, const BipolarState& b);

struct ConvergenceTargets {
  std::optional<double> tol_refl;
  std::optional<double> tol_trans;
  int max_cycles = 8;
};

struct ConvergenceTrial {
  std::string param;
  double old_value = 0, new_value = 0;
  ScatteringResult result;
  bool accepted = false; // parameter judged converged at the current value
};

struct RunConfig; // cli-facing run description (config.hpp)

struct ConvergenceReport {
  std::vector<ConvergenceTrial> trials;
  bool converged = false;
  int cycles_used = 0;
  ScatteringResult final_result;
  std::vector<std::pair<std::string, double>> final_params;
};

//! The four-parameter convergence cycle (t_max x2, N x1.25, dt x0.5, box
//! +0.5 bohr, in that order): a refinement trial is accepted (parameter
//! converged, current value kept) when every targeted mean moves by less
//! than its target and its uncertainty is at or below target; otherwise the
//! refined value is adopted and the cycle continues. Terminates on the
//! first full cycle with no adoption, or reports non-convergence at the cap.
ConvergenceReport run_convergence_cycle(const RunConfig& base, const ConvergenceTargets& targets);

} // namespace cpwm
