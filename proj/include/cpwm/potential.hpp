#pragma once

#include "cpwm/spline.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cpwm {

enum class PotentialKind { eckart, tanh_ramp, sum, tabulated };

//! A 1-D potential profile V(x) with finite asymptotic values.
//!
//! Variants: eckart barrier V0*sech^2(alpha*(x-center)); tanh ramp
//! ((V_R-V_L)/2)*[tanh(beta*(x-x0))+1] + V_L; sum of sub-models; tabulated
//! samples interpolated by a natural cubic spline (outside the sample range
//! the nearer asymptote is returned).
//!
//! Immutable after construction; the factory functions validate parameters.
struct PotentialModel {
  PotentialKind kind = PotentialKind::eckart;

  // eckart
  double V0 = 0, alpha = 0, center = 0;
  // tanh_ramp
  double V_L = 0, V_R = 0, x0 = 0, beta = 0;
  // sum
  std::vector<PotentialModel> terms;
  // tabulated
  std::vector<double> xs, Vs;
  SplineInterpolant table;
  std::string source_file; // set by load_tabulated; used when echoing configs

  double evaluate(double x) const;
  //! (V at x -> -inf, V at x -> +inf)
  std::pair<double, double> asymptotes() const;

  static PotentialModel make_eckart(double V0, double alpha, double center = 0.0);
  static PotentialModel make_tanh_ramp(double V_L, double V_R, double x0, double beta);
  static PotentialModel make_sum(std::vector<PotentialModel> terms);
  static PotentialModel make_tabulated(std::vector<double> x, std::vector<double> V);
  //! Two-column whitespace text file (x, V in a.u.).
  static PotentialModel load_tabulated(const std::string& path);
};

//! Monotone tanh-ramp effective potential for the ramp-trajectory scheme.
//! V_L = V_R = 0 is the identically-zero variant.
struct EffectivePotential {
  double V_L = 0, V_R = 0, x0 = 0, beta = 1;
  bool is_zero() const { return V_L == 0.0 && V_R == 0.0; }
};

struct VeffValue {
  double V, dV, d2V;
};

//! V_eff and its two exact analytic derivatives at x.
VeffValue evaluate_veff(const EffectivePotential& veff, double x);

//! The hbar^2-order coupling correction
//!   C = (hbar^2/2m) [ (5/16) (V_eff'/(E-V_eff))^2 + (1/4) V_eff''/(E-V_eff) ].
//! Requires E > V_eff (throws a turning-point validation error otherwise).
double coupling_correction(double E, double Veff, double dVeff, double d2Veff, double m);

// sech^2 with overflow clamp; shared by eckart evaluation and tests.
double sech2(double u);

} // namespace cpwm
