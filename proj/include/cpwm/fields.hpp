#pragma once

#include "cpwm/spline.hpp"
#include "cpwm/trajgrid.hpp"

#include <complex>
#include <vector>

namespace cpwm {

//! Amplitude/action representation of one field component: Psi = r e^{i s/hbar}.
struct FieldDecomposition {
  std::vector<double> r, s;
};

//! r_k = |Psi_k|; s by the branch-tracking recursion: a zero sample carries
//! the previous s forward, a sample after a zero restarts from its
//! principal-value phase, and otherwise s advances by the principal-value
//! phase of Psi_{k+1}/Psi_k, so s is smooth (unwrapped) wherever the field
//! is nonzero. The virtual element before the array is zero with s = 0.
void decompose(const std::complex<double>* psi, std::size_t n, FieldDecomposition& out);
FieldDecomposition decompose(const std::vector<std::complex<double>>& psi);

enum class Component { plus, minus };

//! Opposite-component field values at one component's grid positions.
struct OppositeField {
  std::vector<std::complex<double>> value;
  std::vector<char> exterior; // 1 where the position lies outside the opposite grid
};

struct InterpWorkspace {
  FieldDecomposition dec;
  SplineInterpolant sr, ss;   // full grid, or left region (discontinuous)
  SplineInterpolant sr2, ss2; // right region (discontinuous)
  std::vector<double> rbuf, sbuf;
};

//! Decomposes the opposite component into r/s, splines both over the
//! opposite grid, and evaluates at `which`'s positions, reassembling
//! r* e^{i s*/hbar}. Positions outside the opposite grid's range are
//! flagged exterior (value untouched there). In the discontinuous scheme
//! the fields jump at x0, so each region gets its own spline pair and
//! points near x0 use the terminal-segment extension of their region.
void interpolate_opposite(const BipolarState& state, Component which, InterpWorkspace& ws,
                          OppositeField& out);
OppositeField interpolate_opposite(const BipolarState& state, Component which);

//! Fills the fields of a fresh state at t = 0: Psi- = 0 everywhere;
//! Psi+ is the extended incident wave (plane wave, regional plane waves
//! with phase continuous at x0, or the basic WKB form sqrt(v_L/v) e^{i s0/hbar}
//! depending on the scheme).
BipolarState initial_condition(std::shared_ptr<const GridSpec> grid);

} // namespace cpwm
