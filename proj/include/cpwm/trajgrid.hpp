#pragma once

#include "cpwm/potential.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <vector>

namespace cpwm {

enum class SchemeKind { constant_velocity, discontinuous, ramp };

//! Precomputed ramp trajectory x+_1(t) sampled at every multiple of the
//! time step. Slot j holds the trajectory at t = j*dt, j in [-n, N*n]
//! (negative slots continue the trajectory backward past x_L; slots past
//! (N-1)*n continue beyond x_R by one shift interval). The grid point k
//! (0-based) at substep p sits at slot k*n + p on the + grid and k*n - p
//! on the - grid, so every position is an exact array read.
struct TrajectoryTable {
  int n = 0;     // substeps per shift period
  int n_pre = 0; // slots stored before slot 0
  double dt = 0;
  double delta = 0; // inner integrator step
  std::vector<double> x, v, Veff, dVeff, d2Veff, C, s0;

  std::size_t idx(long long slot) const { return static_cast<std::size_t>(slot + n_pre); }
  double x_at(long long slot) const { return x[idx(slot)]; }
  long long max_slot() const { return static_cast<long long>(x.size()) - 1 - n_pre; }
};

//! Grid geometry plus the physics constants the schemes need.
struct GridSpec {
  SchemeKind scheme = SchemeKind::constant_velocity;
  int N = 0;            // trajectories per component
  double x_L = 0, x_R = 0;
  double dt = 0;        // adjusted time step (divides t_shift exactly)
  double t_shift = 0;   // = n * dt
  int n = 0;            // substeps per shift
  double E = 0, m = 0;
  double V_asym_L = 0, V_asym_R = 0;

  // constant velocity
  double v = 0;

  // discontinuous
  double x0 = 0;
  double v_L = 0, v_R = 0;
  double dx_L = 0, dx_R = 0;
  int N_L = 0, N_R = 0; // interval counts left/right of x0; N = N_L + N_R + 1

  // ramp
  EffectivePotential veff;
  std::shared_ptr<const TrajectoryTable> table;
  double x_R_arrival = 0; // integrated arrival position at slot (N-1)*n

  std::vector<double> base; // base (substep-0) positions, size N

  // 0-based point i of the + grid is in the right region iff i >= N_L;
  // of the - grid iff i > N_L (the point at x0 itself hands off leftward).
  bool plus_in_right(int i) const { return scheme == SchemeKind::discontinuous && i >= N_L; }
  bool minus_in_right(int i) const { return scheme == SchemeKind::discontinuous && i > N_L; }

  double plus_position(int i, int p) const;
  double minus_position(int i, int p) const;
};

//! The two counterpropagating grids with their complex field values.
struct BipolarState {
  double t = 0;
  long long step_count = 0; // t = step_count * dt
  int p = 0;                // steps since last shift, in [0, n]
  std::vector<double> xp, xm;
  std::vector<std::complex<double>> fp, fm;
  std::shared_ptr<const GridSpec> grid;
};

//! Scheme-specific grid construction. t_shift comes from the scheme
//! (constant velocity: dx/v; ramp: traversal time of [x_L, x_R] over N-1;
//! discontinuous: user-supplied or the two-region traversal time over N-1);
//! dt = t_shift/ceil(t_shift/dt_requested) never exceeds the request.
//! The discontinuous scheme rebuilds the box outward from x0 so that x0,
//! x_L, x_R are exact grid points; N then becomes N_L + N_R + 1.
GridSpec build_grid_spec(SchemeKind scheme, int N, double x_L, double x_R, double dt_requested,
                         double E, double m, const PotentialModel& V, double x0 = 0,
                         double beta = 0, std::optional<double> t_shift_user = std::nullopt);

//! Integrates dx/dt = v(x) = sqrt(2(E-V_eff)/m) from x_L with a fixed-step
//! 4th-order inner integrator at delta = dt/100, storing the quantity bundle
//! at every multiple of dt for slots -n..N*n; s0(x_L) = 0.
TrajectoryTable precompute_trajectory(const EffectivePotential& veff, double E, double m,
                                      double x_L, double x_R, double dt, int N, int n);

//! Classical traversal time of [x_L, x_R] under V_eff (adaptive quadrature).
double traversal_time(const EffectivePotential& veff, double E, double m, double x_L, double x_R);

//! Moves every grid point one step along its trajectory and advances time.
void advance_positions(BipolarState& state);

//! At a full shift period: discards the outermost right + point and the
//! outermost left - point, injects a fresh + point at x_L carrying
//! exp(-i E t / hbar) and a fresh - point at x_R carrying 0, and reindexes
//! so the two grids coincide again. The discontinuous hand-off at x0 is
//! applied first (both edge trajectories reach x0 simultaneously there).
void shift_cycle(BipolarState& state);

//! CSV dump of the trajectory table: t, x, v, Veff, dVeff, d2Veff, C, s0.
void dump_trajectory_csv(const TrajectoryTable& table, const std::string& path);

} // namespace cpwm
