#pragma once

#include <cstddef>
#include <vector>

namespace cpwm {

//! Natural cubic spline through strictly increasing knots.
//!
//! Natural end conditions (zero second derivative at both end knots).
//! Evaluation outside the knot range extends the terminal cubic segment,
//! which is what the moving-grid interpolation needs for points that sit
//! slightly past the opposite grid's edge.
class SplineInterpolant {
public:
  SplineInterpolant() = default;

  //! Build from knots. Requires n >= 3 and strictly increasing x.
  void build(const std::vector<double>& x, const std::vector<double>& y);
  void build(const double* x, const double* y, std::size_t n);

  double eval(double x) const;

  //! Evaluate at an ascending sequence of targets in one left-to-right
  //! sweep; out[i] = eval(xs[i]) but O(n + m) instead of m binary searches.
  void eval_sorted(const double* xs, double* out, std::size_t m) const;

  bool ready() const { return n_ > 0; }
  std::size_t size() const { return n_; }
  double x_front() const { return x_[0]; }
  double x_back() const { return x_[n_ - 1]; }

private:
  double piece(std::size_t i, double x) const;
  std::size_t locate(double x) const;

  std::vector<double> x_, y_, y2_; // knots, values, second derivatives
  std::size_t n_ = 0;
};

} // namespace cpwm
