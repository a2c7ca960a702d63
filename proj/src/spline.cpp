#include "cpwm/spline.hpp"

#include "cpwm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cpwm {

void SplineInterpolant::build(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    fail_validation("spline: x and y sizes differ");
  build(x.data(), y.data(), x.size());
}

void SplineInterpolant::build(const double* x, const double* y, std::size_t n) {
  if (n < 3)
    fail_validation("spline: need at least 3 knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1]))
      fail_validation("spline: knots must be strictly increasing");

  x_.assign(x, x + n);
  y_.assign(y, y + n);
  y2_.assign(n, 0.0);

  // Tridiagonal solve for the interior second derivatives; natural ends
  // pin y2 to zero at both boundaries.
  std::vector<double> u(n - 1, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
    const double p = sig * y2_[i - 1] + 2.0;
    y2_[i] = (sig - 1.0) / p;
    const double dy1 = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    const double dy0 = (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
    u[i] = (6.0 * (dy1 - dy0) / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
  }
  y2_[n - 1] = 0.0;
  for (std::size_t i = n - 1; i-- > 0;)
    y2_[i] = y2_[i] * y2_[i + 1] + u[i];

  n_ = n;
}

std::size_t SplineInterpolant::locate(double x) const {
  // Interval index i with x in [x_i, x_{i+1}); clamped to the terminal
  // segments so out-of-range evaluation extends the end cubics.
  if (x <= x_[1]) return 0;
  if (x >= x_[n_ - 2]) return n_ - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double SplineInterpolant::piece(std::size_t i, double x) const {
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * y2_[i] + (b * b * b - b) * y2_[i + 1]) * (h * h) / 6.0;
}

double SplineInterpolant::eval(double x) const {
  return piece(locate(x), x);
}

void SplineInterpolant::eval_sorted(const double* xs, double* out, std::size_t m) const {
  std::size_t i = 0;
  for (std::size_t j = 0; j < m; ++j) {
    while (i + 2 < n_ && xs[j] > x_[i + 1])
      ++i;
    out[j] = piece(i, xs[j]);
  }
}

} // namespace cpwm
