#include "cpwm/potential.hpp"

#include "cpwm/errors.hpp"
#include "cpwm/units.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cpwm {

double sech2(double u) {
  if (std::abs(u) > 350.0)
    return 0.0;
  const double c = 2.0 / (std::exp(u) + std::exp(-u));
  return c * c;
}

static void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    fail_validation(std::string("potential: non-finite parameter ") + what);
}

PotentialModel PotentialModel::make_eckart(double V0, double alpha, double center) {
  require_finite(V0, "V0");
  require_finite(alpha, "alpha");
  require_finite(center, "center");
  if (!(V0 > 0.0))
    fail_validation("eckart: V0 must be > 0");
  if (!(alpha > 0.0))
    fail_validation("eckart: alpha must be > 0");
  PotentialModel p;
  p.kind = PotentialKind::eckart;
  p.V0 = V0;
  p.alpha = alpha;
  p.center = center;
  return p;
}

PotentialModel PotentialModel::make_tanh_ramp(double V_L, double V_R, double x0, double beta) {
  require_finite(V_L, "V_L");
  require_finite(V_R, "V_R");
  require_finite(x0, "x0");
  require_finite(beta, "beta");
  if (!(beta > 0.0))
    fail_validation("tanh_ramp: beta must be > 0");
  PotentialModel p;
  p.kind = PotentialKind::tanh_ramp;
  p.V_L = V_L;
  p.V_R = V_R;
  p.x0 = x0;
  p.beta = beta;
  return p;
}

PotentialModel PotentialModel::make_sum(std::vector<PotentialModel> terms) {
  if (terms.empty())
    fail_validation("sum potential: needs at least one term");
  PotentialModel p;
  p.kind = PotentialKind::sum;
  p.terms = std::move(terms);
  return p;
}

PotentialModel PotentialModel::make_tabulated(std::vector<double> x, std::vector<double> V) {
  if (x.size() != V.size())
    fail_validation("tabulated potential: x and V lengths differ");
  if (x.size() < 4)
    fail_validation("tabulated potential: need at least 4 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require_finite(x[i], "x sample");
    require_finite(V[i], "V sample");
    if (i > 0 && !(x[i] > x[i - 1]))
      fail_validation("tabulated potential: x samples must be strictly increasing");
  }
  PotentialModel p;
  p.kind = PotentialKind::tabulated;
  p.table.build(x, V);
  p.xs = std::move(x);
  p.Vs = std::move(V);
  return p;
}

PotentialModel PotentialModel::load_tabulated(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    fail_validation("tabulated potential: cannot open " + path);
  std::vector<double> x, V;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      x.push_back(a);
      V.push_back(b);
    }
  }
  PotentialModel m = make_tabulated(std::move(x), std::move(V));
  m.source_file = path;
  return m;
}

double PotentialModel::evaluate(double x) const {
  switch (kind) {
  case PotentialKind::eckart:
    return V0 * sech2(alpha * (x - center));
  case PotentialKind::tanh_ramp:
    return 0.5 * (V_R - V_L) * (std::tanh(beta * (x - x0)) + 1.0) + V_L;
  case PotentialKind::sum: {
    double s = 0.0;
    for (const auto& t : terms)
      s += t.evaluate(x);
    return s;
  }
  case PotentialKind::tabulated:
    if (x <= xs.front()) return Vs.front();
    if (x >= xs.back()) return Vs.back();
    return table.eval(x);
  }
  return 0.0;
}

std::pair<double, double> PotentialModel::asymptotes() const {
  switch (kind) {
  case PotentialKind::eckart:
    return {0.0, 0.0};
  case PotentialKind::tanh_ramp:
    return {V_L, V_R};
  case PotentialKind::sum: {
    double l = 0.0, r = 0.0;
    for (const auto& t : terms) {
      const auto [tl, tr] = t.asymptotes();
      l += tl;
      r += tr;
    }
    return {l, r};
  }
  case PotentialKind::tabulated:
    return {Vs.front(), Vs.back()};
  }
  return {0.0, 0.0};
}

VeffValue evaluate_veff(const EffectivePotential& veff, double x) {
  if (veff.is_zero())
    return {0.0, 0.0, 0.0};
  const double A = 0.5 * (veff.V_R - veff.V_L);
  const double th = std::tanh(veff.beta * (x - veff.x0));
  const double s2 = 1.0 - th * th;
  return {A * (th + 1.0) + veff.V_L,
          A * veff.beta * s2,
          -2.0 * A * veff.beta * veff.beta * th * s2};
}

double coupling_correction(double E, double Veff, double dVeff, double d2Veff, double m) {
  const double dE = E - Veff;
  if (!(dE > 0.0))
    throw Error(ErrorKind::validation,
                "coupling correction: turning point (E <= V_eff); choose a monotone V_eff below E");
  const double g = dVeff / dE;
  return (hbar * hbar / (2.0 * m)) * ((5.0 / 16.0) * g * g + 0.25 * d2Veff / dE);
}

} // namespace cpwm
