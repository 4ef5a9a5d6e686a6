#include "conecusp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace conecusp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PoleProximity: return "PoleProximity";
    case ErrorKind::ZeroProximity: return "ZeroProximity";
    case ErrorKind::TailUnboundable: return "TailUnboundable";
    case ErrorKind::BoundaryDegeneracy: return "BoundaryDegeneracy";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::PathThroughPole: return "PathThroughPole";
    case ErrorKind::SeparationTooSmall: return "SeparationTooSmall";
    case ErrorKind::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorKind::NonHyperbolicExponent: return "NonHyperbolicExponent";
    case ErrorKind::HalfPlaneViolation: return "HalfPlaneViolation";
  }
  return "Unknown";
}

double distance_to_segment(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

namespace {

// 10-point Gauss-Legendre on [-1, 1]; nodes are +-x[i].
constexpr std::array<double, 5> kGLx = {
    0.1488743389816312108848260, 0.4333953941292471907992659, 0.6794095682990244062343274,
    0.8650633666889845107320967, 0.9739065285171717200779640};
constexpr std::array<double, 5> kGLw = {
    0.2955242247147528701738930, 0.2692667193099963550912269, 0.2190863625159820439955349,
    0.1494513491505805931457763, 0.0666713443086881375935688};

struct Panel {
  Complex value;
  double magnitude;  // same rule applied to |g|
};

Panel gauss10(const ComplexFn& g, Complex a, Complex b) {
  const Complex mid = 0.5 * (a + b);
  const Complex half = 0.5 * (b - a);
  Complex sum{};
  double mag = 0.0;
  for (std::size_t i = 0; i < kGLx.size(); ++i) {
    const Complex lo = g(mid - kGLx[i] * half), hi = g(mid + kGLx[i] * half);
    sum += kGLw[i] * (lo + hi);
    mag += kGLw[i] * (std::abs(lo) + std::abs(hi));
  }
  return {sum * half, mag * std::abs(half)};
}

struct Budget {
  int depth_cap;
  std::size_t panels_left;
};

constexpr double kRoundingFloor = 64.0 * std::numeric_limits<double>::epsilon();

void adapt(const ComplexFn& g, Complex a, Complex b, Complex whole, double tol, int depth,
           Budget& budget, SegmentIntegral& acc) {
  const Complex mid = 0.5 * (a + b);
  const Panel left = gauss10(g, a, mid);
  const Panel right = gauss10(g, mid, b);
  const Complex refined = left.value + right.value;
  const double err = std::abs(whole - refined);
  if (!std::isfinite(err)) {
    throw NumericalError(ErrorKind::NonFinite, "non-finite integrand sample on segment");
  }
  acc.max_depth = std::max(acc.max_depth, depth);
  ++acc.panels;
  if (budget.panels_left > 0) --budget.panels_left;
  // Below the rounding level of the panel further splitting cannot help.
  const double floor = kRoundingFloor * (left.magnitude + right.magnitude);
  if (err <= std::max(tol, floor) || depth >= budget.depth_cap || budget.panels_left == 0) {
    if (err > std::max(tol, floor)) acc.converged = false;
    acc.value += refined;
    acc.error += err;
    return;
  }
  adapt(g, a, mid, left.value, 0.5 * tol, depth + 1, budget, acc);
  adapt(g, mid, b, right.value, 0.5 * tol, depth + 1, budget, acc);
}

}  // namespace

SegmentIntegral integrate_segment(const ComplexFn& g, Complex a, Complex b, double abs_tol,
                                  int depth_cap, std::size_t max_panels) {
  SegmentIntegral acc;
  if (a == b) return acc;
  Budget budget{depth_cap, max_panels};
  adapt(g, a, b, gauss10(g, a, b).value, abs_tol, 0, budget, acc);
  return acc;
}

Complex pairwise_sum(const Complex* values, std::size_t n) {
  if (n == 0) return {};
  if (n <= 8) {
    Complex s{};
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(values, h) + pairwise_sum(values + h, n - h);
}

}  // namespace conecusp
