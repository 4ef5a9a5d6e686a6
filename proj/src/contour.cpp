#include "conecusp/contour.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace conecusp {

Circle::Circle(Complex center, double radius, std::size_t nodes)
    : center_(center), radius_(radius), nodes_(nodes) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("circle radius must be positive and finite");
  }
  if (nodes < 16 || (nodes & (nodes - 1)) != 0) {
    throw std::invalid_argument("circle node count must be a power of two >= 16");
  }
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct PeriodicMean {
  Complex mean{};
  double estimate = 0.0;
  double abs_mean = 0.0;
  std::size_t nodes = 0;
};

/// Mean of phi over equispaced angles with node doubling. phi receives the
/// angle and must return a finite value.
template <typename Phi>
PeriodicMean periodic_mean(Phi&& phi, std::size_t n0, double abs_tol, std::size_t max_nodes,
                           bool single_pass = false) {
  std::vector<Complex> samples(n0);
  auto sample = [&](std::size_t k, std::size_t n) {
    const Complex v = phi(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalError(ErrorKind::NonFinite, "non-finite sample on circle");
    }
    return v;
  };
  for (std::size_t k = 0; k < n0; ++k) samples[k] = sample(k, n0);

  auto summarize = [&](std::size_t n) {
    PeriodicMean out;
    out.nodes = n;
    std::vector<Complex> evens;
    evens.reserve(n / 2);
    double abs_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      abs_sum += std::abs(samples[k]);
      if (k % 2 == 0) evens.push_back(samples[k]);
    }
    const Complex full = pairwise_sum(samples.data(), n) / static_cast<double>(n);
    const Complex half = pairwise_sum(evens.data(), evens.size()) / static_cast<double>(n / 2);
    out.mean = full;
    out.estimate = std::abs(full - half);
    out.abs_mean = abs_sum / static_cast<double>(n);
    return out;
  };

  std::size_t n = n0;
  PeriodicMean cur = summarize(n);
  while (!single_pass && n < max_nodes) {
    const double floor = 64.0 * kEps * cur.abs_mean;
    if (cur.estimate <= std::max(abs_tol, floor)) break;
    std::vector<Complex> next(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      next[2 * k] = samples[k];
      next[2 * k + 1] = sample(2 * k + 1, 2 * n);
    }
    samples = std::move(next);
    n *= 2;
    cur = summarize(n);
  }
  return cur;
}

}  // namespace

ContourIntegral integrate_circle(const ComplexFn& g, const Circle& c) {
  const double r = c.radius();
  auto phi = [&](double theta) {
    const Complex e = std::polar(1.0, theta);
    return g(c.center() + r * e) * Complex(0.0, r) * e;
  };
  const auto m = periodic_mean(phi, c.nodes(), 0.0, c.nodes(), true);
  return {kTwoPi * m.mean, kTwoPi * m.estimate, m.nodes};
}

ContourIntegral integrate_circle_converged(const ComplexFn& g, const Circle& c, double abs_tol,
                                           std::size_t max_nodes) {
  const double r = c.radius();
  auto phi = [&](double theta) {
    const Complex e = std::polar(1.0, theta);
    return g(c.center() + r * e) * Complex(0.0, r) * e;
  };
  const auto m = periodic_mean(phi, c.nodes(), abs_tol / kTwoPi, max_nodes);
  return {kTwoPi * m.mean, kTwoPi * m.estimate, m.nodes};
}

int poles_inside(const MeromorphicSum& h, Complex center, double radius) {
  int n = 0;
  for (const auto& t : h.terms()) {
    if (std::abs(t.pole - center) < radius) ++n;
  }
  return n;
}

WindingReport winding_count(const MeromorphicSum& h, const Circle& c) {
  if (!h.is_finite()) throw std::invalid_argument("winding_count requires a finite sum");
  const double guard = h.pole_guard();
  for (const auto& t : h.terms()) {
    if (std::abs(std::abs(t.pole - c.center()) - c.radius()) < guard) {
      throw NumericalError(ErrorKind::BoundaryDegeneracy, "pole on the counting circle");
    }
  }
  const double r = c.radius();
  auto phi = [&](double theta) {
    const Complex e = std::polar(1.0, theta);
    const Complex z = c.center() + r * e;
    const auto d = eval_derivatives(h, z, 1);
    if (std::abs(d.values[0]) <= 1e-10 * abs_term_sum(h, z)) {
      throw NumericalError(ErrorKind::BoundaryDegeneracy, "zero on the counting circle");
    }
    return d.values[1] / d.values[0] * (r * e);
  };
  const auto m = periodic_mean(phi, c.nodes(), 1e-6, kMaxCircleNodes);

  WindingReport rep;
  rep.raw = m.mean;
  rep.count = static_cast<int>(std::lround(m.mean.real()));
  rep.defect = std::abs(m.mean - Complex(rep.count, 0.0));
  rep.nodes = m.nodes;
  if (rep.defect >= 0.25 || m.estimate >= 0.25) {
    throw NumericalError(ErrorKind::NonConvergence, "winding number not certified at node cap");
  }
  return rep;
}

LaurentCoefficient laurent_coeff(const ComplexFn& g, Complex center, double radius, int k,
                                 double abs_tol) {
  const Circle c(center, radius, 64);
  auto phi = [&](double theta) {
    const Complex e = std::polar(1.0, -static_cast<double>(k) * theta);
    return g(center + std::polar(radius, theta)) * std::pow(radius, -k) * e;
  };
  const auto m = periodic_mean(phi, c.nodes(), abs_tol, kMaxCircleNodes);
  return {m.mean, m.estimate, radius, m.nodes};
}

PrincipalPart principal_part(const ComplexFn& g, Complex center, double radius, double abs_tol) {
  const auto c2 = laurent_coeff(g, center, radius, -2, abs_tol);
  const auto c1 = laurent_coeff(g, center, radius, -1, abs_tol);
  return {c2.value, c1.value, radius, std::max(c2.estimate, c1.estimate)};
}

}  // namespace conecusp
