#ifndef CONECUSP_CONTOUR_HPP
#define CONECUSP_CONTOUR_HPP

#include <cstddef>

#include "conecusp/meromorphic.hpp"
#include "conecusp/quadrature.hpp"

namespace conecusp {

/// Quadrature circle. Node count is a power of two >= 16 so that the
/// half-resolution rule is a subset of the nodes.
class Circle {
 public:
  Circle(Complex center, double radius, std::size_t nodes = 64);

  Complex center() const { return center_; }
  double radius() const { return radius_; }
  std::size_t nodes() const { return nodes_; }
  Circle with_nodes(std::size_t nodes) const { return {center_, radius_, nodes}; }

 private:
  Complex center_;
  double radius_;
  std::size_t nodes_;
};

inline constexpr std::size_t kMaxCircleNodes = std::size_t{1} << 16;

struct ContourIntegral {
  Complex value{};
  double estimate = 0.0;  // |I(n) - I(n/2)|
  std::size_t nodes = 0;
};

/// Trapezoid rule for the contour integral of g(z) dz over the circle.
ContourIntegral integrate_circle(const ComplexFn& g, const Circle& c);

/// Like integrate_circle, doubling the node count from c.nodes() until the
/// estimate drops below abs_tol, stalls, or max_nodes is reached.
ContourIntegral integrate_circle_converged(const ComplexFn& g, const Circle& c, double abs_tol,
                                           std::size_t max_nodes = kMaxCircleNodes);

struct WindingReport {
  Complex raw{};  // (1/2 pi i) contour integral of h'/h
  int count = 0;  // zeros minus poles
  double defect = 0.0;
  std::size_t nodes = 0;
};

/// Argument-principle count Z - P of a finite sum inside the circle.
WindingReport winding_count(const MeromorphicSum& h, const Circle& c);

struct LaurentCoefficient {
  Complex value{};
  double estimate = 0.0;
  double radius = 0.0;
  std::size_t nodes = 0;
};

/// k-th Laurent coefficient of g about `center`, extracted on |z - center| = radius.
LaurentCoefficient laurent_coeff(const ComplexFn& g, Complex center, double radius, int k,
                                 double abs_tol = 1e-13);

/// Coefficients of (z-p)^-2 and (z-p)^-1.
struct PrincipalPart {
  Complex c2{};
  Complex c1{};
  double extraction_radius = 0.0;
  double estimate = 0.0;
};

PrincipalPart principal_part(const ComplexFn& g, Complex center, double radius,
                             double abs_tol = 1e-13);

/// Number of explicit poles of h strictly inside |z - center| < radius.
int poles_inside(const MeromorphicSum& h, Complex center, double radius);

}  // namespace conecusp

#endif  // CONECUSP_CONTOUR_HPP
