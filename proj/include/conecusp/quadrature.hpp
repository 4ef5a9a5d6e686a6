#ifndef CONECUSP_QUADRATURE_HPP
#define CONECUSP_QUADRATURE_HPP

#include <cstddef>
#include <functional>

#include "conecusp/types.hpp"

namespace conecusp {

using ComplexFn = std::function<Complex(Complex)>;

struct SegmentIntegral {
  Complex value{};
  double error = 0.0;
  bool converged = true;  // false if the recursion cap was hit somewhere
  int max_depth = 0;
  std::size_t panels = 0;
};

/// Adaptive Gauss-Legendre quadrature of g(z) dz along the straight segment
/// [a, b]. Each panel compares a 10-point rule against the same rule on its two
/// halves; the absolute tolerance is distributed in proportion to panel length.
/// Refinement stops (converged = false) at depth_cap or after max_panels panels.
SegmentIntegral integrate_segment(const ComplexFn& g, Complex a, Complex b,
                                  double abs_tol = 1e-12, int depth_cap = 40,
                                  std::size_t max_panels = 200000);

/// Sum with fixed pairwise reduction order.
Complex pairwise_sum(const Complex* values, std::size_t n);

}  // namespace conecusp

#endif  // CONECUSP_QUADRATURE_HPP
