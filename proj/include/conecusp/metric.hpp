#ifndef CONECUSP_METRIC_HPP
#define CONECUSP_METRIC_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "conecusp/developing.hpp"

namespace conecusp {

/// Log-density of the pullback metric e^{2u}|dz|^2 = f^*(|dw|^2 / (Im w)^2),
/// u = ln|h| - ln(Im f). Throws HalfPlaneViolation when Im f <= 0.
double density_u(const MeromorphicSum& h, double lambda, const Polyline& path);

/// Density evaluation bound to one developing map and lambda.
class DensityField {
 public:
  DensityField(DevelopingMap map, double lambda) : map_(std::move(map)), lambda_(lambda) {}

  const DevelopingMap& map() const { return map_; }
  double lambda() const { return lambda_; }

  double u(Complex z) const;

  /// u at c plus, for each offset, the differences of ln|h| and of ln(Im f)
  /// between c + o and c, computed from ratios and short segment integrals so
  /// that they carry no rounding from the magnitude of u itself.
  struct Local {
    double u_center = 0.0;
    std::vector<double> log_h_differences;
    std::vector<double> log_im_differences;
  };
  Local local(Complex c, const std::vector<Complex>& offsets) const;

 private:
  DevelopingMap map_;
  double lambda_;
};

struct MetricGrid {
  Complex origin{};
  double spacing = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> u;          // row-major, index iy * nx + ix
  std::vector<std::uint8_t> mask;  // 1 = masked

  Complex node(std::size_t ix, std::size_t iy) const {
    return origin + Complex(static_cast<double>(ix) * spacing, static_cast<double>(iy) * spacing);
  }
  double masked_fraction() const;
};

struct GridOptions {
  /// Zeros of h to mask; located automatically over the window's
  /// circumscribed disc when empty and `locate` is set.
  std::vector<Complex> zeros;
  bool locate = true;
  /// Nodes outside this disc are masked.
  std::optional<Disc> domain;
};

MetricGrid sample_grid(const DensityField& field, const Rect& window, double spacing,
                       const GridOptions& options = {});

struct CurvatureReport {
  double max_abs_deviation = 0.0;  // sup |K + 1|
  std::size_t nodes_tested = 0;
  double stencil_spacing = 0.0;  // largest stencil used
  std::vector<double> curvature;  // K at each point
};

/// Default stencil at a point: 1e-3 * distance to the nearest singular point,
/// floored at 1e-6.
double default_stencil(double singular_distance);

/// K = -e^{-2u} Laplacian(u) by a 5-point stencil at s and s/2 with one
/// Richardson pass. ln|h| is harmonic off the zeros and poles, so only
/// -ln(Im f) is differenced. stencil <= 0 selects default_stencil per point.
CurvatureReport curvature_check(const DensityField& field, const std::vector<Complex>& points,
                                double stencil, const std::vector<Complex>& singular_points = {});

/// Same check for an arbitrary log-density callback.
CurvatureReport curvature_of_density(const std::function<double(Complex)>& u,
                                     const std::vector<Complex>& points, double stencil);

struct ConeAngleEstimate {
  double theta = 0.0;
  double circumference_inner = 0.0;
  double circumference_outer = 0.0;
  double estimate = 0.0;  // node-halving change of theta
};

/// theta = log(C(r1)/C(r2)) / log(r1/r2) with C(r) the metric length of
/// |z - p| = r, measured with `nodes` trapezoid nodes.
ConeAngleEstimate measure_cone_angle(const DensityField& field, Complex p, double r1, double r2,
                                     std::size_t nodes = 512);

}  // namespace conecusp

#endif  // CONECUSP_METRIC_HPP
