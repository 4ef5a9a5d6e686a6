#ifndef CONECUSP_DEVELOPING_HPP
#define CONECUSP_DEVELOPING_HPP

#include <cstddef>
#include <vector>

#include "conecusp/contour.hpp"
#include "conecusp/meromorphic.hpp"

namespace conecusp {

/// Integration path; its first vertex is the base point.
struct Polyline {
  std::vector<Complex> vertices;

  Complex start() const { return vertices.front(); }
  Complex end() const { return vertices.back(); }
};

struct PathIntegral {
  Complex value{};
  double error = 0.0;
};

/// Integral of omega = -i h(z) dz along the path. h must be finite.
PathIntegral path_integral(const MeromorphicSum& h, const Polyline& path);

/// 0, unless 0 lies within the pole guard of a pole; then -1/2.
Complex default_base_point(const MeromorphicSum& h);

/// Straight path from base to z, with a clockwise arc around every pole it
/// would pass closer than 0.45 times that pole's nearest-neighbour distance.
Polyline canonical_path(const MeromorphicSum& h, Complex base, Complex z);

struct DevelopingSample {
  Complex z{};
  double lambda = 0.0;
  Complex value{};
  Polyline path;
  double quadrature_error = 0.0;
};

/// f_lambda(z) = i lambda + integral of omega along `path` (ending at z).
DevelopingSample eval_f(const MeromorphicSum& h, double lambda, const Polyline& path);

/// Bundles a finite sum with its base point and evaluates along canonical paths.
class DevelopingMap {
 public:
  explicit DevelopingMap(MeromorphicSum h);
  DevelopingMap(MeromorphicSum h, Complex base);

  const MeromorphicSum& h() const { return h_; }
  Complex base() const { return base_; }

  /// Integral of omega from the base point along the canonical path.
  PathIntegral integral(Complex z) const;
  DevelopingSample sample(double lambda, Complex z) const;
  /// Integral of omega along the straight segment [a, b].
  Complex segment(Complex a, Complex b) const;

 private:
  MeromorphicSum h_;
  Complex base_;
};

struct Monodromy {
  double translation = 0.0;  // Re t
  Complex raw{};             // t = contour integral of omega
  double estimate = 0.0;
  double loop_radius = 0.0;
};

/// Translation picked up by f along a positively oriented loop around pole
/// `pole_index` (0-based into h.terms()), of radius 0.45 times the distance
/// to the nearest other pole.
Monodromy monodromy(const MeromorphicSum& h, std::size_t pole_index);

/// Translation along an arbitrary positively oriented circle.
Monodromy loop_translation(const MeromorphicSum& h, const Circle& loop);

struct Lambda0Estimate {
  double value = 0.0;  // max of -Im(integral of omega) over the sampled grid
  double grid_resolution = 0.0;
  double margin = 0.0;  // resolution * sup|h| over the grid (heuristic)
  Complex argmax{};
  std::size_t points = 0;
  std::vector<Complex> grid;  // sampled points in enumeration order
};

/// Square grid of the given resolution over `domain`, skipping points within
/// one resolution of a pole.
Lambda0Estimate estimate_lambda0(const DevelopingMap& map, const Disc& domain, double resolution);

}  // namespace conecusp

#endif  // CONECUSP_DEVELOPING_HPP
