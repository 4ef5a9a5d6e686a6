#include "conecusp/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "conecusp/parallel.hpp"

namespace conecusp {

namespace {

double log_modulus_h(const MeromorphicSum& h, Complex z, Complex* value = nullptr) {
  const Complex v = eval(h, z).value;
  if (std::abs(v) <= 1e-12 * abs_term_sum(h, z)) {
    throw NumericalError(ErrorKind::ZeroProximity, "density evaluated at a zero of h");
  }
  if (value) *value = v;
  return std::log(std::abs(v));
}

double checked_imag(Complex f) {
  if (!(f.imag() > 0.0)) {
    throw NumericalError(ErrorKind::HalfPlaneViolation,
                         "developing map leaves the upper half-plane (lambda too small)");
  }
  return f.imag();
}

/// Offsets +-s, +-is for s and s/2.
std::vector<Complex> stencil_offsets(double s) {
  std::vector<Complex> out;
  for (double step : {s, 0.5 * s}) {
    out.insert(out.end(), {Complex(step, 0.0), Complex(-step, 0.0), Complex(0.0, step),
                           Complex(0.0, -step)});
  }
  return out;
}

double richardson_laplacian(const std::vector<double>& d, double s) {
  double lap[2];
  double step = s;
  for (int level = 0; level < 2; ++level) {
    const double sum = d[4 * level] + d[4 * level + 1] + d[4 * level + 2] + d[4 * level + 3];
    lap[level] = sum / (step * step);
    step *= 0.5;
  }
  return (4.0 * lap[1] - lap[0]) / 3.0;
}

}  // namespace

double density_u(const MeromorphicSum& h, double lambda, const Polyline& path) {
  const auto s = eval_f(h, lambda, path);
  return log_modulus_h(h, path.end()) - std::log(checked_imag(s.value));
}

double DensityField::u(Complex z) const {
  const auto s = map_.sample(lambda_, z);
  return log_modulus_h(map_.h(), z) - std::log(checked_imag(s.value));
}

DensityField::Local DensityField::local(Complex c, const std::vector<Complex>& offsets) const {
  const auto s = map_.sample(lambda_, c);
  Complex hc;
  const double log_h = log_modulus_h(map_.h(), c, &hc);
  const double im_c = checked_imag(s.value);
  Local out;
  out.u_center = log_h - std::log(im_c);
  out.log_h_differences.reserve(offsets.size());
  out.log_im_differences.reserve(offsets.size());
  for (const Complex o : offsets) {
    Complex hz;
    log_modulus_h(map_.h(), c + o, &hz);
    const double d_im = map_.segment(c, c + o).imag();
    checked_imag(Complex(0.0, im_c + d_im));
    out.log_h_differences.push_back(std::log(std::abs(hz / hc)));
    out.log_im_differences.push_back(std::log1p(d_im / im_c));
  }
  return out;
}

double MetricGrid::masked_fraction() const {
  if (mask.empty()) return 0.0;
  const auto n = std::count(mask.begin(), mask.end(), std::uint8_t{1});
  return static_cast<double>(n) / static_cast<double>(mask.size());
}

MetricGrid sample_grid(const DensityField& field, const Rect& window, double spacing,
                       const GridOptions& options) {
  if (window.empty()) throw std::invalid_argument("grid window is empty");
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const MeromorphicSum& h = field.map().h();

  std::vector<Complex> singular;
  for (const auto& t : h.terms()) singular.push_back(t.pole);
  if (!options.zeros.empty()) {
    singular.insert(singular.end(), options.zeros.begin(), options.zeros.end());
  } else if (options.locate) {
    const Complex mid(0.5 * (window.x_min + window.x_max), 0.5 * (window.y_min + window.y_max));
    double radius = 0.5 * std::hypot(window.width(), window.height()) * 1.001;
    for (int attempt = 0;; ++attempt) {
      try {
        for (const auto& z : locate_zeros(h, Disc{mid, radius})) singular.push_back(z.location);
        break;
      } catch (const NumericalError& e) {
        if (e.kind() != ErrorKind::BoundaryDegeneracy || attempt >= 5) throw;
        radius *= 1.01;
      }
    }
  }

  MetricGrid grid;
  grid.origin = Complex(window.x_min, window.y_min);
  grid.spacing = spacing;
  grid.nx = static_cast<std::size_t>(std::floor(window.width() / spacing + 1e-9)) + 1;
  grid.ny = static_cast<std::size_t>(std::floor(window.height() / spacing + 1e-9)) + 1;
  const std::size_t n = grid.nx * grid.ny;
  grid.u.assign(n, std::numeric_limits<double>::quiet_NaN());
  grid.mask.assign(n, 0);

  const double mask_radius = std::max(5.0 * spacing, h.pole_guard());
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const Complex z = grid.node(ix, iy);
      bool masked = options.domain && !options.domain->contains(z);
      for (const Complex s : singular) {
        if (std::abs(z - s) < mask_radius * (1.0 - 1e-9)) masked = true;
      }
      grid.mask[iy * grid.nx + ix] = masked ? 1 : 0;
    }
  }
  // With real residues Im f is single-valued, so each row is marched from its
  // previous unmasked node by one short segment.
  bool real_residues = true;
  for (const auto& t : h.terms()) real_residues = real_residues && t.residue.imag() == 0.0;
  const auto& map = field.map();
  parallel_for(grid.ny, [&](std::size_t iy) {
    Complex prev_z{}, prev_f{};
    bool have_prev = false;
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const std::size_t i = iy * grid.nx + ix;
      if (grid.mask[i]) continue;
      const Complex z = grid.node(ix, iy);
      bool march = real_residues && have_prev;
      if (march) {
        for (const auto& t : h.terms()) {
          if (distance_to_segment(t.pole, prev_z, z) < 0.5 * spacing) march = false;
        }
      }
      const Complex f = march ? prev_f + map.segment(prev_z, z)
                              : map.sample(field.lambda(), z).value;
      grid.u[i] = log_modulus_h(h, z) - std::log(checked_imag(f));
      prev_z = z;
      prev_f = f;
      have_prev = true;
    }
  });
  return grid;
}

double default_stencil(double singular_distance) {
  return std::max(1e-3 * singular_distance, 1e-6);
}

CurvatureReport curvature_check(const DensityField& field, const std::vector<Complex>& points,
                                double stencil, const std::vector<Complex>& singular_points) {
  if (points.empty()) throw std::invalid_argument("curvature check needs at least one point");
  std::vector<Complex> singular = singular_points;
  for (const auto& t : field.map().h().terms()) singular.push_back(t.pole);

  CurvatureReport rep;
  rep.curvature.resize(points.size());
  std::vector<double> steps(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const Complex c = points[i];
    double s = stencil;
    if (!(s > 0.0)) {
      double d = std::numeric_limits<double>::infinity();
      for (const Complex p : singular) d = std::min(d, std::abs(p - c));
      s = default_stencil(std::isfinite(d) ? d : 1.0);
    }
    steps[i] = s;
    const auto loc = field.local(c, stencil_offsets(s));
    const double lap = -richardson_laplacian(loc.log_im_differences, s);
    rep.curvature[i] = -std::exp(-2.0 * loc.u_center) * lap;
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(rep.curvature[i] + 1.0));
    rep.stencil_spacing = std::max(rep.stencil_spacing, steps[i]);
  }
  rep.nodes_tested = points.size();
  return rep;
}

CurvatureReport curvature_of_density(const std::function<double(Complex)>& u,
                                     const std::vector<Complex>& points, double stencil) {
  if (points.empty()) throw std::invalid_argument("curvature check needs at least one point");
  if (!(stencil > 0.0)) throw std::invalid_argument("stencil must be positive");
  CurvatureReport rep;
  rep.stencil_spacing = stencil;
  const auto offsets = stencil_offsets(stencil);
  for (const Complex c : points) {
    const double uc = u(c);
    std::vector<double> d;
    d.reserve(offsets.size());
    for (const Complex o : offsets) d.push_back(u(c + o) - uc);
    const double k = -std::exp(-2.0 * uc) * richardson_laplacian(d, stencil);
    rep.curvature.push_back(k);
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(k + 1.0));
  }
  rep.nodes_tested = points.size();
  return rep;
}

namespace {

struct Circumference {
  double full = 0.0;
  double half = 0.0;
};

Circumference circumference(const DensityField& field, Complex p, double r, std::size_t nodes) {
  const auto& map = field.map();
  std::vector<Complex> z(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    z[k] = p + std::polar(r, kTwoPi * static_cast<double>(k) / static_cast<double>(nodes));
  }
  Complex f = map.sample(field.lambda(), z[0]).value;
  double full = 0.0, half = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    if (k > 0) f += map.segment(z[k - 1], z[k]);
    const double density = std::abs(eval(map.h(), z[k]).value) / checked_imag(f);
    full += density;
    if (k % 2 == 0) half += density;
  }
  const double n = static_cast<double>(nodes);
  return {kTwoPi * r * full / n, kTwoPi * r * half / (0.5 * n)};
}

}  // namespace

ConeAngleEstimate measure_cone_angle(const DensityField& field, Complex p, double r1, double r2,
                                     std::size_t nodes) {
  if (!(r1 > 0.0) || !(r2 > 0.0) || r1 == r2) {
    throw std::invalid_argument("cone-angle radii must be positive and distinct");
  }
  if (nodes < 16 || (nodes & (nodes - 1)) != 0) {
    throw std::invalid_argument("node count must be a power of two >= 16");
  }
  const auto c1 = circumference(field, p, r1, nodes);
  const auto c2 = circumference(field, p, r2, nodes);
  const double lr = std::log(r1 / r2);
  ConeAngleEstimate out;
  out.circumference_outer = c1.full;
  out.circumference_inner = c2.full;
  out.theta = std::log(c1.full / c2.full) / lr;
  out.estimate = std::abs(out.theta - std::log(c1.half / c2.half) / lr);
  return out;
}

}  // namespace conecusp
