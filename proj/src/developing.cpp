#include "conecusp/developing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "conecusp/parallel.hpp"

namespace conecusp {

namespace {

std::atomic<unsigned> g_threads{1};

constexpr Complex kMinusI{0.0, -1.0};
constexpr double kSegmentTol = 1e-12;
constexpr int kSegmentDepth = 40;

void require_finite(const MeromorphicSum& h) {
  if (!h.is_finite()) throw std::invalid_argument("developing map requires a finite sum");
}

double detour_radius(const MeromorphicSum& h, Complex base, std::size_t i) {
  const double d = h.nearest_pole_distance(i);
  if (std::isfinite(d)) return 0.45 * d;
  const double b = std::abs(base - h.terms()[i].pole);
  return b > 0.0 ? 0.45 * b : 0.45;
}

void push_distinct(std::vector<Complex>& v, Complex z) {
  if (v.empty() || v.back() != z) v.push_back(z);
}

}  // namespace

void set_thread_count(unsigned n) { g_threads = std::max(1u, n); }
unsigned thread_count() { return g_threads; }

PathIntegral path_integral(const MeromorphicSum& h, const Polyline& path) {
  require_finite(h);
  if (path.vertices.empty()) throw std::invalid_argument("empty path");
  const double guard = h.pole_guard();
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    const Complex a = path.vertices[i - 1];
    const Complex b = path.vertices[i];
    if (a == b) throw std::invalid_argument("consecutive path vertices coincide");
    for (const auto& t : h.terms()) {
      if (distance_to_segment(t.pole, a, b) < guard) {
        throw NumericalError(ErrorKind::PathThroughPole, "path segment inside pole guard");
      }
    }
  }
  if (path.vertices.size() == 1) {
    for (const auto& t : h.terms()) {
      if (std::abs(t.pole - path.vertices[0]) < guard) {
        throw NumericalError(ErrorKind::PathThroughPole, "base point inside pole guard");
      }
    }
  }
  auto omega = [&h](Complex z) { return kMinusI * eval(h, z).value; };
  PathIntegral out;
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    const auto seg =
        integrate_segment(omega, path.vertices[i - 1], path.vertices[i], kSegmentTol, kSegmentDepth);
    out.value += seg.value;
    out.error += seg.error;
  }
  return out;
}

Complex default_base_point(const MeromorphicSum& h) {
  const double guard = h.pole_guard();
  for (const auto& t : h.terms()) {
    if (std::abs(t.pole) < guard) return {-0.5, 0.0};
  }
  return {0.0, 0.0};
}

Polyline canonical_path(const MeromorphicSum& h, Complex base, Complex z) {
  require_finite(h);
  Polyline path;
  path.vertices.push_back(base);
  if (z == base) return path;

  const Complex dir = (z - base) / std::abs(z - base);
  struct Hit {
    Complex pole;
    double t;
    double rho;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Complex pole = h.terms()[i].pole;
    const double rho = detour_radius(h, base, i);
    if (distance_to_segment(pole, base, z) < rho) {
      hits.push_back({pole, ((pole - base) * std::conj(dir)).real(), rho});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.t < b.t; });

  constexpr double kArcStep = kPi / 16.0;
  for (const auto& hit : hits) {
    const Complex p = hit.pole;
    const double rho = hit.rho;
    const double perp = ((p - base) * std::conj(dir)).imag();
    const double half_chord = std::sqrt(std::max(rho * rho - perp * perp, 0.0));

    Complex entry;
    if (std::abs(base - p) < rho) {
      entry = p + rho * (base - p) / std::abs(base - p);
    } else {
      entry = base + (hit.t - half_chord) * dir;
    }
    const bool ends_inside = std::abs(z - p) < rho;
    const Complex exit =
        ends_inside ? p + rho * (z - p) / std::abs(z - p) : base + (hit.t + half_chord) * dir;

    push_distinct(path.vertices, entry);
    // Clockwise sweep keeps the pole on the right.
    const double phi1 = std::arg(entry - p);
    const double phi2 = std::arg(exit - p);
    double sweep = std::fmod(phi1 - phi2 + 4.0 * kPi, kTwoPi);
    if (sweep > 0.0) {
      const int n = std::max(1, static_cast<int>(std::ceil(sweep / kArcStep)));
      for (int k = 1; k < n; ++k) {
        push_distinct(path.vertices, p + std::polar(rho, phi1 - sweep * k / n));
      }
      push_distinct(path.vertices, exit);
    }
    if (ends_inside) break;
  }
  push_distinct(path.vertices, z);
  return path;
}

DevelopingSample eval_f(const MeromorphicSum& h, double lambda, const Polyline& path) {
  const auto integral = path_integral(h, path);
  DevelopingSample s;
  s.z = path.end();
  s.lambda = lambda;
  s.value = Complex(0.0, lambda) + integral.value;
  s.path = path;
  s.quadrature_error = integral.error;
  return s;
}

DevelopingMap::DevelopingMap(MeromorphicSum h) : DevelopingMap(h, default_base_point(h)) {}

DevelopingMap::DevelopingMap(MeromorphicSum h, Complex base) : h_(std::move(h)), base_(base) {
  require_finite(h_);
}

PathIntegral DevelopingMap::integral(Complex z) const {
  return path_integral(h_, canonical_path(h_, base_, z));
}

DevelopingSample DevelopingMap::sample(double lambda, Complex z) const {
  return eval_f(h_, lambda, canonical_path(h_, base_, z));
}

Complex DevelopingMap::segment(Complex a, Complex b) const {
  auto omega = [this](Complex z) { return kMinusI * eval(h_, z).value; };
  return integrate_segment(omega, a, b, kSegmentTol, kSegmentDepth).value;
}

Monodromy loop_translation(const MeromorphicSum& h, const Circle& loop) {
  require_finite(h);
  const double guard = h.pole_guard();
  for (const auto& t : h.terms()) {
    if (std::abs(std::abs(t.pole - loop.center()) - loop.radius()) < guard) {
      throw NumericalError(ErrorKind::PathThroughPole, "loop passes through a pole");
    }
  }
  auto omega = [&h](Complex z) { return kMinusI * eval(h, z).value; };
  const auto I = integrate_circle_converged(omega, loop, 1e-13);
  return {I.value.real(), I.value, I.estimate, loop.radius()};
}

Monodromy monodromy(const MeromorphicSum& h, std::size_t pole_index) {
  require_finite(h);
  if (pole_index >= h.size()) throw std::out_of_range("pole index out of range");
  const Complex p = h.terms()[pole_index].pole;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i != pole_index) nearest = std::min(nearest, std::abs(h.terms()[i].pole - p));
  }
  const double radius = std::isfinite(nearest) ? 0.45 * nearest : 0.5;
  if (!(radius > 1e-12)) {
    throw NumericalError(ErrorKind::SeparationTooSmall, "no isolating loop around pole");
  }
  return loop_translation(h, Circle(p, radius, 64));
}

Lambda0Estimate estimate_lambda0(const DevelopingMap& map, const Disc& domain, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  const MeromorphicSum& h = map.h();
  Lambda0Estimate est;
  est.grid_resolution = resolution;
  const long n = static_cast<long>(std::floor(domain.radius / resolution));
  for (long iy = -n; iy <= n; ++iy) {
    for (long ix = -n; ix <= n; ++ix) {
      const Complex p = domain.center + Complex(ix * resolution, iy * resolution);
      if (std::abs(p - domain.center) > domain.radius) continue;
      bool near_pole = false;
      for (const auto& t : h.terms()) {
        if (std::abs(p - t.pole) < resolution) near_pole = true;
      }
      if (!near_pole) est.grid.push_back(p);
    }
  }
  if (est.grid.empty()) throw std::invalid_argument("lambda0 grid is empty");

  // With real residues the monodromy is a real translation, so Im of the
  // integral is single-valued and each row can be marched by short segments.
  bool real_residues = true;
  for (const auto& t : h.terms()) real_residues = real_residues && t.residue.imag() == 0.0;

  std::vector<std::size_t> row_start{0};
  for (std::size_t i = 1; i < est.grid.size(); ++i) {
    if (est.grid[i].imag() != est.grid[i - 1].imag()) row_start.push_back(i);
  }
  row_start.push_back(est.grid.size());

  std::vector<double> values(est.grid.size());
  std::vector<double> moduli(est.grid.size());
  parallel_for(row_start.size() - 1, [&](std::size_t row) {
    Complex prev_value{};
    for (std::size_t i = row_start[row]; i < row_start[row + 1]; ++i) {
      const Complex z = est.grid[i];
      bool march = real_residues && i > row_start[row];
      if (march) {
        for (const auto& t : h.terms()) {
          if (distance_to_segment(t.pole, est.grid[i - 1], z) < 0.5 * resolution) march = false;
        }
      }
      prev_value = march ? prev_value + map.segment(est.grid[i - 1], z) : map.integral(z).value;
      values[i] = -prev_value.imag();
      moduli[i] = std::abs(eval(h, z).value);
    }
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  est.value = values[best];
  est.argmax = est.grid[best];
  est.points = est.grid.size();
  est.margin = resolution * *std::max_element(moduli.begin(), moduli.end());
  return est;
}

}  // namespace conecusp
