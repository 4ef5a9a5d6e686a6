#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conecusp/contour.hpp"
#include "conecusp/meromorphic.hpp"

namespace conecusp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Cell {
  double x0, x1, y0, y1;

  double diameter() const { return std::hypot(x1 - x0, y1 - y0); }
  Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Complex z, double slack) const {
    return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack &&
           z.imag() <= y1 + slack;
  }
};

struct Candidate {
  Complex location;
  int cell_count;
  double residual;
};

class ZeroSearch {
 public:
  ZeroSearch(const MeromorphicSum& f, const ZeroSearchOptions& opt) : f_(f), opt_(opt) {}

  /// Zeros of f in the cell (argument principle plus exact pole census), or
  /// nullopt when an edge passes too close to a zero or pole.
  std::optional<int> count(const Cell& c) const {
    const Complex corners[4] = {{c.x0, c.y0}, {c.x1, c.y0}, {c.x1, c.y1}, {c.x0, c.y1}};
    const double guard = std::max(f_.pole_guard(), 1e-9 * c.diameter());
    for (const auto& t : f_.terms()) {
      for (int e = 0; e < 4; ++e) {
        if (distance_to_segment(t.pole, corners[e], corners[(e + 1) % 4]) < guard) {
          return std::nullopt;
        }
      }
    }
    auto log_deriv = [&](Complex z) {
      const auto d = eval_derivatives(f_, z, 1);
      return d.values[1] / d.values[0];
    };
    Complex total{};
    try {
      for (int e = 0; e < 4; ++e) {
        const auto seg =
            integrate_segment(log_deriv, corners[e], corners[(e + 1) % 4], 1e-5, 40, 4000);
        if (!seg.converged) return std::nullopt;
        total += seg.value;
      }
    } catch (const NumericalError&) {
      return std::nullopt;
    }
    const Complex raw = total / Complex(0.0, kTwoPi);
    const long n = std::lround(raw.real());
    if (std::abs(raw - Complex(static_cast<double>(n), 0.0)) >= 0.25) return std::nullopt;
    int poles = 0;
    for (const auto& t : f_.terms()) {
      const Complex p = t.pole;
      if (p.real() > c.x0 && p.real() < c.x1 && p.imag() > c.y0 && p.imag() < c.y1) ++poles;
    }
    const int zeros = static_cast<int>(n) + poles;
    if (zeros < 0) return std::nullopt;
    return zeros;
  }

  std::optional<Candidate> newton(const Cell& cell, int multiplicity) const {
    const double m = static_cast<double>(multiplicity);
    const double step_tol = multiplicity == 1 ? opt_.tol : std::pow(opt_.tol, 1.0 / m);
    Complex z = cell.center();
    try {
      double fz = std::abs(eval(f_, z).value);
      for (int it = 0; it < opt_.max_newton; ++it) {
        const auto d = eval_derivatives(f_, z, 1);
        if (d.values[1] == Complex{}) return std::nullopt;
        const Complex step = m * d.values[0] / d.values[1];
        double t = 1.0;
        Complex next = z - step;
        double fnext = std::numeric_limits<double>::infinity();
        bool reduced = false;
        for (int k = 0; k <= opt_.max_halvings; ++k) {
          next = z - t * step;
          fnext = std::abs(eval(f_, next).value);
          if (fnext < fz) {
            reduced = true;
            break;
          }
          t *= 0.5;
        }
        const double floor = std::max(opt_.tol, 64.0 * kEps * abs_term_sum(f_, z));
        if (!reduced) {
          // Stagnation: accept only at the rounding floor.
          if (fz <= floor) return Candidate{z, multiplicity, fz};
          return std::nullopt;
        }
        const double moved = std::abs(next - z);
        z = next;
        fz = fnext;
        if (fz <= floor && moved <= std::max(step_tol, 64.0 * kEps * std::abs(z))) {
          return Candidate{z, multiplicity, fz};
        }
      }
    } catch (const NumericalError&) {
      return std::nullopt;
    }
    return std::nullopt;
  }

  std::optional<int> disc_count(Complex center, double radius) const {
    try {
      const auto w = winding_count(f_, Circle(center, radius, 64));
      return w.count + poles_inside(f_, center, radius);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  }

  std::optional<std::array<Cell, 4>> split(const Cell& c, int parent_zeros,
                                           std::array<int, 4>& counts) const {
    for (int attempt = 0; attempt <= opt_.max_retries; ++attempt) {
      // 0, +1e-4, -1e-4, +2e-4, ...
      const double k = static_cast<double>((attempt + 1) / 2) * (attempt % 2 == 1 ? 1.0 : -1.0);
      const double frac = 0.5 * (1.0 + 1e-4 * k);
      const double xm = c.x0 + frac * (c.x1 - c.x0);
      const double ym = c.y0 + frac * (c.y1 - c.y0);
      std::array<Cell, 4> kids = {Cell{c.x0, xm, c.y0, ym}, Cell{xm, c.x1, c.y0, ym},
                                  Cell{c.x0, xm, ym, c.y1}, Cell{xm, c.x1, ym, c.y1}};
      int sum = 0;
      bool ok = true;
      for (int i = 0; i < 4 && ok; ++i) {
        const auto n = count(kids[i]);
        if (!n) {
          ok = false;
          break;
        }
        counts[i] = *n;
        sum += *n;
      }
      if (ok && sum == parent_zeros) return kids;
    }
    return std::nullopt;
  }

 private:
  const MeromorphicSum& f_;
  const ZeroSearchOptions& opt_;
};

}  // namespace

std::vector<ZeroRecord> locate_zeros(const MeromorphicSum& h, const Disc& region,
                                     const ZeroSearchOptions& opt) {
  if (!(region.radius > 0.0)) throw std::invalid_argument("region radius must be positive");
  const MeromorphicSum f = h.is_finite() ? h : truncate(h, region, opt.tail_tol).sum;
  const Complex c = region.center;
  const double R = region.radius;

  // Census on the region boundary.
  const auto boundary = winding_count(f, Circle(c, R, 256));
  const int expected = boundary.count + poles_inside(f, c, R);

  ZeroSearch search(f, opt);
  std::optional<Cell> root;
  int root_count = 0;
  for (int attempt = 0; attempt <= opt.max_retries && !root; ++attempt) {
    const double w = R * (1.0 + 1e-4 * (attempt + 1));
    const Cell cell{c.real() - w, c.real() + w, c.imag() - w, c.imag() + w};
    if (const auto n = search.count(cell)) {
      root = cell;
      root_count = *n;
    }
  }
  if (!root) {
    throw NumericalError(ErrorKind::BoundaryDegeneracy, "root cell boundary is degenerate");
  }

  struct Found {
    Candidate cand;
    Cell cell;
  };
  std::vector<Found> found;
  std::vector<std::pair<Cell, int>> stack;
  if (root_count > 0) stack.emplace_back(*root, root_count);
  while (!stack.empty()) {
    const auto [cell, zeros] = stack.back();
    stack.pop_back();
    const bool small = cell.diameter() < opt.min_cell;
    if (zeros > 1 && !small) {
      // A multiple zero (or tight cluster) confirmed by a disc count around
      // the Newton limit.
      if (auto cand = search.newton(cell, zeros)) {
        if (cell.contains(cand->location, 0.0) &&
            search.disc_count(cand->location, 1e-3 * cell.diameter()) == zeros) {
          found.push_back({*cand, cell});
          continue;
        }
      }
    }
    if (zeros == 1 || small) {
      if (auto cand = search.newton(cell, zeros)) {
        if (cell.contains(cand->location, 1e-9 * cell.diameter() + opt.tol)) {
          found.push_back({*cand, cell});
          continue;
        }
      }
      if (small) {
        throw NumericalError(ErrorKind::NonConvergence, "Newton refinement failed in cell");
      }
    }
    std::array<int, 4> counts{};
    const auto kids = search.split(cell, zeros, counts);
    if (!kids) {
      throw NumericalError(ErrorKind::BoundaryDegeneracy,
                           "subdivision boundary degenerate after retries");
    }
    for (int i = 3; i >= 0; --i) {
      if (counts[i] > 0) stack.emplace_back((*kids)[i], counts[i]);
    }
  }

  // Multiplicity from the winding count of a disc around each refined zero.
  std::vector<ZeroRecord> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    const Complex w = found[i].cand.location;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (j != i) nearest = std::min(nearest, std::abs(found[j].cand.location - w));
    }
    for (const auto& t : f.terms()) nearest = std::min(nearest, std::abs(t.pole - w));
    const Cell& rc = *root;
    const double to_root_edge = std::min({w.real() - rc.x0, rc.x1 - w.real(), w.imag() - rc.y0,
                                          rc.y1 - w.imag()});
    double rho = 0.5 * nearest;
    if (to_root_edge > 0.0) rho = std::min(rho, to_root_edge);
    rho = std::min(rho, R);
    int mult = found[i].cand.cell_count;
    try {
      const auto wr = winding_count(f, Circle(w, rho, 64));
      mult = wr.count + poles_inside(f, w, rho);
    } catch (const NumericalError&) {
      // keep the cell census
    }
    if (std::abs(w - c) < R) {
      out.push_back({w, mult, found[i].cand.residual});
    }
  }

  int total = 0;
  for (const auto& z : out) {
    if (z.multiplicity < 1) {
      throw NumericalError(ErrorKind::NonConvergence, "non-positive zero multiplicity");
    }
    total += z.multiplicity;
  }
  if (total != expected) {
    throw NumericalError(ErrorKind::NonConvergence,
                         "zero census mismatch: found " + std::to_string(total) + ", expected " +
                             std::to_string(expected));
  }
  std::sort(out.begin(), out.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    const Complex p = a.location, q = b.location;
    return p.real() < q.real() || (p.real() == q.real() && p.imag() < q.imag());
  });
  return out;
}

}  // namespace conecusp
