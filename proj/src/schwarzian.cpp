#include "conecusp/schwarzian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "conecusp/parallel.hpp"

namespace conecusp {

std::string_view to_string(SingularityKind kind) {
  switch (kind) {
    case SingularityKind::Cusp: return "cusp";
    case SingularityKind::Cone: return "cone";
    case SingularityKind::Regular: return "regular";
  }
  return "regular";
}

std::string_view to_string(SingularitySource source) {
  switch (source) {
    case SingularitySource::PoleOfH: return "pole";
    case SingularitySource::ZeroOfH: return "zero";
    case SingularitySource::Probe: return "probe";
  }
  return "probe";
}

Complex schwarzian_from_h(const MeromorphicSum& h, Complex z) {
  const auto d = eval_derivatives(h, z, 2);
  if (std::abs(d.values[0]) <= 1e-12 * abs_term_sum(h, z)) {
    throw NumericalError(ErrorKind::ZeroProximity, "Schwarzian evaluated at a zero of h");
  }
  const Complex r1 = d.values[1] / d.values[0];
  const Complex r2 = d.values[2] / d.values[0];
  return r2 - 1.5 * r1 * r1;
}

namespace {

struct Stencil {
  Complex d1, d2, d3;
};

Stencil central_differences(const ComplexFn& f, Complex z, double s) {
  const Complex fm2 = f(z - 2.0 * s), fm1 = f(z - s), f0 = f(z), fp1 = f(z + s),
                fp2 = f(z + 2.0 * s);
  return {(fp1 - fm1) / (2.0 * s), (fp1 - 2.0 * f0 + fm1) / (s * s),
          (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * s * s * s)};
}

Complex richardson(Complex a_s, Complex a_half, Complex a_quarter) {
  const Complex r1 = (4.0 * a_half - a_s) / 3.0;
  const Complex r2 = (4.0 * a_quarter - a_half) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

}  // namespace

Complex numeric_schwarzian(const ComplexFn& f, Complex z, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const auto a = central_differences(f, z, step);
  const auto b = central_differences(f, z, 0.5 * step);
  const auto c = central_differences(f, z, 0.25 * step);
  const Complex d1 = richardson(a.d1, b.d1, c.d1);
  const Complex d2 = richardson(a.d2, b.d2, c.d2);
  const Complex d3 = richardson(a.d3, b.d3, c.d3);
  const double scale = std::abs(f(z)) + std::abs(f(z + step)) + std::abs(f(z - step));
  if (std::abs(d1) * step <= 1e-12 * scale) {
    throw NumericalError(ErrorKind::DegenerateDerivative, "f' vanishes at the stencil center");
  }
  const Complex q = d2 / d1;
  return d3 / d1 - 1.5 * q * q;
}

SingularityReport classify_point(const PrincipalPart& pp, double class_tol) {
  SingularityReport rep;
  rep.c2 = pp.c2;
  rep.c1 = pp.c1;
  rep.extraction_radius = pp.extraction_radius;
  if (std::abs(pp.c2.imag()) >= class_tol || pp.c2.real() > 0.5 + class_tol) {
    throw NumericalError(ErrorKind::NonHyperbolicExponent,
                         "principal coefficient admits no real cone angle");
  }
  if (std::abs(pp.c2) < class_tol && std::abs(pp.c1) < class_tol) {
    rep.kind = SingularityKind::Regular;
    rep.theta = 1.0;
  } else if (std::abs(pp.c2 - 0.5) < class_tol) {
    rep.kind = SingularityKind::Cusp;
    rep.theta = 0.0;
  } else {
    rep.kind = SingularityKind::Cone;
    rep.theta = std::sqrt(1.0 - 2.0 * pp.c2.real());
  }
  rep.indicial = {0.5 * (1.0 + rep.theta), 0.5 * (1.0 - rep.theta)};
  return rep;
}

std::pair<Complex, Complex> indicial_exponents(Complex c2) {
  const Complex lam = std::sqrt(1.0 - 2.0 * c2);
  const Complex e1 = 0.5 * (1.0 + lam);
  return {e1, 1.0 - e1};
}

PrincipalPart schwarzian_principal_part(const MeromorphicSum& h, Complex p, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("extraction radius must be positive");
  auto S = [&h](Complex z) { return schwarzian_from_h(h, z); };
  double r = radius;
  PrincipalPart outer = principal_part(S, p, r);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const PrincipalPart inner = principal_part(S, p, 0.5 * r);
    if (std::abs(inner.c2 - outer.c2) <= 1e-9 && std::abs(inner.c1 - outer.c1) <= 1e-9) {
      return outer;
    }
    outer = inner;
    r *= 0.5;
  }
  return outer;
}

std::vector<SingularityReport> classify_all(const MeromorphicSum& h, const Disc& region,
                                            const ClassifyOptions& options) {
  const MeromorphicSum f =
      h.is_finite() ? h : truncate(h, region, options.zeros.tail_tol).sum;
  const auto zeros = locate_zeros(f, region, options.zeros);

  struct Point {
    Complex location;
    SingularitySource source;
    Complex residue;
    int multiplicity;
  };
  std::vector<Point> points;
  for (const auto& t : f.terms()) {
    if (std::abs(t.pole - region.center) < region.radius) {
      points.push_back({t.pole, SingularitySource::PoleOfH, t.residue, 0});
    }
  }
  for (const auto& z : zeros) {
    points.push_back({z.location, SingularitySource::ZeroOfH, {}, z.multiplicity});
  }

  std::vector<SingularityReport> reports(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const Point& pt = points[i];
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& t : f.terms()) {
      if (t.pole != pt.location) nearest = std::min(nearest, std::abs(t.pole - pt.location));
    }
    for (const auto& z : zeros) {
      if (z.location != pt.location) {
        nearest = std::min(nearest, std::abs(z.location - pt.location));
      }
    }
    const double radius = std::isfinite(nearest) ? 0.5 * nearest : 0.5;
    const auto pp = schwarzian_principal_part(f, pt.location, radius);
    SingularityReport rep = classify_point(pp, options.class_tol);
    rep.location = pt.location;
    rep.source = pt.source;
    rep.residue = pt.residue;
    rep.multiplicity = pt.multiplicity;
    if (pt.source == SingularitySource::PoleOfH) {
      rep.expected_c2 = Complex(0.5, 0.0);
    } else {
      const double l1 = static_cast<double>(pt.multiplicity + 1);
      rep.expected_c2 = Complex(0.5 * (1.0 - l1 * l1), 0.0);
    }
    rep.flag = std::abs(rep.c2 - *rep.expected_c2) >= options.class_tol;
    reports[i] = rep;
  });
  return reports;
}

}  // namespace conecusp
