#ifndef CONECUSP_SCHWARZIAN_HPP
#define CONECUSP_SCHWARZIAN_HPP

#include <optional>
#include <utility>
#include <vector>

#include "conecusp/contour.hpp"
#include "conecusp/meromorphic.hpp"

namespace conecusp {

/// {f, z} for f' = -i h, i.e. h''/h - (3/2)(h'/h)^2.
Complex schwarzian_from_h(const MeromorphicSum& h, Complex z);

/// {f, z} = f'''/f' - (3/2)(f''/f')^2 from central differences of f at steps
/// s, s/2, s/4 with two Richardson passes. f is treated as a black box.
Complex numeric_schwarzian(const ComplexFn& f, Complex z, double step);

enum class SingularityKind { Cusp, Cone, Regular };
enum class SingularitySource { PoleOfH, ZeroOfH, Probe };

std::string_view to_string(SingularityKind kind);
std::string_view to_string(SingularitySource source);

struct SingularityReport {
  Complex location{};
  SingularityKind kind = SingularityKind::Regular;
  SingularitySource source = SingularitySource::Probe;
  Complex residue{};     // PoleOfH only
  int multiplicity = 0;  // ZeroOfH only
  double theta = 1.0;
  std::pair<double, double> indicial{1.0, 0.0};
  Complex c2{};
  Complex c1{};
  /// Structural prediction of c2: 1/2 at poles, (1 - (l+1)^2)/2 at zeros of order l.
  std::optional<Complex> expected_c2;
  bool flag = false;  // measured c2 disagrees with the prediction beyond class_tol
  double extraction_radius = 0.0;

  double angle() const { return kTwoPi * theta; }
};

/// Kind and cone parameter from a principal part. Throws NonHyperbolicExponent
/// when Re c2 > 1/2 + class_tol or |Im c2| >= class_tol.
SingularityReport classify_point(const PrincipalPart& pp, double class_tol = 1e-6);

/// Principal part of the Schwarzian at p on a circle of the given radius,
/// confirmed against radius/2 (the radius is halved until they agree to 1e-9).
PrincipalPart schwarzian_principal_part(const MeromorphicSum& h, Complex p, double radius);

struct ClassifyOptions {
  double class_tol = 1e-6;
  ZeroSearchOptions zeros{};
};

/// One report per pole of h in the region and one per located zero.
std::vector<SingularityReport> classify_all(const MeromorphicSum& h, const Disc& region,
                                            const ClassifyOptions& options = {});

/// ((1 + l)/2, (1 - l)/2) with l = sqrt(1 - 2 c2) on the principal branch.
std::pair<Complex, Complex> indicial_exponents(Complex c2);

}  // namespace conecusp

#endif  // CONECUSP_SCHWARZIAN_HPP
