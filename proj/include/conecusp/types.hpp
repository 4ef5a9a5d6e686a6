#ifndef CONECUSP_TYPES_HPP
#define CONECUSP_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace conecusp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Closed disc |z - center| <= radius.
struct Disc {
  Complex center{};
  double radius = 0.0;

  bool contains(Complex z) const { return std::abs(z - center) <= radius; }
};

/// Axis-aligned rectangle in the complex plane.
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool empty() const { return !(x_max > x_min) || !(y_max > y_min); }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

enum class ErrorKind {
  PoleProximity,
  ZeroProximity,
  TailUnboundable,
  BoundaryDegeneracy,
  NonConvergence,
  NonFinite,
  PathThroughPole,
  SeparationTooSmall,
  DegenerateDerivative,
  NonHyperbolicExponent,
  HalfPlaneViolation,
};

std::string_view to_string(ErrorKind kind);

/// Failure of a numerical precondition or of a convergence requirement.
/// Distinct from std::invalid_argument, which signals malformed input.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Distance from point p to the segment [a, b].
double distance_to_segment(Complex p, Complex a, Complex b);

}  // namespace conecusp

#endif  // CONECUSP_TYPES_HPP
