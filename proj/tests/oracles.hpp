// Test-only reference computations. Nothing here calls into the library's
// numerical routines; each oracle uses an independent route.
#ifndef CONECUSP_TESTS_ORACLES_HPP
#define CONECUSP_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "conecusp/meromorphic.hpp"

namespace oracle {

using conecusp::Complex;

/// Coefficients (ascending powers) of the numerator sum_j a_j prod_{k!=j}(z - z_k).
inline std::vector<Complex> numerator(const std::vector<conecusp::Term>& terms) {
  const std::size_t n = terms.size();
  std::vector<Complex> num(n, Complex{});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Complex> p{terms[j].residue};
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      std::vector<Complex> q(p.size() + 1, Complex{});
      for (std::size_t i = 0; i < p.size(); ++i) {
        q[i + 1] += p[i];
        q[i] -= terms[k].pole * p[i];
      }
      p = std::move(q);
    }
    for (std::size_t i = 0; i < p.size(); ++i) num[i] += p[i];
  }
  while (num.size() > 1 && std::abs(num.back()) == 0.0) num.pop_back();
  return num;
}

/// Roots of a polynomial (ascending coefficients) as companion-matrix eigenvalues.
inline std::vector<Complex> companion_roots(const std::vector<Complex>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg < 1) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -coeffs[i] / coeffs[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return roots;
}

inline std::vector<Complex> zeros_of_sum(const std::vector<conecusp::Term>& terms) {
  return companion_roots(numerator(terms));
}

/// Newton polish of a root against the plain partial-fraction sum.
inline Complex polish(const std::vector<conecusp::Term>& terms, Complex z) {
  for (int it = 0; it < 20; ++it) {
    Complex f{}, df{};
    for (const auto& t : terms) {
      const Complex d = z - t.pole;
      f += t.residue / d;
      df -= t.residue / (d * d);
    }
    if (df == Complex{}) break;
    z -= f / df;
  }
  return z;
}

/// Direct summation of h0 terms first..last at z.
inline Complex h0_direct(Complex z, std::size_t first, std::size_t last) {
  Complex s{};
  for (std::size_t j = last; j >= first; --j) {
    const double x = static_cast<double>(j);
    const double a = 1.0 / (2.0 * x * x * x * (2.0 * x + 1.0));
    const double p = 1.0 - 1.0 / (2.0 * x - 1.0);
    s += a / (z - p);
    if (j == first) break;
  }
  return s;
}

/// sum_{j>n} 1/j^2 by explicit summation to `upto` plus the integral remainder
/// bracket [1/(upto+1), 1/upto]; returns the midpoint.
inline double inverse_square_tail(std::size_t n, std::size_t upto = 10'000'000) {
  double s = 0.0;
  for (std::size_t j = upto; j > n; --j) {
    const double x = static_cast<double>(j);
    s += 1.0 / (x * x);
  }
  const double u = static_cast<double>(upto);
  return s + 0.5 * (1.0 / (u + 1.0) + 1.0 / u);
}

/// Random finite sum with positive real residues and distinct poles in |z| < R.
inline std::vector<conecusp::Term> random_positive_terms(std::mt19937_64& rng, int n, double R,
                                                         double min_sep = 0.05) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<conecusp::Term> terms;
  while (static_cast<int>(terms.size()) < n) {
    const double r = 0.95 * R * std::sqrt(unit(rng));
    const Complex p = std::polar(r, 2.0 * M_PI * unit(rng));
    bool ok = true;
    for (const auto& t : terms) ok = ok && std::abs(t.pole - p) > min_sep * R;
    if (!ok) continue;
    terms.push_back({Complex(0.1 + unit(rng), 0.0), p});
  }
  return terms;
}

}  // namespace oracle

#endif  // CONECUSP_TESTS_ORACLES_HPP
