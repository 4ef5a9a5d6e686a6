#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "conecusp/contour.hpp"
#include "conecusp/meromorphic.hpp"
#include "oracles.hpp"

using namespace conecusp;

namespace {

MeromorphicSum two_pole() { return MeromorphicSum({{1.0, 0.5}, {1.0, -0.5}}); }

double r_n(int n) { return 1.0 - 1.0 / (2.0 * n); }

bool close_to_some(Complex z, const std::vector<Complex>& set, double tol) {
  for (const Complex w : set) {
    if (std::abs(z - w) < tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("eval: single term and symmetric pair") {
  const auto e = eval(MeromorphicSum({{1.0, 0.0}}), 2.0);
  CHECK(e.value == Complex(0.5, 0.0));
  CHECK(e.bound == 0.0);
  CHECK(std::abs(eval(two_pole(), 0.0).value) == 0.0);
}

TEST_CASE("eval: h0 tail bound covers the brute-force remainder") {
  const auto h = MeromorphicSum::h0(7);
  const Complex z(-0.9, 0.0);
  const auto e = eval(h, z);
  const Complex brute = oracle::h0_direct(z, 1, 1'000'000);
  CHECK(e.bound > 0.0);
  CHECK(std::abs(e.value - brute) <= e.bound);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  while (checked < 50) {
    const Complex p(u(rng), u(rng));
    if (std::abs(p) > 0.95 || std::abs(p - 1.0) < 0.2) continue;
    bool near = false;
    for (const auto& t : h.terms()) near = near || std::abs(p - t.pole) < 1e-3;
    if (near) continue;
    // Retain some tail terms explicitly as well.
    const auto ev = eval(h, p, TruncationPolicy{20, std::nullopt});
    const Complex ref = oracle::h0_direct(p, 1, 1'000'000);
    CHECK(std::abs(ev.value - ref) <= ev.bound);
    ++checked;
  }
}

TEST_CASE("eval: errors") {
  CHECK_THROWS_AS(eval(two_pole(), 0.5), NumericalError);
  try {
    eval(two_pole(), Complex(0.5 + 1e-12, 0.0));
    FAIL("expected PoleProximity");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == ErrorKind::PoleProximity);
  }
  const auto h = MeromorphicSum::h0(7);
  for (const Complex z : {Complex(1.0, 0.0), Complex(0.95, 0.0)}) {
    try {
      eval(h, z);
      FAIL("expected TailUnboundable");
    } catch (const NumericalError& e) {
      CHECK(e.kind() == ErrorKind::TailUnboundable);
    }
  }
}

TEST_CASE("construction rejects degenerate data") {
  CHECK_THROWS_AS(MeromorphicSum({{1.0, 0.2}, {2.0, 0.2}}), std::invalid_argument);
  CHECK_THROWS_AS(MeromorphicSum({{0.0, 0.2}}), std::invalid_argument);
  CHECK_THROWS_AS(MeromorphicSum(std::vector<Term>{}), std::invalid_argument);
  CHECK(two_pole().separation() == doctest::Approx(1.0));
  CHECK(two_pole().pole_guard() == doctest::Approx(1e-8));
}

TEST_CASE("eval_derivatives: closed forms") {
  const auto d = eval_derivatives(MeromorphicSum({{1.0, 0.0}}), 1.0, 2);
  CHECK(d.values[0] == Complex(1.0, 0.0));
  CHECK(d.values[1] == Complex(-1.0, 0.0));
  CHECK(d.values[2] == Complex(2.0, 0.0));

  const auto s = eval_derivatives(two_pole(), 0.0, 2);
  CHECK(std::abs(s.values[0]) < 1e-15);
  CHECK(std::abs(s.values[1] - Complex(-8.0, 0.0)) < 1e-14);
  CHECK(std::abs(s.values[2]) < 1e-13);
}

TEST_CASE("eval_derivatives: centered differences agree") {
  std::mt19937_64 rng(11);
  const auto terms = oracle::random_positive_terms(rng, 4, 1.0, 0.2);
  const MeromorphicSum h(terms);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  int checked = 0;
  const double step = 1e-5;
  while (checked < 100) {
    const Complex z(u(rng), u(rng));
    bool safe = true;
    for (const auto& t : terms) safe = safe && std::abs(z - t.pole) > 0.2;
    if (!safe) continue;
    const auto d = eval_derivatives(h, z, 2);
    const Complex fd1 = (eval(h, z + step).value - eval(h, z - step).value) / (2.0 * step);
    const Complex fd2 = (eval_derivatives(h, z + step, 1).values[1] -
                         eval_derivatives(h, z - step, 1).values[1]) /
                        (2.0 * step);
    CHECK(std::abs(d.values[1] - fd1) < 1e-6);
    CHECK(std::abs(d.values[2] - fd2) < 1e-5);
    ++checked;
  }
}

TEST_CASE("eval_derivatives: tail bounds scale with distance") {
  const auto h = MeromorphicSum::h0(7);
  const auto d = eval_derivatives(h, Complex(-0.5, 0.0), 2);
  const double dist = h.tail()->tail_pole_distance(6, Disc{Complex(-0.5, 0.0), 0.0});
  CHECK(d.bounds[1] == doctest::Approx(d.bounds[0] / dist));
  CHECK(d.bounds[2] == doctest::Approx(2.0 * d.bounds[0] / (dist * dist)));
  const Complex z(-0.5, 0.0);
  Complex ref1{};
  for (std::size_t j = 7; j <= 200000; ++j) {
    const auto t = h.tail()->term_at(j);
    ref1 -= t.residue / ((z - t.pole) * (z - t.pole));
  }
  CHECK(std::abs(ref1) <= d.bounds[1]);
}

TEST_CASE("tail generator: bound is non-negative and non-increasing") {
  const H0Generator gen;
  for (const Disc region : {Disc{0.0, 0.5}, Disc{0.0, 0.9}, Disc{Complex(0.3, 0.4), 0.2},
                            Disc{-0.5, 0.0}}) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 13u, 40u, 100u, 2047u, 2048u, 2049u, 5000u}) {
      const double b = gen.tail_abs_bound(n, region);
      if (!std::isfinite(b)) continue;
      CHECK(b >= 0.0);
      CHECK(b <= prev);
      prev = b;
    }
  }
  CHECK(std::isinf(gen.tail_abs_bound(3, Disc{0.0, 1.0})));
  CHECK(gen.pole_modulus_lower(4) == doctest::Approx(1.0 - 1.0 / 7.0));
}

TEST_CASE("truncate: finite sums are returned unchanged") {
  const auto t = truncate(two_pole(), Disc{0.0, 10.0}, 1e-12);
  CHECK(t.error == 0.0);
  CHECK(t.sum.size() == 2);
}

TEST_CASE("truncate: h0 on |z| <= 1/2 reaches 1e-8 at the first admissible index") {
  const auto h = MeromorphicSum::h0(7);
  const Disc region{0.0, 0.5};
  const auto t = truncate(h, region, 1e-8);
  // Oracle: walk the bound sequence one index at a time.
  const H0Generator gen;
  std::size_t n = 6;
  while (!(gen.tail_abs_bound(n, region) < 1e-8)) ++n;
  CHECK(t.last_index == n);
  CHECK(t.error < 1e-8);
  CHECK(t.sum.is_finite());
  for (double theta = 0.0; theta < 6.28; theta += 0.37) {
    const Complex z = std::polar(0.5, theta);
    CHECK(std::abs(eval(t.sum, z).value - oracle::h0_direct(z, 1, 1'000'000)) <= t.error);
  }
}

TEST_CASE("truncate: retained poles inside |z| <= r_N are exactly j <= N") {
  const auto h = MeromorphicSum::h0(2);
  for (int n = 2; n <= 12; ++n) {
    const Disc region{0.0, r_n(n)};
    const auto t = truncate(h, region, 1e-6);
    int inside = 0;
    for (std::size_t j = 0; j < t.sum.size(); ++j) {
      const bool in = std::abs(t.sum.terms()[j].pole) <= r_n(n);
      CHECK(in == (static_cast<int>(j) + 1 <= n));
      inside += in ? 1 : 0;
    }
    CHECK(inside == n);
  }
  CHECK_THROWS_AS(truncate(h, Disc{0.0, 1.0}, 1e-6), NumericalError);
}

TEST_CASE("locate_zeros: symmetric pair has a simple zero at the origin") {
  const auto zs = locate_zeros(two_pole(), Disc{0.0, 0.9});
  REQUIRE(zs.size() == 1);
  CHECK(std::abs(zs[0].location) < 1e-12);
  CHECK(zs[0].multiplicity == 1);
  CHECK(zs[0].refinement_residual < 1e-12);
}

TEST_CASE("locate_zeros: three poles give two zeros matching the companion oracle") {
  const std::vector<Term> terms = {{1.0, Complex(0.3, 0.1)},
                                   {0.5, Complex(-0.4, 0.2)},
                                   {2.0, Complex(0.1, -0.5)}};
  const auto zs = locate_zeros(MeromorphicSum(terms), Disc{0.0, 0.8});
  int total = 0;
  for (const auto& z : zs) total += z.multiplicity;
  CHECK(total == 2);
  const auto roots = oracle::zeros_of_sum(terms);
  REQUIRE(roots.size() == 2);
  for (const auto& z : zs) CHECK(close_to_some(z.location, roots, 1e-10));
}

TEST_CASE("locate_zeros: zero count property over random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 21; ++trial) {
    const int n = 2 + trial % 7;
    const double R = std::array<double, 3>{0.5, 1.0, 2.0}[trial % 3];
    const auto terms = oracle::random_positive_terms(rng, n, R);
    const MeromorphicSum h(terms);
    const auto zs = locate_zeros(h, Disc{0.0, R});
    int total = 0;
    for (const auto& z : zs) total += z.multiplicity;
    CHECK(total == n - 1);
    // Nothing further out: count on a larger circle is unchanged.
    const auto w = winding_count(h, Circle(0.0, 1.7 * R, 256));
    CHECK(w.count == -1);
    CHECK(w.count + n == total);
  }
}

TEST_CASE("locate_zeros: conjugation symmetry and scaling equivariance") {
  const std::vector<Term> real_terms = {{1.0, -0.6}, {0.3, 0.1}, {2.0, 0.5}, {0.7, 0.75}};
  const MeromorphicSum h(real_terms);
  const auto zs = locate_zeros(h, Disc{0.0, 0.9});
  std::vector<Complex> locs;
  for (const auto& z : zs) locs.push_back(z.location);
  for (const Complex z : locs) CHECK(close_to_some(std::conj(z), locs, 1e-10));

  const auto scaled = locate_zeros(h.scaled(3.7), Disc{0.0, 0.9});
  REQUIRE(scaled.size() == zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    CHECK(std::abs(scaled[i].location - zs[i].location) < 1e-10);
    CHECK(scaled[i].multiplicity == zs[i].multiplicity);
  }
}

TEST_CASE("locate_zeros: double zero of the cube-root configuration") {
  std::vector<Term> terms;
  for (int k = 0; k < 3; ++k) terms.push_back({1.0, std::polar(1.0, 2.0 * M_PI * k / 3.0)});
  // numerator is 3 z^2: a double root at the origin
  const auto num = oracle::numerator(terms);
  REQUIRE(num.size() == 3);
  CHECK(std::abs(num[0]) < 1e-14);
  CHECK(std::abs(num[1]) < 1e-14);
  const auto zs = locate_zeros(MeromorphicSum(terms), Disc{0.0, 0.9});
  REQUIRE(zs.size() == 1);
  CHECK(zs[0].multiplicity == 2);
  CHECK(std::abs(zs[0].location) < 1e-6);
}

TEST_CASE("locate_zeros: h0 on |z| < r_6 has five real zeros") {
  const auto zs = locate_zeros(MeromorphicSum::h0(7), Disc{0.0, r_n(6)});
  REQUIRE(zs.size() == 5);
  // Oracle: bisection of the brute-force sum between consecutive poles.
  auto h = [](double x) { return oracle::h0_direct(Complex(x, 0.0), 1, 200000).real(); };
  for (int j = 1; j <= 5; ++j) {
    double lo = H0Generator::pole(j) + 1e-13, hi = H0Generator::pole(j + 1) - 1e-13;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(zs[j - 1].location - Complex(0.5 * (lo + hi), 0.0)) < 1e-8);
    CHECK(zs[j - 1].multiplicity == 1);
  }
}
