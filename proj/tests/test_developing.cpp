#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "conecusp/developing.hpp"
#include "conecusp/parallel.hpp"
#include "oracles.hpp"

using namespace conecusp;

namespace {

MeromorphicSum two_pole() { return MeromorphicSum({{1.0, 0.5}, {1.0, -0.5}}); }

Polyline arc(Complex center, double r, double from, double to, int pieces) {
  Polyline p;
  for (int k = 0; k <= pieces; ++k) {
    p.vertices.push_back(center + std::polar(r, from + (to - from) * k / pieces));
  }
  return p;
}

MeromorphicSum truncated_h0(double radius) {
  return truncate(MeromorphicSum::h0(7), Disc{0.0, radius}, 1e-10).sum;
}

}  // namespace

TEST_CASE("path_integral: logarithm along the upper semicircle") {
  const MeromorphicSum h({{1.0, 0.0}});
  const auto r = path_integral(h, arc(0.0, 1.0, 0.0, M_PI, 64));
  CHECK(std::abs(r.value - Complex(M_PI, 0.0)) < 1e-12);
  CHECK(r.error < 1e-10);
}

TEST_CASE("path_integral: straight segment against the principal logarithm") {
  const MeromorphicSum h({{1.0, 0.5}});
  const auto r = path_integral(h, Polyline{{0.0, 0.3}});
  const Complex expected =
      Complex(0.0, -1.0) * (std::log(Complex(-0.2, 0.0)) - std::log(Complex(-0.5, 0.0)));
  CHECK(std::abs(r.value - expected) < 1e-13);
  CHECK(std::abs(r.value - Complex(0.0, -std::log(0.4))) < 1e-13);
}

TEST_CASE("path_integral: closed loops without poles vanish") {
  const auto h = two_pole();
  const Polyline square{{Complex(1.0, 1.0), Complex(2.0, 1.0), Complex(2.0, 2.0),
                         Complex(1.0, 2.0), Complex(1.0, 1.0)}};
  CHECK(std::abs(path_integral(h, square).value) < 1e-10);
  CHECK(std::abs(path_integral(h, arc(Complex(0.0, 2.0), 0.5, 0.0, kTwoPi, 40)).value) < 1e-10);
}

TEST_CASE("path_integral: errors") {
  const auto h = two_pole();
  try {
    path_integral(h, Polyline{{Complex(0.0, 0.0), Complex(1.0, 0.0)}});
    FAIL("expected PathThroughPole");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == ErrorKind::PathThroughPole);
  }
  CHECK_THROWS_AS(path_integral(h, Polyline{{0.1, 0.1, 0.2}}), std::invalid_argument);
  CHECK_THROWS_AS(path_integral(MeromorphicSum::h0(3), Polyline{{0.1, 0.2}}),
                  std::invalid_argument);
}

TEST_CASE("base point and canonical paths") {
  CHECK(default_base_point(two_pole()) == Complex(0.0, 0.0));
  CHECK(default_base_point(MeromorphicSum({{1.0, 0.0}, {1.0, 0.5}})) == Complex(-0.5, 0.0));

  const auto h = two_pole();
  const auto path = canonical_path(h, Complex(-1.0, 0.0), Complex(1.0, 0.0));
  CHECK(path.start() == Complex(-1.0, 0.0));
  CHECK(path.end() == Complex(1.0, 0.0));
  const double guard = 0.45 * h.separation() - 1e-12;
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    CHECK(path.vertices[i] != path.vertices[i - 1]);
    for (const auto& t : h.terms()) {
      CHECK(distance_to_segment(t.pole, path.vertices[i - 1], path.vertices[i]) >= 0.9 * guard);
    }
  }
  // Detours pass on the left of the direction of travel.
  double max_im = 0.0;
  for (const Complex v : path.vertices) max_im = std::max(max_im, v.imag());
  CHECK(max_im > 0.4);
}

TEST_CASE("eval_f: empty path and the upper half-plane") {
  const auto h = two_pole();
  const auto s = eval_f(h, 2.5, Polyline{{0.0}});
  CHECK(s.value == Complex(0.0, 2.5));
  const DevelopingMap map(h);
  const auto v = map.sample(10.0, 0.3);
  const Complex expected = Complex(0.0, 10.0) + Complex(0.0, -1.0) * (std::log(Complex(-0.2, 0.0)) -
                                                                      std::log(Complex(-0.5, 0.0)) +
                                                                      std::log(Complex(0.8, 0.0)) -
                                                                      std::log(Complex(0.5, 0.0)));
  CHECK(std::abs(v.value - expected) < 1e-12);
  CHECK(v.value.imag() == doctest::Approx(10.0 + map.integral(0.3).value.imag()));
  CHECK(v.value.imag() > 0.0);
}

TEST_CASE("eval_f: homotopic paths agree") {
  const auto h = two_pole();
  const Complex target(0.9, 0.7);
  const Polyline p1{{0.0, Complex(0.0, 0.7), target}};
  const Polyline p2{{0.0, Complex(0.2, 0.3), Complex(0.7, 0.2), Complex(1.2, 0.5), target}};
  const auto a = eval_f(h, 1.0, p1), b = eval_f(h, 1.0, p2);
  CHECK(std::abs(a.value - b.value) < 1e-9);
  CHECK(std::abs(a.value - b.value) <= a.quadrature_error + b.quadrature_error + 1e-12);
  const DevelopingMap map(h);
  CHECK(std::abs(map.sample(1.0, target).value - a.value) < 1e-9);
}

TEST_CASE("eval_f: derivative is -i h") {
  std::mt19937_64 rng(17);
  const auto terms = oracle::random_positive_terms(rng, 4, 1.0, 0.2);
  const MeromorphicSum h(terms);
  const DevelopingMap map(h, Complex(0.0, -1.5));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  while (done < 25) {
    const Complex z(u(rng), u(rng));
    bool safe = true;
    for (const auto& t : terms) safe = safe && std::abs(z - t.pole) > 0.15;
    if (!safe) continue;
    const double s = 1e-4;
    // Differences along a short pole-free segment through z.
    const Complex fd = (map.segment(z, z + s) - map.segment(z, z - s)) / (2.0 * s);
    CHECK(std::abs(fd - Complex(0.0, -1.0) * eval(h, z).value) < 1e-6);
    ++done;
  }
}

TEST_CASE("monodromy: residue theorem") {
  const auto m1 = monodromy(MeromorphicSum({{1.0, 0.0}}), 0);
  CHECK(m1.translation == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(std::abs(m1.raw.imag()) < 1e-9);

  std::mt19937_64 rng(23);
  const auto terms = oracle::random_positive_terms(rng, 6, 1.0);
  const MeromorphicSum h(terms);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto m = monodromy(h, j);
    CHECK(std::abs(m.translation - kTwoPi * terms[j].residue.real()) < 1e-10);
    CHECK(std::abs(m.raw.imag()) < 1e-9);
  }
  CHECK(std::abs(loop_translation(h, Circle(Complex(5.0, 5.0), 1.0)).raw) < 1e-10);

  const MeromorphicSum close({{1.0, 0.0}, {1.0, 1e-13}});
  CHECK_THROWS_AS(monodromy(close, 0), NumericalError);
}

TEST_CASE("monodromy: additivity over enclosed poles") {
  const std::vector<Term> terms = {{0.3, Complex(-0.2, 0.1)}, {1.1, Complex(0.25, -0.1)},
                                   {0.7, Complex(0.0, 0.3)}, {2.0, Complex(3.0, 0.0)}};
  const MeromorphicSum h(terms);
  const auto m = loop_translation(h, Circle(0.0, 1.0, 64));
  CHECK(std::abs(m.translation - kTwoPi * (0.3 + 1.1 + 0.7)) < 1e-8);
  const auto all = loop_translation(h, Circle(0.0, 4.0, 64));
  CHECK(std::abs(all.translation - kTwoPi * 4.1) < 1e-8);
}

TEST_CASE("estimate_lambda0: pole outside the domain") {
  const DevelopingMap map(MeromorphicSum({{1.0, 2.0}}));
  const auto est = estimate_lambda0(map, Disc{0.0, 0.5}, 0.05);
  CHECK(std::isfinite(est.value));
  CHECK(est.points > 0);
  CHECK(est.margin > 0.0);
  // -Im of the integral from 0 is ln|z - 2| - ln 2.
  double best = -1e300;
  for (const Complex z : est.grid) {
    best = std::max(best, std::log(std::abs((z - 2.0) / -2.0)));
  }
  CHECK(est.value == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("estimate_lambda0: bounded near positive-residue poles") {
  const DevelopingMap map(two_pole());
  const auto coarse = estimate_lambda0(map, Disc{0.0, 0.9}, 0.05);
  CHECK(std::isfinite(coarse.value));
  // -Im of the integral tends to -infinity at poles, so the maximum is not at a pole.
  for (const auto& t : map.h().terms()) CHECK(std::abs(coarse.argmax - t.pole) > 0.05);
}

TEST_CASE("estimate_lambda0: h0 on |z| <= 0.9 is grid-stable and admissible") {
  const DevelopingMap map(truncated_h0(0.9), Complex(-0.5, 0.0));
  set_thread_count(2);
  const auto coarse = estimate_lambda0(map, Disc{0.0, 0.9}, 0.04);
  const auto fine = estimate_lambda0(map, Disc{0.0, 0.9}, 0.02);
  set_thread_count(1);
  CHECK(std::isfinite(coarse.value));
  CHECK(std::abs(coarse.value - fine.value) <= coarse.margin);

  const double lambda = fine.value + 1.0;
  for (std::size_t i = 0; i < fine.grid.size(); i += 37) {
    CHECK(map.sample(lambda, fine.grid[i]).value.imag() > 0.0);
  }
}

TEST_CASE("estimate_lambda0: deterministic across thread counts") {
  const DevelopingMap map(two_pole());
  set_thread_count(1);
  const auto a = estimate_lambda0(map, Disc{0.0, 0.9}, 0.05);
  set_thread_count(3);
  const auto b = estimate_lambda0(map, Disc{0.0, 0.9}, 0.05);
  set_thread_count(1);
  CHECK(a.value == b.value);
  CHECK(a.argmax == b.argmax);
  CHECK(a.grid == b.grid);
}
