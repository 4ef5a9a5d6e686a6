#include "conecusp/meromorphic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace conecusp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closest pair by a sweep over real parts.
/// Distance from each pole to its nearest other pole (+inf for a single term).
std::vector<double> nearest_distances(std::span<const Term> terms) {
  const std::size_t n = terms.size();
  std::vector<double> out(n, kInf);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Complex p = terms[a].pole, q = terms[b].pole;
    return p.real() < q.real() || (p.real() == q.real() && p.imag() < q.imag());
  });
  for (std::size_t k = 0; k < n; ++k) {
    const Complex p = terms[order[k]].pole;
    double best = kInf;
    for (std::size_t j = k + 1; j < n; ++j) {
      const Complex q = terms[order[j]].pole;
      if (q.real() - p.real() >= best) break;
      best = std::min(best, std::abs(q - p));
    }
    for (std::size_t j = k; j-- > 0;) {
      const Complex q = terms[order[j]].pole;
      if (p.real() - q.real() >= best) break;
      best = std::min(best, std::abs(q - p));
    }
    out[order[k]] = best;
  }
  return out;
}

std::size_t retained_tail_last(const MeromorphicSum& h, const TruncationPolicy& policy) {
  return std::max(policy.last_index, h.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// H0Generator

double H0Generator::residue(std::size_t j) {
  const double x = static_cast<double>(j);
  return 1.0 / (2.0 * x * x * x * (2.0 * x + 1.0));
}

double H0Generator::pole(std::size_t j) {
  return 1.0 - 1.0 / (2.0 * static_cast<double>(j) - 1.0);
}

Term H0Generator::term_at(std::size_t index) const {
  if (index == 0) throw std::out_of_range("h0 terms are indexed from 1");
  return {residue(index), pole(index)};
}

double H0Generator::pole_modulus_lower(std::size_t index) const {
  return pole(std::max<std::size_t>(index, 1));
}

double H0Generator::tail_pole_distance(std::size_t last, const Disc& region) const {
  // Tail poles lie on the real segment [z_{last+1}, 1).
  const double d = distance_to_segment(region.center, pole(last + 1), 1.0) - region.radius;
  return std::max(d, 0.0);
}

double H0Generator::tail_abs_bound(std::size_t last, const Disc& region) const {
  if (tail_pole_distance(last, region) <= 0.0) return kInf;
  const std::size_t explicit_end = std::max(last + 1, kExplicitTerms);
  double sum = 0.0;
  for (std::size_t j = last + 1; j <= explicit_end; ++j) {
    const double dj = std::abs(pole(j) - region.center) - region.radius;
    sum += residue(j) / dj;
  }
  // a_j <= 1/(4 j^4), so sum_{j>M} a_j <= 1/(12 M^3)
  const double m = static_cast<double>(explicit_end);
  const double remainder = 1.0 / (12.0 * m * m * m) / tail_pole_distance(explicit_end, region);
  return sum + remainder;
}

// ---------------------------------------------------------------------------
// MeromorphicSum

MeromorphicSum::MeromorphicSum(std::vector<Term> terms) : terms_(std::move(terms)) {
  validate();
}

MeromorphicSum::MeromorphicSum(std::vector<Term> head, std::shared_ptr<const TailGenerator> tail)
    : terms_(std::move(head)), tail_(std::move(tail)) {
  validate();
}

MeromorphicSum MeromorphicSum::h0(std::size_t tail_start) {
  if (tail_start == 0) throw std::invalid_argument("h0 tail_start must be >= 1");
  auto gen = std::make_shared<const H0Generator>();
  std::vector<Term> head;
  head.reserve(tail_start - 1);
  for (std::size_t j = 1; j < tail_start; ++j) head.push_back(gen->term_at(j));
  return MeromorphicSum(std::move(head), gen);
}

void MeromorphicSum::validate() {
  if (terms_.empty() && !tail_) throw std::invalid_argument("meromorphic sum has no terms");
  for (const auto& t : terms_) {
    if (!std::isfinite(t.residue.real()) || !std::isfinite(t.residue.imag()) ||
        !std::isfinite(t.pole.real()) || !std::isfinite(t.pole.imag())) {
      throw std::invalid_argument("non-finite residue or pole");
    }
    if (t.residue == Complex{}) throw std::invalid_argument("zero residue");
  }
  nearest_ = nearest_distances(terms_);
  separation_ = nearest_.empty() ? kInf : *std::min_element(nearest_.begin(), nearest_.end());
  if (!(separation_ > 0.0)) throw std::invalid_argument("poles are not pairwise distinct");
}

double MeromorphicSum::pole_guard() const {
  return std::isfinite(separation_) ? 1e-8 * separation_ : 1e-8;
}

MeromorphicSum MeromorphicSum::scaled(Complex factor) const {
  if (factor == Complex{}) throw std::invalid_argument("scale factor must be nonzero");
  if (tail_) throw std::invalid_argument("scaling is only defined for finite sums");
  std::vector<Term> t(terms_.begin(), terms_.end());
  for (auto& term : t) term.residue *= factor;
  return MeromorphicSum(std::move(t));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <typename Visit>
void for_each_retained(const MeromorphicSum& h, const TruncationPolicy& policy, Visit&& visit) {
  for (const auto& t : h.terms()) visit(t);
  if (const auto* tail = h.tail()) {
    for (std::size_t j = h.size() + 1; j <= policy.last_index; ++j) visit(tail->term_at(j));
  }
}

}  // namespace

Derivatives eval_derivatives(const MeromorphicSum& h, Complex z, int order,
                             const TruncationPolicy& policy) {
  if (order < 0 || order > 2) throw std::invalid_argument("derivative order must be 0..2");
  const double guard = policy.pole_guard.value_or(h.pole_guard());
  Derivatives out;
  out.order = order;
  for_each_retained(h, policy, [&](const Term& t) {
    const Complex d = z - t.pole;
    if (std::abs(d) < guard) {
      throw NumericalError(ErrorKind::PoleProximity, "evaluation point inside pole guard");
    }
    const Complex inv = 1.0 / d;
    const Complex v = t.residue * inv;
    out.values[0] += v;
    if (order >= 1) out.values[1] -= v * inv;
    if (order >= 2) out.values[2] += 2.0 * v * inv * inv;
  });
  if (const auto* tail = h.tail()) {
    const std::size_t last = retained_tail_last(h, policy);
    const Disc at{z, 0.0};
    const double b = tail->tail_abs_bound(last, at);
    if (!std::isfinite(b)) {
      throw NumericalError(ErrorKind::TailUnboundable, "point touches the tail pole set");
    }
    const double dist = tail->tail_pole_distance(last, at);
    out.bounds = {b, b / dist, 2.0 * b / (dist * dist)};
  }
  return out;
}

Evaluation eval(const MeromorphicSum& h, Complex z, const TruncationPolicy& policy) {
  const auto d = eval_derivatives(h, z, 0, policy);
  return {d.values[0], d.bounds[0]};
}

double abs_term_sum(const MeromorphicSum& h, Complex z) {
  double s = 0.0;
  for (const auto& t : h.terms()) s += std::abs(t.residue / (z - t.pole));
  return s;
}

// ---------------------------------------------------------------------------
// Truncation

Truncation truncate(const MeromorphicSum& h, const Disc& region, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("truncation tolerance must be positive");
  if (h.is_finite()) return {h, 0.0, h.size()};

  const auto* tail = h.tail();
  constexpr std::size_t kCap = std::size_t{1} << 24;
  auto ok = [&](std::size_t last) { return tail->tail_abs_bound(last, region) < tol; };

  std::size_t lo = h.size();
  std::size_t hi = lo;
  if (!ok(lo)) {
    std::size_t step = 1;
    while (true) {
      hi = lo + step;
      if (hi > kCap) {
        throw NumericalError(ErrorKind::TailUnboundable,
                             "tail bound does not reach tolerance on region");
      }
      if (ok(hi)) break;
      lo = hi;
      step *= 2;
    }
    // invariant: !ok(lo), ok(hi)
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      (ok(mid) ? hi : lo) = mid;
    }
  }

  std::vector<Term> terms(h.terms().begin(), h.terms().end());
  for (std::size_t j = h.size() + 1; j <= hi; ++j) terms.push_back(tail->term_at(j));
  return {MeromorphicSum(std::move(terms)), tail->tail_abs_bound(hi, region), hi};
}

}  // namespace conecusp
