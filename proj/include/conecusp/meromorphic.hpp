#ifndef CONECUSP_MEROMORPHIC_HPP
#define CONECUSP_MEROMORPHIC_HPP

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conecusp/types.hpp"

namespace conecusp {

/// One partial-fraction term residue / (z - pole).
struct Term {
  Complex residue{};
  Complex pole{};
};

/// Infinite family of terms indexed from 1.
///
/// Implementations must bound the absolute series: tail_abs_bound(last, D)
/// is an upper bound for sup_{z in D} sum_{j > last} |a_j| / |z - z_j|, which
/// also bounds |sum_{j > last} a_j / (z - z_j)|. It is +infinity when D meets
/// the closure of the tail poles.
class TailGenerator {
 public:
  virtual ~TailGenerator() = default;

  virtual std::string name() const = 0;
  virtual Term term_at(std::size_t index) const = 0;
  virtual double tail_abs_bound(std::size_t last, const Disc& region) const = 0;
  /// Lower bound on the distance from `region` to every pole with index > last.
  virtual double tail_pole_distance(std::size_t last, const Disc& region) const = 0;
  /// Lower bound on |z_i| for all i >= index.
  virtual double pole_modulus_lower(std::size_t index) const = 0;
};

/// a_j = 1 / (2 j^3 (2j + 1)), z_j = 1 - 1 / (2j - 1). Poles accumulate at 1.
class H0Generator final : public TailGenerator {
 public:
  std::string name() const override { return "h0"; }
  Term term_at(std::size_t index) const override;
  double tail_abs_bound(std::size_t last, const Disc& region) const override;
  double tail_pole_distance(std::size_t last, const Disc& region) const override;
  double pole_modulus_lower(std::size_t index) const override;

  static double residue(std::size_t j);
  static double pole(std::size_t j);

  /// Terms j = last+1 .. max(last+1, kExplicitTerms) are summed exactly;
  /// beyond that a_j <= 1/(2j^3) and the segment distance certify the rest.
  static constexpr std::size_t kExplicitTerms = 2048;
};

/// h(z) = sum_j a_j / (z - z_j): an explicit head, optionally followed by a
/// summable tail whose first index is head.size() + 1.
class MeromorphicSum {
 public:
  explicit MeromorphicSum(std::vector<Term> terms);
  MeromorphicSum(std::vector<Term> head, std::shared_ptr<const TailGenerator> tail);

  /// The built-in h0 family with explicit terms 1 .. tail_start-1.
  static MeromorphicSum h0(std::size_t tail_start);

  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_finite() const { return tail_ == nullptr; }
  const TailGenerator* tail() const { return tail_.get(); }
  std::shared_ptr<const TailGenerator> tail_ptr() const { return tail_; }

  /// Minimum pairwise distance of the explicit poles (+inf for a single term).
  double separation() const { return separation_; }
  /// Distance from pole i to its nearest other pole (+inf for a single term).
  double nearest_pole_distance(std::size_t i) const { return nearest_[i]; }
  /// Default exclusion radius around poles: 1e-8 * separation.
  double pole_guard() const;

  /// A copy with every residue multiplied by `factor`.
  MeromorphicSum scaled(Complex factor) const;

 private:
  void validate();

  std::vector<Term> terms_;
  std::shared_ptr<const TailGenerator> tail_;
  std::vector<double> nearest_;
  double separation_ = 0.0;
};

/// Which tail terms to sum explicitly during evaluation.
struct TruncationPolicy {
  /// Sum tail terms with index <= last_index explicitly; the rest is bounded.
  /// Values below the head size mean "head only".
  std::size_t last_index = 0;
  /// Absolute exclusion radius around retained poles; default pole_guard().
  std::optional<double> pole_guard;
};

struct Evaluation {
  Complex value{};
  double bound = 0.0;  // bound on the omitted tail
};

struct Derivatives {
  std::array<Complex, 3> values{};  // h, h', h''
  std::array<double, 3> bounds{};
  int order = 0;
};

Evaluation eval(const MeromorphicSum& h, Complex z, const TruncationPolicy& policy = {});
Derivatives eval_derivatives(const MeromorphicSum& h, Complex z, int order,
                             const TruncationPolicy& policy = {});

/// sum_j |a_j / (z - z_j)| over explicit terms; the scale against which
/// cancellation in h(z) is judged.
double abs_term_sum(const MeromorphicSum& h, Complex z);

struct Truncation {
  MeromorphicSum sum;
  double error = 0.0;          // certified sup-norm error over the region
  std::size_t last_index = 0;  // number of retained terms
};

/// Finite sum within `tol` of h in sup norm over `region`; every pole of h in
/// the region is retained.
Truncation truncate(const MeromorphicSum& h, const Disc& region, double tol);

struct ZeroRecord {
  Complex location{};
  int multiplicity = 1;
  double refinement_residual = 0.0;
};

struct ZeroSearchOptions {
  double tol = 1e-12;          // |h| and Newton step threshold
  double tail_tol = 1e-10;     // truncation tolerance for sums with a tail
  double min_cell = 1e-6;      // subdivision stops below this cell diameter
  int max_newton = 100;
  int max_halvings = 20;
  int max_retries = 8;         // boundary jitter attempts
};

/// Zeros of h inside the open disc `region`, sorted by (real, imag).
/// Sums with a tail are first truncated to `tail_tol` on the region.
std::vector<ZeroRecord> locate_zeros(const MeromorphicSum& h, const Disc& region,
                                     const ZeroSearchOptions& options = {});

}  // namespace conecusp

#endif  // CONECUSP_MEROMORPHIC_HPP
