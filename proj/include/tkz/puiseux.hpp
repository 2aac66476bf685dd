#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tkz/linalg.hpp"
#include "tkz/rational.hpp"
#include "tkz/relement.hpp"

namespace tkz::rcalc {

/// Exponents (numerators over the series denominator) and log powers of one term.
struct SeriesKey {
  std::vector<std::int64_t> exps;
  std::vector<int> logs;

  friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
  friend bool operator==(const SeriesKey&, const SeriesKey&) = default;
};

/// Saturating "no cutoff" value for exponent numerators.
inline constexpr std::int64_t kNoCutoff = INT64_MAX / 4;

/// Truncated series Σ c η^{e/den} (log η)^L in n variables.
///
/// Truncation is a box: a term is stored iff every exponent is below the
/// exclusive cutoff of its variable. `lower` holds a lower bound for the
/// exponents of the untruncated series, which products need to know how far
/// their result is exact.
template <typename Coeff>
class BasicSeries {
 public:
  BasicSeries() = default;
  BasicSeries(int n, int den, std::vector<std::int64_t> cutoffs, std::vector<std::int64_t> lower);

  /// c η^{exps/den}, exact (no truncation).
  static BasicSeries monomial(int n, int den, std::vector<std::int64_t> exps, const Coeff& c);

  int num_vars() const noexcept { return n_; }
  int den() const noexcept { return den_; }
  const std::vector<std::int64_t>& cutoffs() const noexcept { return cut_; }
  const std::vector<std::int64_t>& lower() const noexcept { return lower_; }
  const std::map<SeriesKey, Coeff>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  void add_term(const SeriesKey& key, const Coeff& c);
  BasicSeries with_den(int den) const;
  BasicSeries truncated(const std::vector<std::int64_t>& cutoffs) const;
  /// Drops terms whose coefficient magnitude is at most tol.
  BasicSeries pruned(double tol) const;
  /// Multiplies by η^{exps/den}.
  BasicSeries shifted(const std::vector<std::int64_t>& exps) const;

  BasicSeries operator+(const BasicSeries& o) const;
  BasicSeries operator-(const BasicSeries& o) const;
  BasicSeries& operator+=(const BasicSeries& o) { return *this = *this + o; }

  /// Per-variable minimum stored exponent; nullopt stands for +∞ (no terms).
  std::vector<std::optional<Rational>> min_exponents() const;
  std::vector<std::optional<Rational>> cutoff_values() const;

  /// Value at η with caller-supplied logarithms of each η_v.
  Coeff eval_with_logs(const std::vector<cplx>& eta, const std::vector<cplx>& logs) const;
  Coeff eval(const std::vector<cplx>& eta, const std::vector<int>& p) const;

  void set_lower(std::vector<std::int64_t> lower) { lower_ = std::move(lower); }

 protected:
  int n_ = 0;
  int den_ = 1;
  std::vector<std::int64_t> cut_;
  std::vector<std::int64_t> lower_;
  std::map<SeriesKey, Coeff> terms_;
};

using PuiseuxSeries = BasicSeries<cplx>;
using MatrixSeries = BasicSeries<CMatrix>;

/// Product of scalar series, with the largest cutoff box on which it is exact.
PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries scaled(const PuiseuxSeries& a, cplx c);
/// a(η) · m, term by term.
MatrixSeries tensor(const PuiseuxSeries& a, const CMatrix& m);

/// Builds a series from explicit terms; the lower bound is the stored minimum capped by the cutoff.
PuiseuxSeries series_from_terms(int n, int den, std::vector<std::int64_t> cutoffs,
                                const std::map<SeriesKey, cplx>& terms);

/// Per-variable minimum exponent over stored terms (nullopt = +∞).
std::vector<std::optional<Rational>> series_min_exponents(const PuiseuxSeries& s);

/// Expansion in the region |x_1| > ... > |x_N|: each (x_i − x_j)^m, i < j, becomes
/// x_i^m Σ_k binom(m,k) (−x_j/x_i)^k. Cutoffs are exclusive exponent bounds per variable.
PuiseuxSeries iota_expand(const RElement& f, const std::vector<Rational>& cutoffs);

/// Numerator form of a cutoff: smallest e with e/den >= c.
std::int64_t cutoff_numerator(const Rational& c, int den);

/// binom(r, k) for rational r.
double binomial(const Rational& r, int k);

}  // namespace tkz::rcalc
