#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tkz/linalg.hpp"
#include "tkz/rational.hpp"

namespace tkz::rcalc {

/// Exponent data of one monomial ∏ x_i^{powers[i]/t} ∏_{i<j} (x_i − x_j)^{diffs[pair(i,j)]}.
struct MonomialKey {
  std::vector<std::int64_t> powers;
  std::vector<std::int64_t> diffs;

  friend auto operator<=>(const MonomialKey&, const MonomialKey&) = default;
  friend bool operator==(const MonomialKey&, const MonomialKey&) = default;
};

/// Index of the unordered pair (i, j), i < j, among N variables.
int pair_index(int n, int i, int j);
int pair_count(int n);

/// Element of R = ℂ[x_i^{±1/t}, (x_i − x_j)^{-1}] in canonical monomial form.
/// Exponents of x_i are exact multiples of 1/t; coefficients are complex doubles.
class RElement {
 public:
  RElement() = default;
  RElement(int num_vars, int t);

  static RElement constant(int num_vars, int t, cplx c);
  /// x_i^r; r must lie in (1/t)ℤ.
  static RElement power(int num_vars, int t, int i, const Rational& r, cplx coeff = 1.0);
  /// (x_i − x_j)^m for any i ≠ j; stored with the smaller index first.
  static RElement difference(int num_vars, int t, int i, int j, std::int64_t m, cplx coeff = 1.0);
  static RElement monomial(int num_vars, int t, MonomialKey key, cplx coeff);

  int num_vars() const noexcept { return n_; }
  int root_order() const noexcept { return t_; }
  const std::map<MonomialKey, cplx>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Re-expresses exponents over a multiple of the current root order.
  RElement with_root_order(int t) const;

  RElement operator+(const RElement& o) const;
  RElement operator-(const RElement& o) const;
  RElement operator*(const RElement& o) const;
  RElement operator-() const;
  RElement scaled(cplx c) const;
  RElement& operator+=(const RElement& o) { return *this = *this + o; }

  /// Exact equality of keys and coefficients.
  friend bool operator==(const RElement& a, const RElement& b);

  /// Degree of a monomial: Σ r_i + Σ m_ij.
  Rational degree(const MonomialKey& key) const;
  /// The common degree if every term has the same one.
  std::optional<Rational> homogeneous_degree() const;

  std::string str() const;

 private:
  void add_term(const MonomialKey& key, cplx c);

  int n_ = 0;
  int t_ = 1;
  std::map<MonomialKey, cplx> terms_;
};

/// Value at z with per-variable branch indices p: x_i^r ↦ exp(r·l_{p_i}(z_i)).
cplx eval(const RElement& f, const std::vector<cplx>& z, const std::vector<int>& p);
/// Same with caller-supplied logarithms log_i of z_i (continuous-argument tracking).
cplx eval_with_logs(const RElement& f, const std::vector<cplx>& z, const std::vector<cplx>& logs);

/// ∂/∂x_i, exact.
RElement differentiate(const RElement& f, int i);

/// Dense matrix of RElements (row-major).
struct RMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<RElement> entries;

  RMatrix() = default;
  RMatrix(int r, int c, int num_vars, int t);
  RElement& operator()(int r, int c) { return entries[static_cast<std::size_t>(r) * cols + c]; }
  const RElement& operator()(int r, int c) const { return entries[static_cast<std::size_t>(r) * cols + c]; }

  CMatrix eval(const std::vector<cplx>& z, const std::vector<int>& p) const;
  CMatrix eval_with_logs(const std::vector<cplx>& z, const std::vector<cplx>& logs) const;
  RMatrix differentiate(int i) const;
  friend bool operator==(const RMatrix& a, const RMatrix& b);
};

/// Adds coeff(z) · m entrywise.
void add_scaled(RMatrix& target, const RElement& coeff, const CMatrix& m);

/// Groups an RMatrix as Σ_k monomial_k(z) · C_k for fast repeated evaluation.
class MatrixEvaluator {
 public:
  MatrixEvaluator() = default;
  explicit MatrixEvaluator(const RMatrix& m);
  CMatrix eval_with_logs(const std::vector<cplx>& z, const std::vector<cplx>& logs) const;
  const std::vector<MonomialKey>& keys() const { return keys_; }
  const std::vector<CMatrix>& coefficients() const { return coeffs_; }

 private:
  int n_ = 0;
  int t_ = 1;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<MonomialKey> keys_;
  std::vector<CMatrix> coeffs_;
};

/// Value of a single monomial (coefficient 1).
cplx eval_monomial(const MonomialKey& key, int t, const std::vector<cplx>& z, const std::vector<cplx>& logs);

}  // namespace tkz::rcalc
