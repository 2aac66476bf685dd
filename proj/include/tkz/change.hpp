#pragma once

#include <vector>

#include "tkz/linalg.hpp"
#include "tkz/puiseux.hpp"
#include "tkz/relement.hpp"

namespace tkz {

/// (ζ) = (z) A − β, then η_j^{s_j t} = ζ_j with s_j = +1 at δ_j = 0 and −1 at δ_j = ∞.
/// Row-vector convention: z = ζ B + γ with B = A^{-1}, γ = β A^{-1}.
struct ChangeOfVariables {
  CMatrix A;
  CVector beta;
  std::vector<bool> at_infinity;  // δ_j = ∞
  int t = 1;

  CMatrix B;
  CVector gamma;
  double condition = 0.0;

  int size() const { return static_cast<int>(A.rows()); }
  int sign(int j) const { return at_infinity[j] ? -1 : 1; }
  /// β ≠ 0 exercises the affine-change hypothesis, β = 0 the linear one.
  bool affine() const;

  std::vector<cplx> zeta_of_eta(const std::vector<cplx>& eta) const;
  std::vector<cplx> z_of_eta(const std::vector<cplx>& eta) const;
};

/// Validates shapes and invertibility; tiny entries of B and γ (relative 1e-14) are zeroed.
ChangeOfVariables make_change(const CMatrix& a, const CVector& beta, std::vector<bool> at_infinity, int t);
ChangeOfVariables identity_change(int n, int t);

namespace rcalc {

struct ComposeOptions {
  /// Branch index p_ℓ used for the constant factor c^r of every z_ℓ^r.
  std::vector<int> branches;
  double prune_tol = 1e-13;
};

/// Denominator of η-exponents after composing an element with root order f_t.
int composed_den(int f_t, const ChangeOfVariables& cov);

/// f(z(η)) as a truncated series in η; cutoffs are exclusive per-variable bounds.
/// Throws DegenerateError when a factor has no single dominant monomial.
PuiseuxSeries compose_change(const RElement& f, const ChangeOfVariables& cov, const std::vector<Rational>& cutoffs,
                             const ComposeOptions& opt = {});

/// Entrywise composition of a matrix of RElements, grouped by monomial.
MatrixSeries compose_change(const RMatrix& m, const ChangeOfVariables& cov, const std::vector<Rational>& cutoffs,
                            const ComposeOptions& opt = {});

/// Branch tuple p with which direct evaluation eval(f, z(η), p) matches the composed series
/// evaluated at η with principal logarithms (|η| small enough for the binomial series).
std::vector<int> branch_at(const ChangeOfVariables& cov, const std::vector<cplx>& eta, const ComposeOptions& opt = {});

}  // namespace rcalc
}  // namespace tkz
