#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tkz/change.hpp"
#include "tkz/connection.hpp"
#include "tkz/puiseux.hpp"

namespace tkz::singular {

/// η_j ∂/∂η_j ψ = B_j(η) ψ after the change of variables.
struct TransformedSystem {
  ChangeOfVariables cov;
  int state_dim = 0;
  int den = 1;  // η-exponent denominator
  std::vector<Rational> cutoffs;
  std::vector<rcalc::MatrixSeries> B;
  rcalc::ComposeOptions options;

  int size() const { return static_cast<int>(B.size()); }
  /// "affine" when β ≠ 0, "linear" otherwise.
  std::string hypothesis() const { return cov.affine() ? "affine" : "linear"; }
  std::vector<CMatrix> eval(const std::vector<cplx>& eta) const;
};

/// B_j = s_j t ζ_j Σ_ℓ b_{jℓ} A_ℓ, composed through the change.
TransformedSystem transform_system(const connection::ConnectionSystem& conn, const ChangeOfVariables& cov,
                                   const std::vector<Rational>& cutoffs, const rcalc::ComposeOptions& opt = {});

struct Offender {
  int component = 0;  // j
  std::vector<Rational> exponents;
  double magnitude = 0.0;  // max-abs of the coefficient matrix
};

struct Verdict {
  bool holomorphic = true;
  std::vector<Offender> offenders;
  // Per component j, per variable: minimum stored exponent (nullopt when B_j vanishes).
  std::vector<std::vector<std::optional<Rational>>> min_exponents;
};

/// Reads the verdict off the stored exponents of one transformed system.
Verdict verdict_of(const TransformedSystem& ts);

struct SimpleSingularityResult {
  Verdict verdict;
  TransformedSystem system;
};

/// Transforms at the given cutoffs and again with every cutoff raised by t;
/// throws InconclusiveError if the two verdicts differ.
SimpleSingularityResult check_simple_singularity(const connection::ConnectionSystem& conn, const ChangeOfVariables& cov,
                                                 const std::vector<Rational>& cutoffs,
                                                 const rcalc::ComposeOptions& opt = {});

struct IndicialData {
  CMatrix H0;
  std::vector<cplx> exponents;                // ascending by real part
  std::vector<std::optional<Rational>> exact;  // snapped values when available
  bool resonant = false;
};

/// Indicial data of a constant-term matrix.
IndicialData indicial_from_matrix(const CMatrix& h0);
/// Constant term of B_j; throws NumericError if B_j has negative exponents.
IndicialData indicial_data(const TransformedSystem& ts, int j);

/// One-variable section: H(η_j) = Σ_m H_m η_j^m with the other η fixed.
struct SectionSeries {
  std::vector<CMatrix> H;
  double radius = std::numeric_limits<double>::infinity();  // coefficient validity radius, if known
};
SectionSeries section(const TransformedSystem& ts, int j, const std::vector<cplx>& fixed);

}  // namespace tkz::singular
