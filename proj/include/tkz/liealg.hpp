#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tkz/linalg.hpp"
#include "tkz/rational.hpp"

namespace tkz::liealg {

/// Finite-dimensional Lie algebra in a fixed basis {a^i}.
///
/// Structure constants are stored flat: [a^i, a^j] = Σ_k c(i,j,k) a^k.
/// The invariant form is G(i,j) = (a^i, a^j). For the built-in sl(n) family the
/// defining-representation matrices and the simple-root coordinates of every basis
/// element are kept as well; user-supplied algebras leave them empty.
struct LieAlgebraData {
  std::string name;
  int dim = 0;
  std::vector<std::string> basis_labels;
  std::vector<cplx> structure;  // dim^3, index (i*dim + j)*dim + k
  CMatrix form;
  Rational dual_coxeter;
  std::vector<CMatrix> defining;           // empty unless built-in
  std::vector<std::vector<int>> root_coords;  // simple-root coefficients per basis element

  cplx c(int i, int j, int k) const { return structure[(static_cast<std::size_t>(i) * dim + j) * dim + k]; }
  /// Coordinates of [u, v] for u, v given in basis coordinates.
  CVector bracket(const CVector& u, const CVector& v) const;
  CMatrix ad(int i) const;
};

/// Validated construction from raw data (antisymmetry, Jacobi, invariance, invertible form).
LieAlgebraData make_algebra(std::string name, std::vector<std::string> labels, std::vector<cplx> structure,
                            CMatrix form, Rational dual_coxeter);

/// Built-in algebras. Currently "sl" with n >= 2, trace form of the defining representation,
/// Cartan–Weyl basis ordered {e_γ (positive roots), h_1..h_{n-1}, f_γ}.
LieAlgebraData build_algebra(const std::string& name, int n);

/// Invariant residuals, max-abs over all basis triples.
struct AlgebraChecks {
  double antisymmetry = 0.0;
  double jacobi = 0.0;
  double invariance = 0.0;
  double symmetry = 0.0;
  double condition = 0.0;
};
AlgebraChecks check_algebra(const LieAlgebraData& alg);

/// Columns are the coordinates of the dual vectors a^{i'}; (a^{i'}, a^j) = δ_ij.
CMatrix dual_basis(const LieAlgebraData& alg);

/// Gram matrix of two coordinate families: P(i,j) = (u_i, v_j).
CMatrix pairing(const LieAlgebraData& alg, const CMatrix& u, const CMatrix& v);

/// New basis b^i = Σ_j p(j,i) a^j with recomputed structure constants and form.
LieAlgebraData change_basis(const LieAlgebraData& alg, const CMatrix& p);

/// Finite-dimensional representation. `action[i]` is ρ(a^i); entries with
/// `defined[i] == false` are unknown (twisted slots act only through the fixed subalgebra).
struct ModuleRep {
  int dim = 0;
  std::vector<CMatrix> action;
  std::vector<bool> defined;
  std::optional<Rational> spin;
  cplx conformal_weight{0.0, 0.0};

  bool fully_defined() const;
  /// ρ(v) for v in basis coordinates; throws ConfigError if v touches undefined indices.
  CMatrix act(const CVector& v, double tol = 1e-10) const;
};

ModuleRep make_rep(std::vector<CMatrix> action);
ModuleRep trivial_rep(int alg_dim);
ModuleRep build_irrep_sl2(const Rational& spin);
/// Re-expresses a representation in the basis b^i = Σ_j p(j,i) a^j.
ModuleRep change_basis(const ModuleRep& rep, const CMatrix& p);

/// max-abs of ρ([a^i,a^j]) − [ρ(a^i),ρ(a^j)] over the defined pairs.
double homomorphism_defect(const LieAlgebraData& alg, const ModuleRep& rep);

/// Σ_i ρ(a^i) ρ(a^{i'}).
CMatrix casimir_matrix(const LieAlgebraData& alg, const ModuleRep& rep);

/// Casimir scalar / (2(level + h^∨)); requires a scalar Casimir.
cplx conformal_weight(const LieAlgebraData& alg, const ModuleRep& rep, cplx level);

/// Throws ConfigError at the critical level k = −h^∨.
void require_noncritical(const LieAlgebraData& alg, cplx level);

}  // namespace tkz::liealg
