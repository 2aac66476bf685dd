#pragma once

#include <vector>

#include "tkz/liealg.hpp"
#include "tkz/rational.hpp"

namespace tkz::autmod {

/// Eigendata of a finite-order automorphism g.
///
/// The index set has 2·dim entries: i < dim labels an eigenvector a^i of g, and
/// i + dim labels its dual a^{i'} (the pairing partner under the invariant form).
/// g a^i = e^{2πi α^i} a^i with α^i ∈ [0, 1) ∩ (1/t)ℤ.
struct AutomorphismData {
  int order = 1;  // t
  int dim = 0;
  CMatrix matrix_g;    // dim × dim, acting on basis coordinates
  CMatrix eigenbasis;  // dim × 2dim, column i = coordinates of a^i
  std::vector<Rational> alpha;  // size 2dim

  int size() const noexcept { return 2 * dim; }
  int prime(int i) const noexcept { return i < dim ? i + dim : i - dim; }
  CVector vec(int i) const { return eigenbasis.col(i); }
  /// Coordinates in the eigenbasis {a^i}_{i<dim} of a basis-coordinate vector.
  CVector eigen_coords(const CVector& v) const;
};

/// 0 ↦ 0, α ↦ 1 − α; domain [0, 1).
Rational alpha_prime(const Rational& alpha);

/// g = e^{ad h} with α(simple root k) = fractions[k]; requires built-in root data.
AutomorphismData inner_automorphism(const liealg::LieAlgebraData& alg, const std::vector<Rational>& fractions);

/// Arbitrary finite-order automorphism given as its matrix on basis coordinates.
AutomorphismData automorphism_from_matrix(const liealg::LieAlgebraData& alg, const CMatrix& g, int max_order = 1000);

struct AutomorphismChecks {
  double homomorphism = 0.0;  // max |g[a,b] − [ga,gb]|
  double power_identity = 0.0;  // max |g^t − Id|
  bool minimal_order = true;    // g^s ≠ Id for 0 < s < t
  double eigen = 0.0;           // max |g a^i − e^{2πiα^i} a^i|
  double duality = 0.0;         // max |(a^{i'}, a^j) − δ_ij|
  bool pairing = true;          // α^{i'} = alpha_prime(α^i)
  bool involution = true;
};
AutomorphismChecks check_automorphism(const liealg::LieAlgebraData& alg, const AutomorphismData& aut);

/// Indices i < dim with α^i = 0. Throws NumericError if the span is not closed under brackets.
std::vector<int> fixed_subalgebra(const liealg::LieAlgebraData& alg, const AutomorphismData& aut);

/// Specification of the twisted slot's lowest-weight space.
struct TwistedSlotSpec {
  enum class Kind { Trivial, Matrices, Spin } kind = Kind::Trivial;
  std::vector<std::pair<int, CMatrix>> matrices;  // eigen-index → ρ(a^i)
  Rational spin;                                   // restriction of an sl(2) irrep
};

/// Representation indexed by eigenbasis indices i < dim, defined only on the fixed subalgebra.
liealg::ModuleRep twisted_slot_rep(const liealg::LieAlgebraData& alg, const AutomorphismData& aut,
                                   const TwistedSlotSpec& spec);

/// ρ(a^i) for any index of the doubled set; the vector must lie in the fixed subalgebra.
CMatrix twisted_act(const AutomorphismData& aut, const liealg::ModuleRep& rep, int index);

}  // namespace tkz::autmod
