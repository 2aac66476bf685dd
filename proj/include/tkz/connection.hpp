#pragma once

#include <map>
#include <string>
#include <vector>

#include "tkz/autmod.hpp"
#include "tkz/liealg.hpp"
#include "tkz/relement.hpp"

namespace tkz::connection {

/// Operator order in the α ≠ 0 part of Ω_ℓ: ρ(a^i)ρ(a^{i'}) as displayed, or the reverse.
enum class OmegaOrder { Displayed, Reversed };

/// Slots: 0 (passive), 1..N (untwisted), N+1 (twisted). Vectors below are 0-based over 1..N.
struct OmegaSet {
  int n = 0;
  int alg_dim = 0;
  std::vector<int> dims;  // size N + 2
  int state_dim = 1;
  cplx level;
  cplx prefactor;  // 1 / (2(k + h^∨))
  std::vector<Rational> alpha;  // over the doubled index set
  OmegaOrder order = OmegaOrder::Displayed;
  // pair[l][p][i] = Ω^i_{lp} (unused when l == p).
  std::vector<std::vector<std::vector<CMatrix>>> pair;
  // The same without the prefactor; grouped sums scale once so results do not depend on grouping.
  std::vector<std::vector<std::vector<CMatrix>>> raw_pair;
  std::vector<CMatrix> slot;
  // Total fixed-subalgebra action on the tensor space, one matrix per fixed basis vector.
  std::vector<CMatrix> fixed_action;

  const CMatrix& pair_op(int l, int p, int i) const { return pair[l][p][i]; }
  /// Σ_{i: α^i = a} Ω^i_{lp}.
  CMatrix grouped_pair(int l, int p, const Rational& a) const;
  /// The distinct α values, ascending.
  std::vector<Rational> alpha_values() const;
};

struct SlotReps {
  std::vector<liealg::ModuleRep> untwisted;  // N reps over the algebra basis
  liealg::ModuleRep twisted;                 // over eigen-indices, fixed subalgebra only
  int passive_dim = 1;
};

/// Embeds an operator on slot s into the full tensor space.
CMatrix embed(const std::vector<int>& dims, int slot, const CMatrix& op);

OmegaSet build_omega_set(const liealg::LieAlgebraData& alg, const autmod::AutomorphismData& aut, cplx level,
                         const SlotReps& reps, OmegaOrder order = OmegaOrder::Displayed);

struct OmegaChecks {
  double symmetry = 0.0;     // max |Ω^i_{lp} − Ω^{i'}_{pl}|
  double equivariance = 0.0;  // max commutator of α-grouped ops with the fixed action
};
OmegaChecks check_omega(const OmegaSet& om);

struct ConnectionSystem {
  int n = 0;
  int t = 1;
  int state_dim = 1;
  std::vector<rcalc::RMatrix> A;  // stored transposed: the system lives on the dual space
  std::vector<Rational> alpha;
  std::vector<int> dims;
  std::string description;

  std::vector<CMatrix> eval(const std::vector<cplx>& z, const std::vector<int>& p) const;
  std::vector<CMatrix> eval_with_logs(const std::vector<cplx>& z, const std::vector<cplx>& logs) const;
};

/// A_ℓ = Σ_{i,p≠ℓ} z_p^{α^i} z_ℓ^{−α^i} (z_ℓ − z_p)^{−1} Ω^i_{ℓp}ᵀ + z_ℓ^{−1} Ω_ℓᵀ.
ConnectionSystem assemble_connection(const OmegaSet& om, int t);

/// Untwisted KZ built directly over the basis I (all α = 0). `twisted` must be fully defined.
ConnectionSystem classical_connection(const liealg::LieAlgebraData& alg, cplx level,
                                      const std::vector<liealg::ModuleRep>& untwisted,
                                      const liealg::ModuleRep& twisted, int passive_dim = 1);

/// Every A_ℓ with ℓ > p gets (z_p − z_ℓ)^{-1} where it had (z_ℓ − z_p)^{-1}, so all
/// equations share the sign of the difference. Not a KZ system; used as a negative control.
ConnectionSystem same_sign_variant(const ConnectionSystem& conn);

/// Every entry lies in the span of z_p^{a} z_ℓ^{−a} (z_ℓ − z_p)^{−1} and z_ℓ^{−1}.
struct ShapeReport {
  bool ok = true;
  std::string offender;
  bool homogeneous = true;  // all entries of degree −1
};
ShapeReport check_shape(const ConnectionSystem& conn);

struct EulerResult {
  std::vector<CMatrix> values;
  CMatrix mean;
  double deviation = 0.0;
};
/// E(z) = Σ_ℓ z_ℓ A_ℓ(z) at each sample.
EulerResult euler_contraction(const ConnectionSystem& conn, const std::vector<std::vector<cplx>>& points,
                              const std::vector<std::vector<int>>& branches);

struct FlatnessResult {
  double residual = 0.0;
  double est_error = 0.0;  // floating-point rounding bound for the residual
  std::vector<double> per_pair;  // ordered (0,1), (0,2), ..., (1,2), ...
};
/// max over pairs of ‖∂_ℓA_m − ∂_mA_ℓ − [A_ℓ, A_m]‖_F with symbolic derivatives.
FlatnessResult flatness_residual(const ConnectionSystem& conn, const std::vector<cplx>& z, const std::vector<int>& p);

}  // namespace tkz::connection
