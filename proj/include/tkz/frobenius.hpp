#pragma once

#include <limits>
#include <vector>

#include "tkz/linalg.hpp"

namespace tkz::frobenius {

/// Local fundamental solution of η Ψ' = H(η) Ψ at η = 0:
///   Ψ(η) = S(η) η^{D'} η^{Λ},  S(η) = Σ_{m≤M} S_m η^m,  S_0 = Id,
/// with D' = T D T^{-1} an integer shift (zero unless exponents differ by positive integers)
/// and Λ the exponent matrix. η^{D'} is single-valued, so monodromy is exp(2πiΛ).
struct FrobeniusSolution {
  CMatrix Lambda;
  std::vector<CMatrix> S;
  CMatrix T;                  // block basis of generalized eigenspaces (identity if non-resonant)
  std::vector<int> shifts;    // diagonal of D in the T basis
  int order = 0;              // M
  double radius = 0.0;
  double coefficient_radius = 0.0;  // r_H
  bool resonant = false;
  int log_depth = 0;  // highest power of log η that can occur
  double s0_det = 1.0;

  CMatrix shift_matrix() const;  // D'
};

struct FrobeniusOptions {
  int order = 40;
  double cluster_tol = 1e-9;  // integer-difference test between exponents
  double coefficient_radius = std::numeric_limits<double>::infinity();
};

/// Solves the recursion m S_m + S_m H_0 − H_0 S_m = Σ_{q=1}^{m} H_q S_{m−q} (and its block
/// normal-form variant when exponents differ by positive integers). H_q beyond the list are zero.
FrobeniusSolution frobenius_fundamental(const std::vector<CMatrix>& H, const FrobeniusOptions& opt = {});

/// min(r_H, 1 / max_{last 5 m} ‖S_m‖^{1/m}); needs at least 8 coefficients.
double radius_estimate(const FrobeniusSolution& sol, double coefficient_radius);

struct Evaluation {
  CMatrix value;
  bool outside_disc = false;
};
/// S(η) η^{D'} exp(Λ l_p(η)).
Evaluation eval_solution(const FrobeniusSolution& sol, cplx eta, int p);
/// Same with a caller-supplied logarithm of η.
Evaluation eval_solution_log(const FrobeniusSolution& sol, cplx eta, cplx log_eta);

/// ‖η Ψ' − H(η) Ψ‖ / ‖Ψ‖ at η.
double differential_residual(const FrobeniusSolution& sol, const std::vector<CMatrix>& H, cplx eta, int p = 0);

/// Companion system of the Gauss equation for (y, θy), θ = η d/dη, valid for |η| < 1:
/// H_0 = [[0,1],[0,1−c]], H_m = [[0,0],[ab, a+b+1−c]] for m ≥ 1.
std::vector<CMatrix> hypergeometric_companion(cplx a, cplx b, cplx c, int count);

}  // namespace tkz::frobenius
