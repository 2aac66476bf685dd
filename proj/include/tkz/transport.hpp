#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tkz/change.hpp"
#include "tkz/connection.hpp"
#include "tkz/frobenius.hpp"

namespace tkz::transport {

/// Polyline in ℂ^N with the starting branch of every z_i.
struct PathSpec {
  std::vector<std::vector<cplx>> vertices;
  std::vector<int> branch_start;
  double avoid_margin = 0.0;
};

struct TransportOptions {
  double tol = 1e-10;
  double initial_step = 0.05;  // fraction of a segment
  double min_step = 1e-12;
  long max_steps = 2000000;
};

struct TransportResult {
  CMatrix value;
  CMatrix refined;  // rerun over the accepted steps, each split in two halves
  double est_error = 0.0;  // max-abs gap between value and refined, relative to max(1, |refined|)
  std::vector<int> branch_end;     // p with l_p(z_i) equal to the tracked log at the end
  std::vector<double> arg_end;     // tracked continuous arguments of z_i
  std::vector<double> diff_arg_end;  // of z_i − z_j, pairs i < j in row order
  long steps = 0;
  long rejected = 0;
};

/// Distance of a point to the singular locus {z_i = 0} ∪ {z_i = z_j}, and the closest component.
std::pair<double, std::string> distance_to_locus(const std::vector<cplx>& z);

/// Throws ConfigError if some segment comes closer than avoid_margin (or touches) the locus.
void validate_path(const PathSpec& path);

/// Solves dΨ/ds = (Σ_ℓ A_ℓ(z(s)) ż_ℓ) Ψ along the path with an embedded 5(4) Runge–Kutta pair.
/// psi0 may hold several columns.
TransportResult integrate_path(const connection::ConnectionSystem& conn, const PathSpec& path, const CMatrix& psi0,
                               const TransportOptions& opt = {});

struct MonodromyResult {
  CMatrix matrix;  // M = Y_final Y_init^{-1}: continuation maps Y ↦ M Y
  double est_error = 0.0;
  std::vector<int> branch_end;
  cplx det;
};

MonodromyResult monodromy_loop(const connection::ConnectionSystem& conn, const PathSpec& loop, const CMatrix& basis_seed,
                               const TransportOptions& opt = {});

/// Closed polygon approximating a circle in one coordinate, others fixed at the centre point.
PathSpec circle_loop(const std::vector<cplx>& base, int var, cplx centre, int segments, int turns = 1);

/// η Ψ' = H(η) Ψ, H given by its Taylor coefficients, along an η polyline starting on branch p.
TransportResult integrate_local(const std::vector<CMatrix>& H, double coefficient_radius,
                                const std::vector<cplx>& eta_path, int branch_start, const CMatrix& psi0,
                                const TransportOptions& opt = {});

/// Relative difference between the Frobenius solution evaluated at the end of an η path
/// and its value at the start transported along the path through the local system.
double match_local_system(const frobenius::FrobeniusSolution& sol, const std::vector<CMatrix>& H,
                          const std::vector<cplx>& eta_path, const TransportOptions& opt = {});

/// Same comparison through the global connection: the η_j path (other η fixed) is mapped to a
/// z polyline and the z-system is integrated. The branch of z at the start follows the series.
double match_local_global(const frobenius::FrobeniusSolution& sol, const connection::ConnectionSystem& conn,
                          const ChangeOfVariables& cov, int component, const std::vector<cplx>& fixed_eta,
                          const std::vector<cplx>& eta_path, const rcalc::ComposeOptions& compose = {},
                          const TransportOptions& opt = {}, int samples_per_segment = 64);

}  // namespace tkz::transport
