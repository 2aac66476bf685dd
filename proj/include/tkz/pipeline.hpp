#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tkz/io.hpp"

namespace tkz::pipeline {

struct LocalStage {
  int component = 0;              // 0-based
  std::vector<cplx> fixed_eta;    // values of the other η; the entry at `component` is ignored
  int order = 40;
  double coefficient_radius = std::numeric_limits<double>::infinity();
  std::vector<cplx> match_path;   // η path for the local/global comparison; empty to skip
};

struct ChangeStage {
  std::string name;
  ChangeOfVariables cov;
  std::vector<Rational> cutoffs;
  std::vector<int> branches;
  bool same_sign = false;  // analyze the same-sign variant instead of the connection itself
  std::vector<LocalStage> local;
};

struct TransportStage {
  std::string name;
  transport::PathSpec path;
  std::optional<CMatrix> initial;  // identity when absent
};

struct RunConfig {
  std::string name;
  std::uint64_t seed = 1;
  liealg::LieAlgebraData algebra;
  cplx level;
  autmod::AutomorphismData automorphism;
  bool identity_automorphism = false;
  int n = 1;
  std::vector<liealg::ModuleRep> untwisted;
  autmod::TwistedSlotSpec twisted;
  std::optional<liealg::ModuleRep> twisted_full;  // representation on the whole algebra, when known
  int passive_dim = 1;
  bool classical = false;
  connection::OmegaOrder omega_order = connection::OmegaOrder::Displayed;
  int euler_points = 20;
  int flatness_points = 10;
  std::vector<ChangeStage> changes;
  std::vector<TransportStage> paths;
  std::vector<TransportStage> loops;
  double transport_tol = 1e-10;
  double cluster_tol = 1e-9;
  std::string report_path;
  std::string csv_prefix;
};

liealg::LieAlgebraData algebra_from(const io::json& j);
cplx level_from(const io::json& j);
autmod::AutomorphismData automorphism_from(const liealg::LieAlgebraData& alg, const io::json& j, bool* identity = nullptr);
liealg::ModuleRep untwisted_from(const liealg::LieAlgebraData& alg, const io::json& j);
autmod::TwistedSlotSpec twisted_spec_from(const io::json& j);

/// Validates cross-references (slot count vs N, level, shapes) as it parses.
RunConfig parse_config(const io::json& j);

/// The connection the configuration describes, with Ω checks when it goes through the twisted path.
struct BuiltConnection {
  connection::ConnectionSystem conn;
  std::optional<connection::OmegaSet> omega;
};
BuiltConnection build_connection(const RunConfig& cfg);

/// Random points of M^N (|z_i| in [0.5, 2], |z_i − z_j| >= 0.25) with branch indices in {−1, 0, 1}.
struct Sample {
  std::vector<cplx> z;
  std::vector<int> p;
};
std::vector<Sample> random_points(int n, int count, std::mt19937_64& rng);

struct Report {
  io::json data;
  std::string exponents_csv;
  std::string residuals_csv;
};

/// Runs every configured stage in order; errors carry the stage name and keep their class.
Report run_pipeline(const RunConfig& cfg);

}  // namespace tkz::pipeline
