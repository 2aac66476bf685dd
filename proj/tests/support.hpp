// Shared fixtures for the test binaries.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "tkz/connection.hpp"
#include "tkz/pipeline.hpp"

namespace tkz::test {

inline std::string config_path(const std::string& name) { return std::string(TKZ_SOURCE_DIR) + "/configs/" + name; }

inline liealg::LieAlgebraData sl2() { return liealg::build_algebra("sl", 2); }

/// sl(2), g = e^{ad h} with α(e) = fraction, spin-j untwisted slots, twisted slot per `twisted`.
struct TwistedSetup {
  liealg::LieAlgebraData alg;
  autmod::AutomorphismData aut;
  connection::OmegaSet omega;
  connection::ConnectionSystem conn;
};

inline TwistedSetup twisted_sl2(int n, const Rational& fraction, cplx level = 1.0, const Rational& spin = Rational(1, 2),
                                autmod::TwistedSlotSpec twisted = {},
                                connection::OmegaOrder order = connection::OmegaOrder::Displayed) {
  TwistedSetup s;
  s.alg = sl2();
  s.aut = autmod::inner_automorphism(s.alg, {fraction});
  connection::SlotReps reps;
  for (int i = 0; i < n; ++i) reps.untwisted.push_back(liealg::build_irrep_sl2(spin));
  reps.twisted = autmod::twisted_slot_rep(s.alg, s.aut, twisted);
  s.omega = connection::build_omega_set(s.alg, s.aut, level, reps, order);
  s.conn = connection::assemble_connection(s.omega, s.aut.order);
  return s;
}

/// Classical sl(2) KZ with spin-1/2 slots everywhere, including the one at the origin.
inline connection::ConnectionSystem classical_sl2(int n, cplx level = 1.0) {
  auto alg = sl2();
  std::vector<liealg::ModuleRep> untw(n, liealg::build_irrep_sl2(Rational(1, 2)));
  return connection::classical_connection(alg, level, untw, liealg::build_irrep_sl2(Rational(1, 2)));
}

/// The same through the twisted construction with the identity automorphism.
inline connection::ConnectionSystem classical_via_twisted(int n, cplx level = 1.0) {
  autmod::TwistedSlotSpec spec;
  spec.kind = autmod::TwistedSlotSpec::Kind::Spin;
  spec.spin = Rational(1, 2);
  return twisted_sl2(n, Rational(0), level, Rational(1, 2), spec).conn;
}

/// Points of M^N with |z_i| in [0.5, 2] and pairwise gaps >= 0.25.
inline std::vector<pipeline::Sample> sample_points(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return pipeline::random_points(n, count, rng);
}

inline double rel_gap(const CMatrix& a, const CMatrix& b) { return max_abs(a - b) / std::max(1e-300, max_abs(b)); }

}  // namespace tkz::test
