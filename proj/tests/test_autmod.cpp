#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "tkz/errors.hpp"

using namespace tkz;

TEST_CASE("alpha prime") {
  CHECK(autmod::alpha_prime(Rational(0)) == Rational(0));
  CHECK(autmod::alpha_prime(Rational(1, 2)) == Rational(1, 2));
  CHECK(autmod::alpha_prime(Rational(1, 3)) == Rational(2, 3));
  CHECK(autmod::alpha_prime(Rational(5, 6)) == Rational(1, 6));
}

TEST_CASE("half-order inner automorphism of sl(2)") {
  auto alg = test::sl2();
  auto aut = autmod::inner_automorphism(alg, {Rational(1, 2)});
  CHECK(aut.order == 2);
  // Basis order e, h, f: the root vectors flip sign, h is fixed.
  CHECK(aut.alpha[0] == Rational(1, 2));
  CHECK(aut.alpha[1] == Rational(0));
  CHECK(aut.alpha[2] == Rational(1, 2));
  CMatrix expected = CMatrix::Zero(3, 3);
  expected(0, 0) = -1.0;
  expected(1, 1) = 1.0;
  expected(2, 2) = -1.0;
  CHECK(max_abs(aut.matrix_g - expected) < 1e-15);

  auto ch = autmod::check_automorphism(alg, aut);
  CHECK(ch.homomorphism < 1e-12);
  CHECK(ch.power_identity < 1e-12);
  CHECK(ch.minimal_order);
  CHECK(ch.eigen < 1e-12);
  CHECK(ch.duality < 1e-12);
  CHECK(ch.pairing);
  CHECK(ch.involution);
  CHECK(autmod::fixed_subalgebra(alg, aut) == std::vector<int>{1});
}

TEST_CASE("order-three automorphism of sl(3)") {
  auto alg = liealg::build_algebra("sl", 3);
  auto aut = autmod::inner_automorphism(alg, {Rational(1, 3), Rational(1, 3)});
  CHECK(aut.order == 3);
  auto ch = autmod::check_automorphism(alg, aut);
  CHECK(ch.homomorphism < 1e-12);
  CHECK(ch.power_identity < 1e-12);
  CHECK(ch.minimal_order);
  CHECK(ch.duality < 1e-12);
  CHECK(ch.pairing);
  // Fixed part is the Cartan subalgebra.
  CHECK(autmod::fixed_subalgebra(alg, aut).size() == 2);
  for (int i = 0; i < aut.size(); ++i) CHECK((aut.alpha[i] * Rational(3)).is_integer());
}

TEST_CASE("automorphism given as a matrix") {
  auto alg = test::sl2();
  auto inner = autmod::inner_automorphism(alg, {Rational(1, 2)});
  auto aut = autmod::automorphism_from_matrix(alg, inner.matrix_g);
  CHECK(aut.order == 2);
  auto ch = autmod::check_automorphism(alg, aut);
  CHECK(ch.eigen < 1e-12);
  CHECK(ch.duality < 1e-12);
  CHECK(ch.pairing);
  int fixed = 0;
  for (int i = 0; i < aut.dim; ++i) fixed += aut.alpha[i].is_zero();
  CHECK(fixed == 1);

  // Not an automorphism: scaling one root vector only.
  CMatrix bad = CMatrix::Identity(3, 3);
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(autmod::automorphism_from_matrix(alg, bad), ConfigError);
  // Infinite order.
  CMatrix scale = CMatrix::Identity(3, 3);
  scale(0, 0) = 2.0;
  scale(2, 2) = 0.5;
  CHECK_THROWS_AS(autmod::automorphism_from_matrix(alg, scale, 50), ConfigError);
}

TEST_CASE("twisted slot representations") {
  auto alg = test::sl2();
  auto aut = autmod::inner_automorphism(alg, {Rational(1, 2)});

  autmod::TwistedSlotSpec trivial;
  auto rep = autmod::twisted_slot_rep(alg, aut, trivial);
  CHECK(rep.dim == 1);

  autmod::TwistedSlotSpec spin;
  spin.kind = autmod::TwistedSlotSpec::Kind::Spin;
  spin.spin = Rational(1, 2);
  auto s = autmod::twisted_slot_rep(alg, aut, spin);
  CHECK(s.dim == 2);
  CHECK(s.defined[1]);
  CHECK_FALSE(s.defined[0]);
  CHECK(max_abs(autmod::twisted_act(aut, s, 1) - liealg::build_irrep_sl2(Rational(1, 2)).action[1]) < 1e-15);

  // Matrices on a non-fixed index are refused.
  autmod::TwistedSlotSpec wrong;
  wrong.kind = autmod::TwistedSlotSpec::Kind::Matrices;
  wrong.matrices = {{0, CMatrix::Identity(1, 1)}};
  CHECK_THROWS_AS(autmod::twisted_slot_rep(alg, aut, wrong), ConfigError);

  // h acting by any scalar is a representation of the abelian fixed part.
  autmod::TwistedSlotSpec scalar;
  scalar.kind = autmod::TwistedSlotSpec::Kind::Matrices;
  scalar.matrices = {{1, CMatrix::Constant(1, 1, cplx(0.3, 0.0))}};
  CHECK(autmod::twisted_slot_rep(alg, aut, scalar).dim == 1);
}
