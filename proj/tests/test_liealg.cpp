#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"
#include "tkz/errors.hpp"

using namespace tkz;
using Catch::Approx;

namespace {

// Form and brackets recomputed from the defining matrices, independent of the stored tables.
cplx trace_form(const CMatrix& x, const CMatrix& y) { return (x * y).trace(); }

CMatrix element(const liealg::LieAlgebraData& alg, const CVector& coords) {
  CMatrix m = CMatrix::Zero(alg.defining[0].rows(), alg.defining[0].cols());
  for (int i = 0; i < alg.dim; ++i) m += coords(i) * alg.defining[i];
  return m;
}

CVector random_coords(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = {g(rng), g(rng)};
  return v;
}

}  // namespace

TEST_CASE("sl(n) dimensions and dual Coxeter numbers") {
  for (int n : {2, 3, 4}) {
    auto alg = liealg::build_algebra("sl", n);
    CHECK(alg.dim == n * n - 1);
    CHECK(alg.dual_coxeter == Rational(n));
    CHECK(static_cast<int>(alg.defining.size()) == alg.dim);
  }
  CHECK_THROWS_AS(liealg::build_algebra("so", 3), ConfigError);
  CHECK_THROWS_AS(liealg::build_algebra("sl", 1), ConfigError);
}

TEST_CASE("dual basis pairs to the identity against the trace form") {
  for (int n : {2, 3}) {
    auto alg = liealg::build_algebra("sl", n);
    CMatrix dual = liealg::dual_basis(alg);
    double err = 0.0;
    for (int i = 0; i < alg.dim; ++i)
      for (int j = 0; j < alg.dim; ++j) {
        const cplx v = trace_form(element(alg, dual.col(i)), alg.defining[j]);
        err = std::max(err, std::abs(v - cplx(i == j ? 1.0 : 0.0)));
      }
    CHECK(err < 1e-12);
  }
}

TEST_CASE("structure constants reproduce matrix commutators") {
  for (int n : {2, 3}) {
    auto alg = liealg::build_algebra("sl", n);
    double err = 0.0;
    for (int i = 0; i < alg.dim; ++i)
      for (int j = 0; j < alg.dim; ++j) {
        CVector c(alg.dim);
        for (int k = 0; k < alg.dim; ++k) c(k) = alg.c(i, j, k);
        err = std::max(err, max_abs(element(alg, c) - commutator(alg.defining[i], alg.defining[j])));
      }
    CHECK(err < 1e-12);
    auto ch = liealg::check_algebra(alg);
    CHECK(ch.antisymmetry < 1e-12);
    CHECK(ch.jacobi < 1e-12);
    CHECK(ch.invariance < 1e-12);
    CHECK(ch.symmetry < 1e-12);
  }
}

TEST_CASE("invariance of the form on random elements") {
  std::mt19937_64 rng(7);
  for (int n : {2, 3}) {
    auto alg = liealg::build_algebra("sl", n);
    for (int trial = 0; trial < 20; ++trial) {
      CVector a = random_coords(alg.dim, rng), b = random_coords(alg.dim, rng), c = random_coords(alg.dim, rng);
      auto form = [&](const CVector& u, const CVector& v) { return (u.transpose() * alg.form * v)(0, 0); };
      const cplx lhs = form(alg.bracket(a, b), c) + form(b, alg.bracket(a, c));
      CHECK(std::abs(lhs) < 1e-11);
      // Bilinearity of the bracket against the matrix realisation.
      CHECK(max_abs(element(alg, alg.bracket(a, b)) - commutator(element(alg, a), element(alg, b))) < 1e-11);
    }
  }
}

TEST_CASE("sl(2) irreducible representations") {
  auto alg = test::sl2();
  for (auto j : {Rational(1, 2), Rational(1), Rational(3, 2), Rational(2)}) {
    auto rep = liealg::build_irrep_sl2(j);
    CHECK(rep.dim == static_cast<int>((j * Rational(2)).num() + 1));
    CHECK(liealg::homomorphism_defect(alg, rep) < 1e-12);
    // With the trace form the Casimir acts by 2 j (j + 1).
    const double cas = 2.0 * j.to_double() * (j.to_double() + 1.0);
    CHECK(max_abs(liealg::casimir_matrix(alg, rep) - cas * CMatrix::Identity(rep.dim, rep.dim)) < 1e-12);
    const cplx h = liealg::conformal_weight(alg, rep, 1.0);
    CHECK(h.real() == Approx(j.to_double() * (j.to_double() + 1.0) / 3.0).epsilon(1e-14));
  }
}

TEST_CASE("critical level is rejected") {
  auto alg = test::sl2();
  CHECK_THROWS_AS(liealg::require_noncritical(alg, -2.0), ConfigError);
  CHECK_NOTHROW(liealg::require_noncritical(alg, 1.0));
  auto rep = liealg::build_irrep_sl2(Rational(1, 2));
  CHECK_THROWS_AS(liealg::conformal_weight(alg, rep, -2.0), ConfigError);
}

TEST_CASE("make_algebra validates its input") {
  auto alg = test::sl2();
  // Breaking antisymmetry of one structure constant must be caught.
  auto bad = alg.structure;
  bad[(0 * 3 + 2) * 3 + 1] += 1.0;
  CHECK_THROWS_AS(liealg::make_algebra("bad", alg.basis_labels, bad, alg.form, alg.dual_coxeter), ConfigError);
  // A degenerate form must be caught.
  CHECK_THROWS_AS(liealg::make_algebra("bad", alg.basis_labels, alg.structure, CMatrix::Zero(3, 3), alg.dual_coxeter),
                  ConfigError);
  // The original data passes.
  CHECK_NOTHROW(liealg::make_algebra("copy", alg.basis_labels, alg.structure, alg.form, alg.dual_coxeter));
}

TEST_CASE("basis change keeps the invariants") {
  auto alg = liealg::build_algebra("sl", 3);
  std::mt19937_64 rng(11);
  CMatrix p(alg.dim, alg.dim);
  for (int i = 0; i < alg.dim; ++i) p.col(i) = random_coords(alg.dim, rng);
  auto moved = liealg::change_basis(alg, p);
  auto ch = liealg::check_algebra(moved);
  CHECK(ch.antisymmetry < 1e-9);
  CHECK(ch.jacobi < 1e-9);
  CHECK(ch.invariance < 1e-9);
  CMatrix dual = liealg::dual_basis(moved);
  CMatrix pair = liealg::pairing(moved, dual, CMatrix::Identity(alg.dim, alg.dim));
  CHECK(max_abs(pair - CMatrix::Identity(alg.dim, alg.dim)) < 1e-9);
}

TEST_CASE("matrix representations are checked for the homomorphism property") {
  auto alg = test::sl2();
  auto rep = liealg::build_irrep_sl2(Rational(1));
  auto broken = rep.action;
  broken[0] *= 2.0;
  CHECK(liealg::homomorphism_defect(alg, liealg::make_rep(broken)) > 1e-3);
  auto triv = liealg::trivial_rep(alg.dim);
  CHECK(triv.dim == 1);
  CHECK(liealg::homomorphism_defect(alg, triv) == 0.0);
}
