#include <catch_amalgamated.hpp>

#include <algorithm>

#include "support.hpp"
#include "tkz/errors.hpp"
#include "tkz/singular.hpp"

using namespace tkz;

namespace {

ChangeOfVariables sum_and_difference(int t) {
  CMatrix a(2, 2);
  a << 0.5, 0.5, 0.5, -0.5;
  CVector beta(2);
  beta << 1.0, 0.0;
  return make_change(a, beta, {false, false}, t);
}

ChangeOfVariables difference_and_infinity(int t) {
  CMatrix a(2, 2);
  a << 1, 0, -1, 1;
  return make_change(a, CVector::Zero(2), {false, true}, t);
}

std::vector<Rational> cutoffs(int a, int b) { return {Rational(a), Rational(b)}; }

// Eigenvalues of 2/(2(k+h)) Σ ρ(a^i) ⊗ ρ(a_i) on two spin-1/2 slots, with the dual basis
// taken from the inverse of the trace-form Gram matrix.
std::vector<double> pair_casimir_eigenvalues(double level) {
  auto alg = test::sl2();
  auto rep = liealg::build_irrep_sl2(Rational(1, 2));
  CMatrix gram(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gram(i, j) = (alg.defining[i] * alg.defining[j]).trace();
  CMatrix inv = gram.inverse();
  CMatrix sum = CMatrix::Zero(4, 4);
  for (int i = 0; i < 3; ++i) {
    CMatrix dual = CMatrix::Zero(2, 2);
    for (int k = 0; k < 3; ++k) dual += inv(k, i) * rep.action[k];
    sum += kron(dual, rep.action[i]);
  }
  sum *= 2.0 / (2.0 * (level + 2.0));
  Eigen::ComplexEigenSolver<CMatrix> es(sum);
  std::vector<double> ev;
  for (int i = 0; i < 4; ++i) ev.push_back(es.eigenvalues()(i).real());
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace

TEST_CASE("classical system is simply singular under the sum-and-difference change") {
  auto conn = test::classical_sl2(2);
  auto res = singular::check_simple_singularity(conn, sum_and_difference(1), cutoffs(8, 8));
  CHECK(res.verdict.holomorphic);
  CHECK(res.verdict.offenders.empty());
  CHECK(res.system.hypothesis() == "affine");
}

TEST_CASE("twisted system is simply singular under both changes") {
  auto s = test::twisted_sl2(2, Rational(1, 2));
  for (const auto& cov : {sum_and_difference(2), difference_and_infinity(2)}) {
    auto res = singular::check_simple_singularity(s.conn, cov, cutoffs(8, 8));
    CHECK(res.verdict.holomorphic);
  }
  CHECK(difference_and_infinity(2).affine() == false);
}

TEST_CASE("same-sign variant fails with a single offender") {
  auto variant = connection::same_sign_variant(test::classical_sl2(2));
  auto res = singular::check_simple_singularity(variant, sum_and_difference(1), cutoffs(8, 8));
  CHECK_FALSE(res.verdict.holomorphic);
  REQUIRE(res.verdict.offenders.size() == 1);
  const auto& off = res.verdict.offenders[0];
  CHECK(off.component == 0);
  CHECK(off.exponents == std::vector<Rational>{Rational(1), Rational(-1)});
  CHECK(off.magnitude > 1e-3);
}

TEST_CASE("verdicts that change with the cutoff are inconclusive") {
  auto variant = connection::same_sign_variant(test::classical_sl2(2));
  CHECK_THROWS_AS(singular::check_simple_singularity(variant, sum_and_difference(1), cutoffs(1, 1)),
                  InconclusiveError);
}

TEST_CASE("indicial exponents at z1 = z2 match the Casimir oracle") {
  auto conn = test::classical_sl2(2);
  auto res = singular::check_simple_singularity(conn, difference_and_infinity(1), cutoffs(10, 10));
  REQUIRE(res.verdict.holomorphic);
  auto ind = singular::indicial_data(res.system, 0);
  REQUIRE(ind.exponents.size() == 8);

  auto pair = pair_casimir_eigenvalues(1.0);
  // Twisted spin-1/2 slot doubles every multiplicity.
  std::vector<double> expected;
  for (double e : pair) expected.insert(expected.end(), {e, e});
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(ind.exponents[i] - cplx(expected[i])) < 1e-12);
  }
  // Singlet −1/2 and triplet 1/6, snapped exactly.
  REQUIRE(ind.exact[0].has_value());
  CHECK(*ind.exact[0] == Rational(-1, 2));
  REQUIRE(ind.exact[7].has_value());
  CHECK(*ind.exact[7] == Rational(1, 6));
  CHECK_FALSE(ind.resonant);
}

TEST_CASE("twisted N = 1 has the single exponent -1/3") {
  auto s = test::twisted_sl2(1, Rational(1, 2));
  auto cov = make_change(CMatrix::Identity(1, 1), CVector::Zero(1), {false}, 2);
  auto res = singular::check_simple_singularity(s.conn, cov, {Rational(8)});
  REQUIRE(res.verdict.holomorphic);
  auto ind = singular::indicial_data(res.system, 0);
  for (std::size_t i = 0; i < ind.exponents.size(); ++i) {
    CHECK(std::abs(ind.exponents[i] - cplx(-1.0 / 3.0)) < 1e-14);
    REQUIRE(ind.exact[i].has_value());
    CHECK(*ind.exact[i] == Rational(-1, 3));
  }
  CHECK(res.system.hypothesis() == "linear");
}

TEST_CASE("transformed system agrees with the connection pulled back") {
  // B_j(η) = s_j t ζ_j Σ_ℓ b_{jℓ} A_ℓ(z(η)), evaluated directly.
  auto s = test::twisted_sl2(2, Rational(1, 2));
  auto cov = sum_and_difference(2);
  auto ts = singular::transform_system(s.conn, cov, cutoffs(24, 24));
  for (auto eta : {std::vector<cplx>{cplx(0.05, 0.02), cplx(-0.03, 0.04)}, std::vector<cplx>{0.08, cplx(0, 0.06)}}) {
    auto z = cov.z_of_eta(eta);
    auto zeta = cov.zeta_of_eta(eta);
    auto a = s.conn.eval(z, rcalc::branch_at(cov, eta));
    auto b = ts.eval(eta);
    for (int j = 0; j < 2; ++j) {
      CMatrix direct = CMatrix::Zero(a[0].rows(), a[0].cols());
      for (int l = 0; l < 2; ++l) direct += cov.B(j, l) * a[l];
      direct *= static_cast<double>(cov.sign(j) * cov.t) * zeta[j];
      CHECK(test::rel_gap(b[j], direct) < 1e-8);
    }
  }
}

TEST_CASE("degenerate changes are reported as such") {
  auto conn = test::classical_sl2(2);
  CHECK_THROWS_AS(singular::check_simple_singularity(conn, identity_change(2, 1), cutoffs(4, 4)), DegenerateError);
}

TEST_CASE("indicial data of explicit matrices") {
  CMatrix h(2, 2);
  h << 0.0, 1.0, 0.0, 1.0;  // exponents 0 and 1
  auto d = singular::indicial_from_matrix(h);
  CHECK(d.resonant);
  CHECK(std::abs(d.exponents[0]) < 1e-15);
  CHECK(std::abs(d.exponents[1] - cplx(1.0)) < 1e-15);
  h << 0.0, 1.0, 0.0, 0.5;
  CHECK_FALSE(singular::indicial_from_matrix(h).resonant);
}

TEST_CASE("sections need holomorphic coefficients") {
  auto variant = connection::same_sign_variant(test::classical_sl2(2));
  auto ts = singular::transform_system(variant, sum_and_difference(1), cutoffs(8, 8));
  CHECK_THROWS_AS(singular::indicial_data(ts, 0), NumericError);
  auto good = singular::transform_system(test::classical_sl2(2), sum_and_difference(1), cutoffs(8, 8));
  auto sec = singular::section(good, 1, {0.1, 0.0});
  CHECK(sec.H.size() == 8);
}
