#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "tkz/errors.hpp"
#include "tkz/frobenius.hpp"

using namespace tkz;
using namespace tkz::frobenius;

namespace {

// (a)_m (b)_m / ((c)_m m!) by the ratio recursion.
std::vector<cplx> gauss_coefficients(cplx a, cplx b, cplx c, int count) {
  std::vector<cplx> out{1.0};
  for (int m = 0; m + 1 < count; ++m) out.push_back(out.back() * (a + double(m)) * (b + double(m)) / ((c + double(m)) * double(m + 1)));
  return out;
}

}  // namespace

TEST_CASE("Gauss series coefficients") {
  FrobeniusOptions opt;
  opt.order = 40;
  opt.coefficient_radius = 1.0;
  for (auto [a, b, c] : {std::tuple<double, double, double>{0.5, 0.5, 1.0}, {0.3, 1.2, 0.5}, {1.0, 2.0, 2.5}}) {
    auto sol = frobenius_fundamental(hypergeometric_companion(a, b, c, 41), opt);
    auto ref = gauss_coefficients(a, b, c, 11);
    for (int m = 0; m <= 10; ++m) CHECK(std::abs(sol.S[m](0, 0) - ref[m]) < 1e-10);
  }
}

TEST_CASE("Gauss equation with c = 1/2 has exponents 0 and 1/2") {
  auto sol = frobenius_fundamental(hypergeometric_companion(0.3, 1.2, 0.5, 41));
  CHECK_FALSE(sol.resonant);
  Eigen::ComplexEigenSolver<CMatrix> es(sol.Lambda);
  std::vector<double> ev{es.eigenvalues()(0).real(), es.eigenvalues()(1).real()};
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == 0.0);
  CHECK(ev[1] == 0.5);
}

TEST_CASE("resonant exponents are handled by an integer shift") {
  // c = −1: exponents 0 and 2; c = 2: exponents 0 and −1; c = 1: double exponent 0.
  for (double c : {-1.0, 2.0, 1.0}) {
    FrobeniusOptions opt;
    opt.coefficient_radius = 1.0;
    auto sol = frobenius_fundamental(hypergeometric_companion(0.4, 0.7, c, 41), opt);
    if (c != 1.0) CHECK(sol.resonant);
    CHECK(sol.log_depth >= 1);
    for (cplx eta : {cplx(0.1, 0.05), cplx(-0.2, 0.1), cplx(0.05, -0.3)}) {
      CHECK(differential_residual(sol, hypergeometric_companion(0.4, 0.7, c, 41), eta) < 1e-10);
      CHECK(differential_residual(sol, hypergeometric_companion(0.4, 0.7, c, 41), eta, 1) < 1e-10);
    }
    CHECK(std::abs(sol.s0_det) > 1e-12);
  }
}

TEST_CASE("constant coefficients give the matrix exponential") {
  CMatrix h(3, 3);
  h << 0.1, 0.3, 0.0, -0.2, 0.4, 0.1, 0.0, 0.5, -0.3;
  auto sol = frobenius_fundamental({h});
  for (cplx eta : {cplx(0.5, 0.2), cplx(-1.5, 0.1), cplx(3.0, -2.0)}) {
    auto ev = eval_solution(sol, eta, 0);
    CHECK(max_abs(ev.value - matrix_exp(h * branch_log(eta, 0))) < 1e-12);
    CHECK_FALSE(ev.outside_disc);
  }
}

TEST_CASE("branches differ by the formal monodromy") {
  for (double c : {0.5, 2.0, 1.0}) {
    auto sol = frobenius_fundamental(hypergeometric_companion(0.25, 0.6, c, 41));
    const CMatrix mono = matrix_exp(2.0 * kPi * cplx(0.0, 1.0) * sol.Lambda);
    for (cplx eta : {cplx(0.2, 0.1), cplx(-0.3, -0.05)}) {
      for (int p : {-1, 0, 1}) {
        auto lo = eval_solution(sol, eta, p).value;
        auto hi = eval_solution(sol, eta, p + 1).value;
        CHECK(test::rel_gap(hi, lo * mono) < 1e-9);
      }
    }
  }
}

TEST_CASE("radius estimate") {
  auto sol = frobenius_fundamental(hypergeometric_companion(0.5, 0.5, 1.0, 41));
  CHECK(std::abs(sol.radius - 1.0) < 0.1);
  FrobeniusOptions small;
  small.order = 5;
  auto short_sol = frobenius_fundamental(hypergeometric_companion(0.5, 0.5, 1.0, 6), small);
  CHECK_THROWS_AS(radius_estimate(short_sol, 1.0), ConfigError);
  CHECK(eval_solution(sol, 1.2, 0).outside_disc);
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(frobenius_fundamental({}), ConfigError);
  CHECK_THROWS_AS(frobenius_fundamental({CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}), ConfigError);
  // Exponent gap 10 needs at least order 10.
  CMatrix h = CMatrix::Zero(2, 2);
  h(1, 1) = 10.0;
  FrobeniusOptions opt;
  opt.order = 5;
  CHECK_THROWS_AS(frobenius_fundamental({h, CMatrix::Constant(2, 2, 0.1)}, opt), ConfigError);
  CHECK_THROWS_AS(eval_solution(frobenius_fundamental({h}), 0.0, 0), SingularPointError);
}
