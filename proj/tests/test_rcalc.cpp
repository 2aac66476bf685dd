#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"
#include "tkz/change.hpp"
#include "tkz/errors.hpp"
#include "tkz/puiseux.hpp"

using namespace tkz;
using rcalc::RElement;
using Catch::Approx;

namespace {

CMatrix sum_difference_a() {
  CMatrix a(2, 2);
  a << 0.5, 0.5, 0.5, -0.5;
  return a;
}

CVector vec2(cplx a, cplx b) {
  CVector v(2);
  v << a, b;
  return v;
}

// Random element built from x_i^{±k/t}, (x_1 − x_2)^{±1} and constants.
RElement random_element(int t, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pw(-2 * t, 2 * t), df(-2, 1);
  std::normal_distribution<double> g;
  RElement f(2, t);
  for (int k = 0; k < 4; ++k) {
    RElement term = RElement::power(2, t, 0, Rational(pw(rng), t), cplx(g(rng), g(rng))) *
                    RElement::power(2, t, 1, Rational(pw(rng), t)) * RElement::difference(2, t, 0, 1, df(rng));
    f += term;
  }
  return f;
}

}  // namespace

TEST_CASE("ring identities hold exactly") {
  auto d = RElement::difference(2, 1, 0, 1, 1);
  auto inv = RElement::difference(2, 1, 0, 1, -1);
  CHECK(d * inv == RElement::constant(2, 1, 1.0));
  // (x_2 − x_1) = −(x_1 − x_2); squares agree.
  CHECK(RElement::difference(2, 1, 1, 0, 1) == -d);
  CHECK(RElement::difference(2, 1, 1, 0, 2) == RElement::difference(2, 1, 0, 1, 2));
  // Root exponents add: x^{1/2} x^{1/2} = x.
  auto half = RElement::power(1, 2, 0, Rational(1, 2));
  CHECK(half * half == RElement::power(1, 2, 0, Rational(1)));
  CHECK((half - half).is_zero());
  // Mixing root orders goes through the lcm.
  auto third = RElement::power(1, 3, 0, Rational(1, 3));
  CHECK((half * third).root_order() == 6);
  CHECK_THROWS_AS(RElement::power(1, 2, 0, Rational(1, 3)), ConfigError);
}

TEST_CASE("degrees") {
  auto f = RElement::power(2, 2, 0, Rational(1, 2)) * RElement::difference(2, 2, 0, 1, -1);
  REQUIRE(f.homogeneous_degree().has_value());
  CHECK(*f.homogeneous_degree() == Rational(-1, 2));
  auto g = f + RElement::constant(2, 2, 1.0);
  CHECK_FALSE(g.homogeneous_degree().has_value());
}

TEST_CASE("evaluation follows the l_p branches") {
  auto half = RElement::power(1, 2, 0, Rational(1, 2));
  CHECK(std::abs(rcalc::eval(half, {-1.0}, {0}) - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(rcalc::eval(half, {-1.0}, {1}) - cplx(0.0, -1.0)) < 1e-15);
  // Just below the positive axis the argument is close to 2π, not 0.
  const cplx z = std::polar(1.0, -1e-3);
  CHECK(std::abs(rcalc::eval(half, {z}, {0}) - std::polar(1.0, kPi - 0.5e-3)) < 1e-14);
  CHECK(std::abs(rcalc::eval(half, {z}, {-1}) - std::polar(1.0, -0.5e-3)) < 1e-14);
  // Poles and zero with fractional exponents are rejected.
  CHECK_THROWS_AS(rcalc::eval(RElement::difference(2, 1, 0, 1, -1), {1.0, 1.0}, {0, 0}), SingularPointError);
  CHECK_THROWS_AS(rcalc::eval(half, {0.0}, {0}), SingularPointError);
}

TEST_CASE("symbolic derivatives match finite differences") {
  std::mt19937_64 rng(3);
  for (int t : {1, 2, 3}) {
    for (int trial = 0; trial < 5; ++trial) {
      RElement f = random_element(t, rng);
      for (const auto& s : test::sample_points(2, 3, 100 + trial)) {
        for (int i = 0; i < 2; ++i) {
          // Five-point stencil along a direction that keeps the point on the same branch sheet.
          const double h = 1e-3 * std::abs(s.z[i]);
          auto at = [&](double k) {
            std::vector<cplx> z = s.z;
            std::vector<cplx> logs{branch_log(s.z[0], s.p[0]), branch_log(s.z[1], s.p[1])};
            z[i] += k * h * s.z[i] / std::abs(s.z[i]);
            logs[i] += std::log(z[i] / s.z[i]);
            return rcalc::eval_with_logs(f, z, logs);
          };
          const cplx fd = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h) / (s.z[i] / std::abs(s.z[i]));
          const cplx sym = rcalc::eval(rcalc::differentiate(f, i), s.z, s.p);
          CHECK(std::abs(fd - sym) < 1e-7 * std::max(1.0, std::abs(sym)));
        }
      }
    }
  }
}

TEST_CASE("iota expansion converges in the ordered region") {
  auto f = RElement::difference(2, 1, 0, 1, -1) * RElement::power(2, 1, 1, Rational(1));
  auto s = rcalc::iota_expand(f, {Rational(40), Rational(40)});
  const std::vector<cplx> z{cplx(2.0, 0.5), cplx(0.3, -0.4)};
  const cplx exact = z[1] / (z[0] - z[1]);
  CHECK(std::abs(s.eval(z, {0, 0}) - exact) < 1e-12);
  // Coefficient of x_1^{-3} x_2^{3}: binom(-1, 2) = 1.
  rcalc::SeriesKey key{{-3, 3}, {0, 0}};
  REQUIRE(s.terms().count(key) == 1);
  CHECK(std::abs(s.terms().at(key) - cplx(1.0)) < 1e-15);
}

TEST_CASE("series products track their exact box") {
  // 1/(1 − η) to η^4, times η^{-1}.
  rcalc::PuiseuxSeries geo(1, 1, {5}, {0});
  for (int k = 0; k < 5; ++k) geo.add_term({{k}, {0}}, 1.0);
  auto mono = rcalc::PuiseuxSeries::monomial(1, 1, {-1}, 1.0);
  auto prod = geo * mono;
  CHECK(prod.cutoffs()[0] == 4);
  CHECK(prod.lower()[0] == -1);
  CHECK(prod.terms().size() == 5);
  auto sq = geo * geo;
  CHECK(sq.cutoffs()[0] == 5);
  // (1/(1−η))^2 = Σ (k+1) η^k.
  for (int k = 0; k < 5; ++k) CHECK(std::abs(sq.terms().at({{k}, {0}}) - cplx(k + 1.0)) < 1e-15);
}

TEST_CASE("binomial coefficients of rational exponents") {
  CHECK(rcalc::binomial(Rational(1, 2), 0) == Approx(1.0));
  CHECK(rcalc::binomial(Rational(1, 2), 2) == Approx(-0.125));
  CHECK(rcalc::binomial(Rational(-1), 5) == Approx(-1.0));
  CHECK(rcalc::binomial(Rational(3), 4) == Approx(0.0));
}

TEST_CASE("composition of a square root through a shifted change") {
  // z = η^2 + 1, so z^{1/2} = Σ binom(1/2, k) η^{2k}.
  CMatrix a = CMatrix::Identity(1, 1);
  CVector beta = CVector::Constant(1, 1.0);
  auto cov = make_change(a, beta, {false}, 2);
  CHECK(std::abs(cov.gamma(0) - cplx(1.0)) < 1e-15);
  auto f = RElement::power(1, 2, 0, Rational(1, 2));
  auto s = rcalc::compose_change(f, cov, {Rational(20)});
  for (int k = 0; k < 10; ++k) {
    double c = 1.0;
    for (int m = 0; m < k; ++m) c *= (0.5 - m) / (m + 1.0);
    const rcalc::SeriesKey key{{2 * k * s.den()}, {0}};
    REQUIRE(s.terms().count(key) == 1);
    CHECK(std::abs(s.terms().at(key) - cplx(c)) < 1e-14);
  }
}

TEST_CASE("identity change on one variable") {
  auto cov = identity_change(1, 2);
  auto f = RElement::power(1, 2, 0, Rational(1, 2), cplx(3.0, 0.0));
  auto s = rcalc::compose_change(f, cov, {Rational(10)});
  REQUIRE(s.terms().size() == 1);
  const auto& [key, c] = *s.terms().begin();
  CHECK(Rational(key.exps[0], s.den()) == Rational(1));
  CHECK(std::abs(c - cplx(3.0)) < 1e-15);
}

TEST_CASE("composed series agree with direct evaluation") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t : {1, 2}) {
    auto cov = make_change(sum_difference_a(), vec2(1.0, 0.0), {false, false}, t);
    CHECK(cov.affine());
    for (int trial = 0; trial < 6; ++trial) {
      RElement f = random_element(t, rng);
      auto s = rcalc::compose_change(f, cov, {Rational(30), Rational(30)});
      for (int k = 0; k < 4; ++k) {
        std::vector<cplx> eta{0.1 * cplx(u(rng), u(rng)), 0.1 * cplx(u(rng), u(rng))};
        auto p = rcalc::branch_at(cov, eta);
        const cplx direct = rcalc::eval(f, cov.z_of_eta(eta), p);
        const cplx series = s.eval(eta, {0, 0});
        CHECK(std::abs(series - direct) < 1e-9 * std::max(1.0, std::abs(direct)));
      }
    }
  }
}

TEST_CASE("changes without a dominant monomial are degenerate") {
  auto cov = identity_change(2, 1);
  auto f = RElement::difference(2, 1, 0, 1, -1);
  try {
    rcalc::compose_change(f, cov, {Rational(4), Rational(4)});
    FAIL("expected a degenerate-change error");
  } catch (const DegenerateError& e) {
    CHECK(std::string(e.what()).find("not component-isolated") != std::string::npos);
  }
  // The same factor is fine once z_2 is sent to infinity.
  CMatrix a(2, 2);
  a << 1, 0, -1, 1;
  auto inf = make_change(a, CVector::Zero(2), {false, true}, 1);
  CHECK_NOTHROW(rcalc::compose_change(f, inf, {Rational(4), Rational(4)}));
  CHECK_FALSE(inf.affine());
}

TEST_CASE("singular change matrices are rejected") {
  CMatrix a(2, 2);
  a << 1, 1, 1, 1;
  CHECK_THROWS_AS(make_change(a, CVector::Zero(2), {false, false}, 1), ConfigError);
}
