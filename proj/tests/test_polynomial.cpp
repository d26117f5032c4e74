#include "hypogeo/polynomial.hpp"
#include "hypogeo/symcalc.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace hypogeo;

namespace {

Polynomial x_of(int dim, int var) { return Polynomial::variable(dim, var); }

}  // namespace

TEST_CASE("polynomial basic arithmetic is exact") {
  const auto x = x_of(2, 0);
  const auto y = x_of(2, 1);

  auto p = x * x + Rational(2) * x * y + y * y;  // (x+y)^2
  auto q = (x + y) * (x + y);
  CHECK(p == q);
  CHECK(p.degree() == 2);
  CHECK(p.term_count() == 3);

  auto zero = p - q;
  CHECK(zero.is_zero());
  CHECK(zero.degree() == -1);

  // rational coefficients stay exact: (x/3 + y/3) * 3 == x + y
  auto third = (x * Rational(1, 3) + y * Rational(1, 3)) * Rational(3);
  CHECK(third == x + y);
}

TEST_CASE("polynomial derivative and evaluation") {
  const auto x = x_of(2, 0);
  const auto y = x_of(2, 1);
  auto p = x * x * y + y * y * y * Rational(4);  // x^2 y + 4 y^3

  CHECK(p.derivative(0) == Rational(2) * x * y);
  CHECK(p.derivative(1) == x * x + Rational(12) * y * y);

  const double v = p.evaluate_at(std::vector<double>{2.0, 3.0});
  CHECK(v == Catch::Approx(4.0 * 3.0 + 4.0 * 27.0));

  // exact rational evaluation
  std::vector<Rational> pt{Rational(1, 2), Rational(1, 3)};
  Rational r = p.evaluate<Rational>(pt);
  CHECK(r == Rational(1, 12) + Rational(4, 27));
}

TEST_CASE("graded-lex canonical form drops zero terms") {
  const auto x = x_of(3, 0);
  const auto z = x_of(3, 2);
  auto p = x * z - z * x;
  CHECK(p.is_zero());

  auto q = Polynomial::constant(3, Rational(0));
  CHECK(q.is_zero());
  CHECK(q.term_count() == 0);
}

TEST_CASE("integer kernel round-trips with denominator clearing") {
  const auto x = x_of(2, 0);
  auto p = x * Rational(3, 4) + Polynomial::constant(2, Rational(5, 6));
  const BigInt l = denominator_lcm(p);
  CHECK(l == 12);
  auto z = to_integer(p, l);
  auto back = to_rational(z);
  back.divide_coefficients(Rational(l));
  CHECK(back == p);
}

TEST_CASE("random polynomial generator is deterministic and in-degree") {
  SampleStream s1(42), s2(42);
  for (int i = 0; i < 10; ++i) {
    auto a = s1.random_polynomial(3, 4);
    auto b = s2.random_polynomial(3, 4);
    REQUIRE(a == b);
    CHECK(a.degree() <= 4);
    CHECK(!a.is_zero());
  }
}

TEST_CASE("polynomial product Leibniz consistency under derivative") {
  SampleStream s(7);
  for (int i = 0; i < 20; ++i) {
    auto p = s.random_polynomial(2, 3);
    auto q = s.random_polynomial(2, 3);
    auto lhs = (p * q).derivative(0);
    auto rhs = p.derivative(0) * q + p * q.derivative(0);
    REQUIRE(lhs == rhs);
  }
}
