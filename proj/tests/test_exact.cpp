#include <doctest.h>

#include "mbep/errors.hpp"
#include "mbep/exact.hpp"
#include "mbep/polynomial.hpp"

using namespace mbep;

TEST_CASE("decimal_rational recovers the written decimal") {
  CHECK(decimal_rational(0.175) == Rational(7, 40));
  CHECK(decimal_rational(-0.55) == Rational(-11, 20));
  CHECK(decimal_rational(0.0) == Rational(0));
  CHECK(decimal_rational(1e-5) == Rational(1, 100000));
}

TEST_CASE("parse_rational accepts fractions, decimals and exponents") {
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK(parse_rational("0.175") == Rational(7, 40));
  CHECK(parse_rational("1e-5") == Rational(1, 100000));
  CHECK(parse_rational("2.5E2") == Rational(250));
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
  CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
}

TEST_CASE("lift is lossless") {
  ComplexMatrix m(1, 2);
  m << Complex(0.1, -0.3), Complex(1e-300, 7);
  const ExactComplexMatrix e = lift(m);
  CHECK(e.to_numeric() == m);
  CHECK(e(0, 0).re == Rational(0.1));
}

TEST_CASE("gaussian arithmetic") {
  const ExactComplex a(Rational(1, 2), 3), b(-2, Rational(1, 3));
  const ExactComplex q = a / b;
  CHECK(q * b == a);
  CHECK((a * a.conj()).im == 0);
  CHECK((a * a.conj()).re == a.norm2());
}

TEST_CASE("exact rank of structured matrices") {
  ExactComplexMatrix m(3, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 2;
  m(1, 1) = 4;  // row 1 = 2 * row 0
  m(2, 2) = ExactComplex(0, 1);
  CHECK(exact_rank(m) == 2);
  CHECK(exact_rank(ExactComplexMatrix::identity(4)) == 4);
  CHECK(exact_rank(ExactComplexMatrix::zero(2, 3)) == 0);
  // rank(A (x) B) = rank A rank B
  CHECK(exact_rank(exact_kron_product(m, m)) == 4);
}

TEST_CASE("rate polynomial algebra") {
  const RatePolynomial g = RatePolynomial::gamma();
  const RatePolynomial p = (g + ExactComplex(1)) * (g - ExactComplex(1));
  CHECK(p.degree() == 2);
  CHECK(p.coefficient(0) == ExactComplex(-1));
  CHECK(p.coefficient(1).is_zero());
  CHECK((g * g).valuation() == 2);
  CHECK(p.evaluate(3.0) == Complex(8.0));
}

TEST_CASE("gamma polynomial division and recentring") {
  const RatePolynomial g = RatePolynomial::gamma();
  // (lambda - Gamma)(lambda + 1) = lambda^2 + (1 - Gamma) lambda - Gamma
  const GammaPolynomial a({ExactComplex(1), -g});
  const GammaPolynomial b({ExactComplex(1), ExactComplex(1)});
  const GammaPolynomial p = a * b;
  const PolynomialDivision d = divide(p, b);
  CHECK(d.exact());
  CHECK(d.quotient == a);
  CHECK_FALSE(divide(p, GammaPolynomial({ExactComplex(1), ExactComplex(2)})).exact());
  // p(mu - 1) has a root at mu = 0 for every Gamma
  const GammaPolynomial q = recenter(p, ExactComplex(-1));
  CHECK(q.a(2).is_zero());
}
