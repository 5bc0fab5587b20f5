#pragma once

#include <cstddef>
#include <vector>

#include "mbep/exact.hpp"

namespace mbep {

// Polynomial in the rate parameter Gamma with exact complex-rational coefficients.
class RatePolynomial {
 public:
  RatePolynomial() = default;
  RatePolynomial(ExactComplex constant);               // NOLINT: implicit by design
  RatePolynomial(std::vector<ExactComplex> ascending);  // c[d] multiplies Gamma^d

  static RatePolynomial monomial(ExactComplex c, std::size_t degree);
  static RatePolynomial gamma() { return monomial(ExactComplex(1), 1); }

  bool is_zero() const { return c_.empty(); }
  // -1 for the zero polynomial
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  // Lowest power with a nonzero coefficient; the zero polynomial has none.
  std::size_t valuation() const;
  ExactComplex coefficient(std::size_t d) const;
  const std::vector<ExactComplex>& coefficients() const { return c_; }
  Complex evaluate(double gamma) const;

  RatePolynomial& operator+=(const RatePolynomial& o);
  RatePolynomial& operator-=(const RatePolynomial& o);
  friend RatePolynomial operator+(RatePolynomial a, const RatePolynomial& b) { return a += b; }
  friend RatePolynomial operator-(RatePolynomial a, const RatePolynomial& b) { return a -= b; }
  friend RatePolynomial operator-(const RatePolynomial& a) { return RatePolynomial() - a; }
  friend RatePolynomial operator*(const RatePolynomial& a, const RatePolynomial& b);
  friend bool operator==(const RatePolynomial& a, const RatePolynomial& b) { return a.c_ == b.c_; }

 private:
  void trim();
  std::vector<ExactComplex> c_;
};

// Monic polynomial in lambda whose coefficients are rate polynomials:
// p(lambda) = sum_k a_k(Gamma) lambda^(n-k), a_0 = 1.
class GammaPolynomial {
 public:
  GammaPolynomial() : a_{RatePolynomial(ExactComplex(1))} {}
  explicit GammaPolynomial(std::vector<RatePolynomial> descending);

  std::size_t degree() const { return a_.size() - 1; }
  const RatePolynomial& a(std::size_t k) const { return a_.at(k); }
  const std::vector<RatePolynomial>& coefficients() const { return a_; }

  // Numeric lambda-coefficients at a given Gamma, leading first.
  std::vector<Complex> evaluate(double gamma) const;
  std::vector<Complex> roots(double gamma) const;

  friend GammaPolynomial operator*(const GammaPolynomial& p, const GammaPolynomial& q);
  friend bool operator==(const GammaPolynomial& p, const GammaPolynomial& q) { return p.a_ == q.a_; }

 private:
  std::vector<RatePolynomial> a_;
};

// q(mu) = p(mu + center): the same polynomial in mu = lambda - center.
GammaPolynomial recenter(const GammaPolynomial& p, const ExactComplex& center);

struct PolynomialDivision {
  GammaPolynomial quotient;
  std::vector<RatePolynomial> remainder;  // leading first, degree < divisor degree
  bool exact() const;
};

// Long division by a monic divisor; exact over rate polynomials.
PolynomialDivision divide(const GammaPolynomial& p, const GammaPolynomial& divisor);

}  // namespace mbep
