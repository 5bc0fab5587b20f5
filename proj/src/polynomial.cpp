#include "mbep/polynomial.hpp"

#include <algorithm>

#include "mbep/errors.hpp"

namespace mbep {

RatePolynomial::RatePolynomial(ExactComplex constant) : c_{std::move(constant)} { trim(); }

RatePolynomial::RatePolynomial(std::vector<ExactComplex> ascending) : c_(std::move(ascending)) { trim(); }

RatePolynomial RatePolynomial::monomial(ExactComplex c, std::size_t degree) {
  std::vector<ExactComplex> v(degree + 1);
  v[degree] = std::move(c);
  return RatePolynomial(std::move(v));
}

void RatePolynomial::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

std::size_t RatePolynomial::valuation() const {
  if (is_zero()) throw NumericError("valuation of the zero polynomial");
  std::size_t d = 0;
  while (c_[d].is_zero()) ++d;
  return d;
}

ExactComplex RatePolynomial::coefficient(std::size_t d) const { return d < c_.size() ? c_[d] : ExactComplex(); }

Complex RatePolynomial::evaluate(double gamma) const {
  Complex acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * gamma + it->to_complex();
  return acc;
}

RatePolynomial& RatePolynomial::operator+=(const RatePolynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t d = 0; d < o.c_.size(); ++d) c_[d] += o.c_[d];
  trim();
  return *this;
}

RatePolynomial& RatePolynomial::operator-=(const RatePolynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t d = 0; d < o.c_.size(); ++d) c_[d] -= o.c_[d];
  trim();
  return *this;
}

RatePolynomial operator*(const RatePolynomial& a, const RatePolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<ExactComplex> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j)
      if (!b.c_[j].is_zero()) out[i + j] += a.c_[i] * b.c_[j];
  }
  return RatePolynomial(std::move(out));
}

GammaPolynomial::GammaPolynomial(std::vector<RatePolynomial> descending) : a_(std::move(descending)) {
  if (a_.empty() || !(a_[0] == RatePolynomial(ExactComplex(1))))
    throw ConfigError("GammaPolynomial: leading lambda coefficient must be the constant 1");
}

std::vector<Complex> GammaPolynomial::evaluate(double gamma) const {
  std::vector<Complex> out;
  out.reserve(a_.size());
  for (const auto& c : a_) out.push_back(c.evaluate(gamma));
  return out;
}

std::vector<Complex> GammaPolynomial::roots(double gamma) const { return polynomial_roots(evaluate(gamma)); }

GammaPolynomial operator*(const GammaPolynomial& p, const GammaPolynomial& q) {
  std::vector<RatePolynomial> out(p.a_.size() + q.a_.size() - 1);
  for (std::size_t i = 0; i < p.a_.size(); ++i)
    for (std::size_t j = 0; j < q.a_.size(); ++j) out[i + j] += p.a_[i] * q.a_[j];
  return GammaPolynomial(std::move(out));
}

GammaPolynomial recenter(const GammaPolynomial& p, const ExactComplex& center) {
  // Horner in (mu + center), ascending powers of mu.
  std::vector<RatePolynomial> q{p.a(0)};
  const RatePolynomial c(center);
  for (std::size_t k = 1; k <= p.degree(); ++k) {
    std::vector<RatePolynomial> next(q.size() + 1);
    for (std::size_t j = 0; j < q.size(); ++j) {
      next[j + 1] += q[j];
      next[j] += c * q[j];
    }
    next[0] += p.a(k);
    q = std::move(next);
  }
  std::reverse(q.begin(), q.end());
  return GammaPolynomial(std::move(q));
}

bool PolynomialDivision::exact() const {
  return std::all_of(remainder.begin(), remainder.end(), [](const RatePolynomial& r) { return r.is_zero(); });
}

PolynomialDivision divide(const GammaPolynomial& p, const GammaPolynomial& divisor) {
  const std::size_t n = p.degree();
  const std::size_t m = divisor.degree();
  if (m > n) throw ConfigError("divide: divisor degree exceeds dividend degree");
  std::vector<RatePolynomial> work = p.coefficients();
  std::vector<RatePolynomial> quotient(n - m + 1);
  for (std::size_t k = 0; k + m <= n; ++k) {
    quotient[k] = work[k];
    if (quotient[k].is_zero()) continue;
    for (std::size_t j = 0; j <= m; ++j) work[k + j] -= quotient[k] * divisor.a(j);
  }
  std::vector<RatePolynomial> remainder(work.begin() + static_cast<std::ptrdiff_t>(n - m + 1), work.end());
  return {GammaPolynomial(std::move(quotient)), std::move(remainder)};
}

}  // namespace mbep
