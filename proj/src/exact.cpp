#include "mbep/exact.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>
#include <utility>

#include "mbep/errors.hpp"

namespace mbep {

ExactComplex& ExactComplex::operator+=(const ExactComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ExactComplex& ExactComplex::operator-=(const ExactComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ExactComplex& ExactComplex::operator*=(const ExactComplex& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

ExactComplex& ExactComplex::operator/=(const ExactComplex& o) {
  const Rational d = o.norm2();
  if (sgn(d) == 0) throw NumericError("exact division by zero");
  Rational r = (re * o.re + im * o.im) / d;
  Rational i = (im * o.re - re * o.im) / d;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

std::string to_string(const ExactComplex& z) {
  std::ostringstream os;
  os << z.re.get_str() << (sgn(z.im) < 0 ? " - " : " + ") << Rational(abs(z.im)).get_str() << "i";
  return os.str();
}

ExactComplexMatrix ExactComplexMatrix::identity(std::size_t n) {
  ExactComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) out(k, k) = ExactComplex(1);
  return out;
}

ExactComplexMatrix ExactComplexMatrix::adjoint() const {
  ExactComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c).conj();
  return out;
}

ExactComplexMatrix ExactComplexMatrix::transpose() const {
  ExactComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

ExactComplexMatrix ExactComplexMatrix::conjugate() const {
  ExactComplexMatrix out = *this;
  for (auto& z : out.data_) z.im = -z.im;
  return out;
}

ExactComplexMatrix ExactComplexMatrix::col(std::size_t c) const {
  ExactComplexMatrix out(rows_, 1);
  for (std::size_t r = 0; r < rows_; ++r) out(r, 0) = (*this)(r, c);
  return out;
}

bool ExactComplexMatrix::is_zero() const {
  for (const auto& z : data_)
    if (!z.is_zero()) return false;
  return true;
}

ExactComplexMatrix& ExactComplexMatrix::operator+=(const ExactComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ConfigError("exact matrix sum: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ExactComplexMatrix& ExactComplexMatrix::operator-=(const ExactComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ConfigError("exact matrix difference: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ExactComplexMatrix operator*(const ExactComplexMatrix& a, const ExactComplexMatrix& b) {
  if (a.cols_ != b.rows_) throw ConfigError("exact matrix product: shape mismatch");
  ExactComplexMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const ExactComplex& aik = a(i, k);
      if (aik.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        const ExactComplex& bkj = b(k, j);
        if (!bkj.is_zero()) out(i, j) += aik * bkj;
      }
    }
  return out;
}

ExactComplexMatrix operator*(const ExactComplex& s, ExactComplexMatrix a) {
  for (auto& z : a.data_) z *= s;
  return a;
}

ComplexMatrix ExactComplexMatrix::to_numeric() const {
  ComplexMatrix out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*this)(r, c).to_complex();
  return out;
}

ExactComplexMatrix exact_kron_product(const ExactComplexMatrix& a, const ExactComplexMatrix& b) {
  ExactComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return out;
}

ExactComplexMatrix exact_kron_sum(const ExactComplexMatrix& a, const ExactComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) throw ConfigError("exact_kron_sum: matrices must be square");
  return exact_kron_product(a, ExactComplexMatrix::identity(b.rows())) +
         exact_kron_product(ExactComplexMatrix::identity(a.rows()), b);
}

ExactComplexMatrix lift(const ComplexMatrix& m) {
  if (!all_finite(m)) throw ConfigError("lift: non-finite entry");
  ExactComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          ExactComplex(Rational(m(r, c).real()), Rational(m(r, c).imag()));
  return out;
}

namespace {

struct GaussInt {
  Integer re;
  Integer im;
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

GaussInt mul(const GaussInt& a, const GaussInt& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

GaussInt sub(const GaussInt& a, const GaussInt& b) { return {a.re - b.re, a.im - b.im}; }

// a / b where b is known to divide a in Z[i].
GaussInt divexact(const GaussInt& a, const GaussInt& b) {
  const Integer n = b.re * b.re + b.im * b.im;
  Integer re = a.re * b.re + a.im * b.im;
  Integer im = a.im * b.re - a.re * b.im;
  mpz_divexact(re.get_mpz_t(), re.get_mpz_t(), n.get_mpz_t());
  mpz_divexact(im.get_mpz_t(), im.get_mpz_t(), n.get_mpz_t());
  return {std::move(re), std::move(im)};
}

}  // namespace

std::size_t exact_rank(const ExactComplexMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  // Clear denominators row by row; row scaling leaves the rank unchanged.
  std::vector<std::vector<GaussInt>> a(rows, std::vector<GaussInt>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    Integer l = 1;
    for (std::size_t c = 0; c < cols; ++c) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).re.get_den_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).im.get_den_mpz_t());
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const Rational re = m(r, c).re * l;
      const Rational im = m(r, c).im * l;
      a[r][c] = {re.get_num(), im.get_num()};
    }
  }

  GaussInt prev{1, 0};
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    const GaussInt& piv = a[rank][c];
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j)
        a[i][j] = divexact(sub(mul(piv, a[i][j]), mul(a[i][c], a[rank][j])), prev);
      a[i][c] = {0, 0};
    }
    prev = a[rank][c];
    ++rank;
  }
  return rank;
}

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational { throw ConfigError("cannot parse rational number '" + std::string(text) + "'"); };
  if (text.empty()) return fail();
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (sgn(den) == 0) return fail();
    return Rational(num / den);
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (ch >= '0' && ch <= '9') {
      digits.push_back(ch);
      if (seen_point) ++frac_digits;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (digits.empty()) return fail();
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') return fail();
    ++pos;
    const auto* first = text.data() + pos;
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr != last) return fail();
  }
  const long shift = exponent - frac_digits;
  Integer num(digits, 10);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational out = shift < 0 ? Rational(num, scale) : Rational(num * scale);
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

Rational decimal_rational(double x) {
  if (!std::isfinite(x)) throw ConfigError("decimal_rational: non-finite value");
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw NumericError("decimal_rational: formatting failed");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

}  // namespace mbep
