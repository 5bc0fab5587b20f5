#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "mbep/linalg.hpp"

namespace mbep {

using Rational = mpq_class;
using Integer = mpz_class;

struct ExactComplex {
  Rational re;
  Rational im;

  ExactComplex() = default;
  ExactComplex(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) { re.canonicalize(); im.canonicalize(); }
  ExactComplex(long r) : re(r), im(0) {}

  static ExactComplex i_unit() { return ExactComplex(0, 1); }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  ExactComplex conj() const { return ExactComplex(re, -im); }
  Rational norm2() const { return re * re + im * im; }
  Complex to_complex() const { return {re.get_d(), im.get_d()}; }

  ExactComplex& operator+=(const ExactComplex& o);
  ExactComplex& operator-=(const ExactComplex& o);
  ExactComplex& operator*=(const ExactComplex& o);
  ExactComplex& operator/=(const ExactComplex& o);
  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  friend ExactComplex operator-(const ExactComplex& a) { return ExactComplex(-a.re, -a.im); }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }
};

std::string to_string(const ExactComplex& z);

class ExactComplexMatrix {
 public:
  ExactComplexMatrix() = default;
  ExactComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ExactComplexMatrix identity(std::size_t n);
  static ExactComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  ExactComplex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const ExactComplex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ExactComplexMatrix adjoint() const;
  ExactComplexMatrix transpose() const;
  ExactComplexMatrix conjugate() const;
  ExactComplexMatrix col(std::size_t c) const;
  bool is_zero() const;

  ExactComplexMatrix& operator+=(const ExactComplexMatrix& o);
  ExactComplexMatrix& operator-=(const ExactComplexMatrix& o);
  friend ExactComplexMatrix operator+(ExactComplexMatrix a, const ExactComplexMatrix& b) { return a += b; }
  friend ExactComplexMatrix operator-(ExactComplexMatrix a, const ExactComplexMatrix& b) { return a -= b; }
  friend ExactComplexMatrix operator*(const ExactComplexMatrix& a, const ExactComplexMatrix& b);
  friend ExactComplexMatrix operator*(const ExactComplex& s, ExactComplexMatrix a);
  friend bool operator==(const ExactComplexMatrix& a, const ExactComplexMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  // Nearest double per entry; exact entries beyond double range become inf.
  ComplexMatrix to_numeric() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<ExactComplex> data_;
};

ExactComplexMatrix exact_kron_product(const ExactComplexMatrix& a, const ExactComplexMatrix& b);
ExactComplexMatrix exact_kron_sum(const ExactComplexMatrix& a, const ExactComplexMatrix& b);

// Every finite double is a dyadic rational, so this is lossless.
ExactComplexMatrix lift(const ComplexMatrix& m);

// Fraction-free elimination over the Gaussian integers.
std::size_t exact_rank(const ExactComplexMatrix& m);

// "0.175", "-3/4", "1e-5" -> exact rational. Throws ConfigError on junk.
Rational parse_rational(std::string_view text);

// Rational with the shortest decimal expansion that round-trips to x,
// e.g. 0.175 -> 7/40 rather than the dyadic neighbour of 0.175.
Rational decimal_rational(double x);

}  // namespace mbep
