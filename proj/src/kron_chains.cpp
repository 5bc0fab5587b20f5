#include <algorithm>

#include "mbep/errors.hpp"
#include "mbep/jordan.hpp"

namespace mbep {

namespace {

Integer factorial(std::size_t k) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(k));
  return out;
}

Integer binomial(std::size_t n, std::size_t k) {
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

// L_-(v_i (x) w_j) = v_{i-1} (x) w_j + v_i (x) w_{j-1}, with v_0 = w_0 = 0.
CoefficientTable lower(const CoefficientTable& c) {
  const std::size_t m = c.size();
  const std::size_t n = m ? c[0].size() : 0;
  CoefficientTable out(m, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i + 1 < m) out[i][j] += c[i + 1][j];
      if (j + 1 < n) out[i][j] += c[i][j + 1];
    }
  return out;
}

template <class Vec, class Kron, class Scale>
std::vector<std::vector<Vec>> materialize(const std::vector<Vec>& v, const std::vector<Vec>& w, Kron kron, Scale scale,
                                          const Vec& zero) {
  std::vector<std::vector<Vec>> chains;
  for (const auto& chain : kron_chain_coefficients(v.size(), w.size())) {
    std::vector<Vec> out;
    for (const auto& table : chain) {
      Vec acc = zero;
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
          if (sgn(table[i][j]) != 0) acc += scale(table[i][j], kron(v[i], w[j]));
      out.push_back(std::move(acc));
    }
    chains.push_back(std::move(out));
  }
  return chains;
}

}  // namespace

std::vector<std::vector<CoefficientTable>> kron_chain_coefficients(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw ConfigError("kron_chain_coefficients: chain lengths must be >= 1");
  std::vector<std::vector<CoefficientTable>> out;
  for (std::size_t u = 1; u <= std::min(m, n); ++u) {
    const std::size_t length = m + n + 1 - 2 * u;
    CoefficientTable top(m, std::vector<Integer>(n, 0));
    for (std::size_t i = 0; i < u; ++i) {
      Integer c = binomial(u - 1, i) * (factorial(m - 1 - i) / factorial(m - u)) *
                  (factorial(n - u + i) / factorial(n - u));
      if (i % 2 == 1) c = -c;
      // v_{m-i} (x) w_{n-u+1+i}, shifted to 0-based indices
      top[m - 1 - i][n - u + i] += c;
    }
    std::vector<CoefficientTable> chain(length);
    chain[length - 1] = std::move(top);
    for (std::size_t g = length - 1; g >= 1; --g) chain[g - 1] = lower(chain[g]);
    out.push_back(std::move(chain));
  }
  return out;
}

JordanChainSet kron_sum_jordan_basis(const JordanChainSet& a, const JordanChainSet& b) {
  JordanChainSet out;
  out.eigenvalue = a.eigenvalue + b.eigenvalue;
  for (const auto& va : a.chains)
    for (const auto& wb : b.chains) {
      if (va.empty() || wb.empty()) throw ConfigError("kron_sum_jordan_basis: empty chain");
      for (const auto& v : va)
        if (v.size() != va[0].size()) throw ConfigError("kron_sum_jordan_basis: inconsistent vector lengths");
      for (const auto& w : wb)
        if (w.size() != wb[0].size()) throw ConfigError("kron_sum_jordan_basis: inconsistent vector lengths");
      const ComplexVector zero = ComplexVector::Zero(va[0].size() * wb[0].size());
      auto chains = materialize<ComplexVector>(
          va, wb, [](const ComplexVector& x, const ComplexVector& y) -> ComplexVector { return kron_product(x, y); },
          [](const Integer& c, const ComplexVector& x) -> ComplexVector { return c.get_d() * x; }, zero);
      for (auto& c : chains) out.chains.push_back(std::move(c));
    }
  return out;
}

ExactJordanChainSet kron_sum_jordan_basis(const ExactJordanChainSet& a, const ExactJordanChainSet& b) {
  ExactJordanChainSet out;
  out.eigenvalue = a.eigenvalue + b.eigenvalue;
  for (const auto& va : a.chains)
    for (const auto& wb : b.chains) {
      if (va.empty() || wb.empty()) throw ConfigError("kron_sum_jordan_basis: empty chain");
      for (const auto& v : va)
        if (v.cols() != 1 || v.rows() != va[0].rows()) throw ConfigError("kron_sum_jordan_basis: bad vector shape");
      for (const auto& w : wb)
        if (w.cols() != 1 || w.rows() != wb[0].rows()) throw ConfigError("kron_sum_jordan_basis: bad vector shape");
      const ExactComplexMatrix zero(va[0].rows() * wb[0].rows(), 1);
      auto chains = materialize<ExactComplexMatrix>(
          va, wb, [](const ExactComplexMatrix& x, const ExactComplexMatrix& y) { return exact_kron_product(x, y); },
          [](const Integer& c, const ExactComplexMatrix& x) { return ExactComplex(Rational(c)) * x; }, zero);
      for (auto& c : chains) out.chains.push_back(std::move(c));
    }
  return out;
}

bool chains_satisfy_recursion(const ExactComplexMatrix& m, const ExactJordanChainSet& set) {
  const ExactComplexMatrix a = m - set.eigenvalue * ExactComplexMatrix::identity(m.rows());
  for (const auto& chain : set.chains)
    for (std::size_t g = 0; g < chain.size(); ++g) {
      ExactComplexMatrix r = a * chain[g];
      if (g > 0) r -= chain[g - 1];
      if (!r.is_zero()) return false;
    }
  return true;
}

std::pair<JordanChainSet, JordanChainSet> liouvillian_factor_chains(const JordanChainSet& h) {
  const Complex I(0.0, 1.0);
  JordanChainSet a, b;
  a.eigenvalue = -I * h.eigenvalue;
  b.eigenvalue = std::conj(a.eigenvalue);
  for (const auto& chain : h.chains) {
    std::vector<ComplexVector> ca, cb;
    Complex phase = I;  // grade 1 carries i^1
    for (const auto& v : chain) {
      ca.push_back(phase * v);
      cb.push_back(ca.back().conjugate());
      phase *= I;
    }
    a.chains.push_back(std::move(ca));
    b.chains.push_back(std::move(cb));
  }
  return {a, b};
}

}  // namespace mbep
