#include "mbep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "mbep/errors.hpp"

namespace mbep {

ComplexMatrix kron_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void require_square(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() != m.cols())
    throw ConfigError(std::string(what) + ": matrix must be square, got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

ComplexMatrix kron_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "kron_sum");
  require_square(b, "kron_sum");
  const ComplexMatrix ia = ComplexMatrix::Identity(a.rows(), a.cols());
  const ComplexMatrix ib = ComplexMatrix::Identity(b.rows(), b.cols());
  return kron_product(a, ib) + kron_product(ia, b);
}

RealVector singular_values(const ComplexMatrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

std::size_t numeric_rank_scaled(const ComplexMatrix& m, double tol, double reference) {
  if (tol < 0) throw ConfigError("rank tolerance must be non-negative");
  if (m.size() == 0) return 0;
  const RealVector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = tol * reference * static_cast<double>(std::max(m.rows(), m.cols()));
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > cut) ++r;
  return r;
}

std::size_t numeric_rank(const ComplexMatrix& m, double tol) {
  if (m.size() == 0) return 0;
  const RealVector s = singular_values(m);
  return numeric_rank_scaled(m, tol, s.size() ? s(0) : 0.0);
}

ComplexMatrix null_space(const ComplexMatrix& m, std::size_t dim) {
  if (dim == 0) return ComplexMatrix(m.cols(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto n = m.cols();
  if (static_cast<Eigen::Index>(dim) > n) throw NumericError("null_space: dimension exceeds column count");
  return svd.matrixV().rightCols(static_cast<Eigen::Index>(dim));
}

bool spectral_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() < b.imag();
}

double condition_number(const ComplexMatrix& m) {
  const RealVector s = singular_values(m);
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const Complex z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

EigenSystem eig(const ComplexMatrix& m, const EigOptions& options) {
  require_square(m, "eig");
  if (!all_finite(m)) throw ConfigError("eig: matrix has non-finite entries");
  EigenSystem out;
  const Eigen::Index n = m.rows();
  if (n == 0) return out;

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) throw NumericError("eig: QR iteration did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return spectral_less(vals(a), vals(b)); });

  out.right_vectors.resize(n, n);
  out.eigenvalues.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues.push_back(vals(src));
    ComplexVector v = solver.eigenvectors().col(src);
    const double nv = v.norm();
    if (nv > 0) v /= nv;
    out.right_vectors.col(k) = v;
  }

  const double mnorm = m.norm();

  // Back-substitution on the Schur form returns near-parallel vectors for an
  // exactly repeated eigenvalue even when the eigenspace is full. Replace them
  // by a null-space basis whenever the nullity confirms a semisimple cluster.
  const double same = 1e-11 * std::max(1.0, mnorm);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (Eigen::Index a = 0; a < n; ++a) {
    if (done[static_cast<std::size_t>(a)]) continue;
    std::vector<Eigen::Index> group{a};
    for (Eigen::Index b = a + 1; b < n; ++b)
      if (!done[static_cast<std::size_t>(b)] &&
          std::abs(out.eigenvalues[static_cast<std::size_t>(a)] - out.eigenvalues[static_cast<std::size_t>(b)]) <= same)
        group.push_back(b);
    for (auto g : group) done[static_cast<std::size_t>(g)] = true;
    if (group.size() < 2) continue;
    Complex centre = 0.0;
    for (auto g : group) centre += out.eigenvalues[static_cast<std::size_t>(g)];
    centre /= static_cast<double>(group.size());
    const ComplexMatrix shifted = m - centre * ComplexMatrix::Identity(n, n);
    Eigen::JacobiSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullV);
    const RealVector s = svd.singularValues();
    const auto k = static_cast<Eigen::Index>(group.size());
    if (s(n - k) > 1e-10 * std::max(1.0, mnorm) * static_cast<double>(n)) continue;
    const ComplexMatrix basis = svd.matrixV().rightCols(k);
    for (Eigen::Index j = 0; j < k; ++j) out.right_vectors.col(group[static_cast<std::size_t>(j)]) = basis.col(j);
  }

  double worst = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r =
        (m * out.right_vectors.col(k) - out.eigenvalues[static_cast<std::size_t>(k)] * out.right_vectors.col(k))
            .norm();
    worst = std::max(worst, r);
  }
  out.residual_bound = mnorm > 0 ? worst / mnorm : 0.0;

  out.condition_number = condition_number(out.right_vectors);
  out.ill_conditioned = !(out.condition_number < options.ill_condition_threshold);
  if (out.condition_number < options.singular_threshold) {
    const ComplexMatrix inv = out.right_vectors.partialPivLu().inverse();
    out.left_vectors = inv.adjoint();
  }
  return out;
}

std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
  require_square(m, "eigenvalues");
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalues: QR iteration did not converge");
  std::vector<Complex> out(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
  std::stable_sort(out.begin(), out.end(), spectral_less);
  return out;
}

ComplexMatrix matrix_exp(const ComplexMatrix& m, double t) {
  require_square(m, "matrix_exp");
  if (!std::isfinite(t)) throw ConfigError("matrix_exp: non-finite time");
  if (!all_finite(m)) throw ConfigError("matrix_exp: matrix has non-finite entries");
  if (m.rows() == 0) return m;
  const ComplexMatrix scaled = m * t;
  ComplexMatrix out = scaled.exp();
  if (!all_finite(out)) {
    const double norm1 = scaled.cwiseAbs().colwise().sum().maxCoeff();
    throw NumericError("matrix_exp: overflow (||m t||_1 = " + std::to_string(norm1) + ")");
  }
  return out;
}

ComplexMatrix companion_matrix(const std::vector<Complex>& c) {
  if (c.empty() || c.front() != Complex(1.0)) throw ConfigError("companion_matrix: polynomial must be monic");
  const auto n = static_cast<Eigen::Index>(c.size() - 1);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) out(0, k) = -c[static_cast<std::size_t>(k + 1)];
  for (Eigen::Index k = 1; k < n; ++k) out(k, k - 1) = 1.0;
  return out;
}

std::vector<Complex> polynomial_roots(const std::vector<Complex>& descending) {
  std::size_t lead = 0;
  while (lead < descending.size() && descending[lead] == Complex(0.0)) ++lead;
  if (lead == descending.size()) throw ConfigError("polynomial_roots: zero polynomial");
  std::vector<Complex> monic(descending.begin() + static_cast<std::ptrdiff_t>(lead), descending.end());
  const Complex a0 = monic.front();
  for (auto& c : monic) c /= a0;
  if (monic.size() == 1) return {};
  return eigenvalues(companion_matrix(monic));
}

}  // namespace mbep
