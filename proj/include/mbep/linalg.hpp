#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mbep {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// One-parameter matrix family, e.g. L_eff as a function of a rate or drive.
using MatrixFamily = std::function<Eigen::MatrixXcd(double)>;

inline constexpr double kDefaultRankTol = 1e-10;
// Right-basis condition number above which modes are reported as EP-adjacent.
inline constexpr double kEpConditionThreshold = 1e7;

ComplexMatrix kron_product(const ComplexMatrix& a, const ComplexMatrix& b);

// a ⊗ I + I ⊗ b for square a, b.
ComplexMatrix kron_sum(const ComplexMatrix& a, const ComplexMatrix& b);

RealVector singular_values(const ComplexMatrix& m);

// Count of singular values above tol * sigma_max * max(rows, cols).
std::size_t numeric_rank(const ComplexMatrix& m, double tol = kDefaultRankTol);

// Same count but against a caller-supplied scale instead of sigma_max(m).
// Used for powers of a shifted matrix, whose own sigma_max collapses near a
// nilpotent block.
std::size_t numeric_rank_scaled(const ComplexMatrix& m, double tol, double reference);

// Orthonormal basis of the numerical null space, `dim` columns.
ComplexMatrix null_space(const ComplexMatrix& m, std::size_t dim);

struct EigenSystem {
  std::vector<Complex> eigenvalues;
  ComplexMatrix right_vectors;  // unit columns
  ComplexMatrix left_vectors;   // columns l_n with l_m^H r_n = delta_mn; empty when flagged
  double residual_bound = 0.0;
  double condition_number = 0.0;  // 2-norm condition of right_vectors
  bool ill_conditioned = false;
};

struct EigOptions {
  double ill_condition_threshold = kEpConditionThreshold;
  // Above this the right basis is treated as singular and no left vectors are formed.
  double singular_threshold = 1e14;
};

// Eigenvalues ordered by descending real part, then ascending imaginary part.
EigenSystem eig(const ComplexMatrix& m, const EigOptions& options = {});
std::vector<Complex> eigenvalues(const ComplexMatrix& m);

double condition_number(const ComplexMatrix& m);

// e^{m t}; throws NumericError when the result overflows.
ComplexMatrix matrix_exp(const ComplexMatrix& m, double t);

bool all_finite(const ComplexMatrix& m);
void require_square(const ComplexMatrix& m, std::string_view what);

// Roots of sum_k c[k] x^(deg-k), leading coefficient first.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& descending);

ComplexMatrix companion_matrix(const std::vector<Complex>& monic_descending);

// Lexicographic order used throughout for reproducible output.
bool spectral_less(const Complex& a, const Complex& b);

}  // namespace mbep
