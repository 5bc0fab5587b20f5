#include <doctest.h>

#include <random>

#include "mbep/assignment.hpp"
#include "mbep/errors.hpp"
#include "mbep/linalg.hpp"
#include "support.hpp"

using namespace mbep;

namespace {

ComplexMatrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexMatrix m(n, n);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = Complex(u(rng), u(rng));
  return m;
}

}  // namespace

TEST_CASE("kron_sum spectrum is the set of pairwise sums") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix a = random_matrix(2, rng), b = random_matrix(3, rng);
    const auto ea = eigenvalues(a), eb = eigenvalues(b);
    std::vector<Complex> sums;
    for (auto x : ea)
      for (auto y : eb) sums.push_back(x + y);
    CHECK(testing::matched_distance(eigenvalues(kron_sum(a, b)), sums) < 1e-12);
  }
}

TEST_CASE("kron_product entries follow the block layout") {
  ComplexMatrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 5, 6, 7;
  const ComplexMatrix k = kron_product(a, b);
  CHECK(k(0, 1) == Complex(5));
  CHECK(k(3, 2) == Complex(4.0 * 6));
  CHECK(k(2, 1) == Complex(3.0 * 5));
}

TEST_CASE("eig returns biorthonormal left vectors and sorted spectrum") {
  std::mt19937_64 rng(3);
  const ComplexMatrix m = random_matrix(5, rng);
  const EigenSystem es = eig(m);
  REQUIRE(es.left_vectors.size() == 25);
  const ComplexMatrix gram = es.left_vectors.adjoint() * es.right_vectors;
  CHECK((gram - ComplexMatrix::Identity(5, 5)).norm() < 1e-10);
  for (std::size_t k = 0; k + 1 < es.eigenvalues.size(); ++k)
    CHECK_FALSE(spectral_less(es.eigenvalues[k + 1], es.eigenvalues[k]));
  CHECK(es.residual_bound < 1e-13);
}

TEST_CASE("eig gives a well-conditioned basis for a repeated semisimple eigenvalue") {
  std::mt19937_64 rng(5);
  const ComplexMatrix s = random_matrix(4, rng);
  ComplexMatrix d = ComplexMatrix::Zero(4, 4);
  d.diagonal() << 0.5, 0.5, 0.5, -1.0;
  const ComplexMatrix m = s * d * s.inverse();
  const EigenSystem es = eig(m);
  CHECK_FALSE(es.ill_conditioned);
  CHECK(es.residual_bound < 1e-10);
}

TEST_CASE("eig flags a Jordan block as ill-conditioned") {
  const EigenSystem es = eig(testing::jordan_block(3, Complex(0.2, 0.1)));
  CHECK(es.ill_conditioned);
}

TEST_CASE("numeric rank and null space") {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 1) = 1;
  m(1, 2) = 1;
  CHECK(numeric_rank(m) == 2);
  const ComplexMatrix z = null_space(m, 1);
  CHECK((m * z).norm() < 1e-14);
  CHECK(std::abs(std::abs(z(0, 0)) - 1.0) < 1e-14);
}

TEST_CASE("matrix_exp of a nilpotent block is the truncated series") {
  const ComplexMatrix j = testing::jordan_block(3, 0.0);
  const double t = 1.7;
  ComplexMatrix expected = ComplexMatrix::Identity(3, 3) + t * j + 0.5 * t * t * j * j;
  CHECK((matrix_exp(j, t) - expected).norm() < 1e-13);
  CHECK_THROWS_AS(matrix_exp(j, NAN), ConfigError);
}

TEST_CASE("polynomial roots") {
  const auto r = polynomial_roots({1.0, -6.0, 11.0, -6.0});
  CHECK(testing::matched_distance(r, {1.0, 2.0, 3.0}) < 1e-12);
  CHECK_THROWS_AS(polynomial_roots({0.0, 0.0}), ConfigError);
}

TEST_CASE("hungarian assignment matches brute force") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost)
      for (auto& c : row) c = u(rng);
    const auto col = min_cost_assignment(cost);
    double got = 0;
    for (std::size_t r = 0; r < n; ++r) got += cost[r][col[r]];
    std::vector<std::size_t> p{0, 1, 2, 3, 4};
    double best = INFINITY;
    do {
      double s = 0;
      for (std::size_t r = 0; r < n; ++r) s += cost[r][p[r]];
      best = std::min(best, s);
    } while (std::next_permutation(p.begin(), p.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("non-square input is rejected") {
  CHECK_THROWS_AS(eig(ComplexMatrix::Zero(2, 3)), ConfigError);
  CHECK_THROWS_AS(kron_sum(ComplexMatrix::Zero(2, 3), ComplexMatrix::Zero(2, 2)), ConfigError);
}
