#include <doctest.h>

#include <random>

#include "mbep/jordan.hpp"
#include "support.hpp"

using namespace mbep;

namespace {

// Sizes m + n - 2k + 1 for k = 1..min(m, n), written out independently of the library.
std::vector<std::size_t> clebsch_gordan(std::size_t m, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k <= std::min(m, n); ++k) out.push_back(m + n - 2 * k + 1);
  return out;
}

ComplexMatrix similar(const ComplexMatrix& j, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexMatrix s(j.rows(), j.cols());
  for (Eigen::Index k = 0; k < s.size(); ++k) s.data()[k] = Complex(u(rng), u(rng));
  s += 2.0 * ComplexMatrix::Identity(j.rows(), j.cols());
  return s * j * s.inverse();
}

ExactComplexMatrix exact_block(std::size_t n, const ExactComplex& lambda) {
  ExactComplexMatrix j(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    j(k, k) = lambda;
    if (k + 1 < n) j(k, k + 1) = 1;
  }
  return j;
}

}  // namespace

TEST_CASE("partition helpers") {
  CHECK(conjugate_partition({3, 1}) == std::vector<std::size_t>{2, 1, 1});
  CHECK(conjugate_partition({5, 3, 1}) == std::vector<std::size_t>{3, 2, 2, 1, 1});
  CHECK(conjugate_partition(conjugate_partition({4, 4, 2})) == std::vector<std::size_t>{4, 4, 2});
  CHECK(weyr_from_staircase({4, 2, 1, 0, 0}) == std::vector<std::size_t>{2, 1, 1});
}

TEST_CASE("detect_structure recovers planted blocks") {
  const ComplexMatrix j =
      testing::direct_sum(testing::direct_sum(testing::jordan_block(3, 0.4), testing::jordan_block(1, 0.4)),
                          testing::jordan_block(2, Complex(-1, 0.5)));
  const StructureReport rep = detect_structure(similar(j, 9));
  REQUIRE(rep.clusters.size() == 2);
  CHECK(rep.clusters[0].segre == std::vector<std::size_t>{3, 1});
  CHECK(rep.clusters[0].weyr == std::vector<std::size_t>{2, 1, 1});
  CHECK(std::abs(rep.clusters[0].eigenvalue - Complex(0.4)) < 1e-5);
  CHECK(rep.clusters[1].segre == std::vector<std::size_t>{2});
}

TEST_CASE("distinct eigenvalues stay separate clusters") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 1.0 + 1e-3, -2.0;
  const StructureReport rep = detect_structure(similar(d, 4));
  CHECK(rep.clusters.size() == 3);
  for (const auto& c : rep.clusters) CHECK(c.segre == std::vector<std::size_t>{1});
}

TEST_CASE("kron sum block prediction agrees with the pair rule and with detection") {
  for (std::size_t m = 1; m <= 3; ++m)
    for (std::size_t n = 1; n <= 3; ++n) {
      const auto pred = predict_kron_sum_blocks({{m, 0.25}}, {{n, Complex(0, 1)}});
      REQUIRE(pred.size() == 1);
      CHECK(pred[0].segre == clebsch_gordan(m, n));
      CHECK(std::abs(pred[0].eigenvalue - Complex(0.25, 1)) < 1e-15);

      const auto exact = detect_structure_exact(
          exact_kron_sum(exact_block(m, ExactComplex(Rational(1, 4))), exact_block(n, ExactComplex(0, 1))),
          {ExactComplex(Rational(1, 4), 1)});
      REQUIRE(exact.clusters.size() == 1);
      CHECK(exact.clusters[0].segre == clebsch_gordan(m, n));
      CHECK(exact.complete);
    }
}

TEST_CASE("liouvillian prediction lands pairs at i(conj(e_j) - e_i)") {
  const Complex e1(0.3, -0.2), e2(-0.1, -0.5);
  const auto pred = predict_liouvillian_blocks({{2, e1}}, {{1, e2}});
  REQUIRE(pred.size() == 1);
  CHECK(std::abs(pred[0].eigenvalue - Complex(0, 1) * (std::conj(e2) - e1)) < 1e-15);
  CHECK(pred[0].segre == std::vector<std::size_t>{2});
}

TEST_CASE("exact staircase of a nilpotent sum") {
  const ExactComplexMatrix j = exact_block(3, ExactComplex(0));
  CHECK(exact_rank_staircase(j, ExactComplex(0)) == std::vector<std::size_t>{3, 2, 1, 0});
  CHECK(detect_structure_exact(j, {ExactComplex(1)}).clusters.empty());
}

TEST_CASE("numerical chains satisfy the recursion") {
  const ComplexMatrix m = similar(testing::direct_sum(testing::jordan_block(3, Complex(0.2, 0.3)),
                                                      testing::jordan_block(1, Complex(0.2, 0.3))),
                                  21);
  const StructureReport rep = detect_structure(m);
  REQUIRE(rep.clusters.size() == 1);
  const JordanChainSet set = jordan_chains(m, rep.clusters[0]);
  CHECK(set.vector_count() == 4);
  CHECK(chain_residual(m, set) < 1e-8);
  const JordanBasis basis = jordan_basis(m);
  CHECK(basis.basis.cols() == 4);
  CHECK(std::isfinite(basis.condition_number));
}

TEST_CASE("kron sum chains from exact input chains") {
  for (std::size_t m = 1; m <= 3; ++m)
    for (std::size_t n = 1; n <= 3; ++n) {
      const ExactComplex a(Rational(1, 3), 1), b(-2, Rational(1, 2));
      ExactJordanChainSet ca{a, {{}}}, cb{b, {{}}};
      for (std::size_t k = 0; k < m; ++k) ca.chains[0].push_back(ExactComplexMatrix::identity(m).col(k));
      for (std::size_t k = 0; k < n; ++k) cb.chains[0].push_back(ExactComplexMatrix::identity(n).col(k));
      const ExactJordanChainSet out = kron_sum_jordan_basis(ca, cb);
      const ExactComplexMatrix big = exact_kron_sum(exact_block(m, a), exact_block(n, b));
      CHECK(chains_satisfy_recursion(big, out));
      CHECK(out.chains.size() == std::min(m, n));
      CHECK(out.vector_count() == m * n);
    }
}
