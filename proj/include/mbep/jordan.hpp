#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mbep/exact.hpp"
#include "mbep/linalg.hpp"

namespace mbep {

inline constexpr double kDefaultClusterTol = 1e-7;

struct JordanStructure {
  Complex eigenvalue;                // cluster mean
  std::vector<std::size_t> segre;    // block sizes, descending
  std::vector<std::size_t> weyr;     // nullity increments of (M - lambda)^k
  double cluster_radius = 0.0;       // max distance of members from the mean
  std::size_t algebraic_multiplicity() const;
};

struct StructureOptions {
  double cluster_tol = kDefaultClusterTol;
  double rank_tol = kDefaultRankTol;
};

struct StructureReport {
  std::vector<JordanStructure> clusters;
  std::vector<std::string> warnings;
};

// Clusters the spectrum and reads each cluster's Weyr characteristic off the
// rank staircase. A candidate cluster of k eigenvalues is accepted when its
// single-linkage height is within ||M|| * cluster_tol^(1/k) (the spread a
// size-k block shows under rounding) and (M - c)^k has nullity k.
StructureReport detect_structure(const ComplexMatrix& m, const StructureOptions& options = {});

// ranks r_0 = n, r_1, ..., r_max_power of (M - center)^j; singular values are
// compared with rank_tol * n * sigma_max(M - center)^j.
std::vector<std::size_t> rank_staircase(const ComplexMatrix& m, Complex center, std::size_t max_power,
                                        double rank_tol = kDefaultRankTol);

// Exact ranks of (M - center)^j for j = 0.. until the rank stops changing.
std::vector<std::size_t> exact_rank_staircase(const ExactComplexMatrix& m, const ExactComplex& center);

std::vector<std::size_t> conjugate_partition(const std::vector<std::size_t>& partition);

// Weyr characteristic from a rank staircase.
std::vector<std::size_t> weyr_from_staircase(const std::vector<std::size_t>& ranks);

struct ExactJordanStructure {
  ExactComplex eigenvalue;
  std::vector<std::size_t> segre;
  std::vector<std::size_t> weyr;
};

struct ExactStructureReport {
  std::vector<ExactJordanStructure> clusters;
  bool complete = false;  // multiplicities of the candidates sum to n
};

// Jordan data at each candidate eigenvalue; candidates that are not
// eigenvalues are dropped.
ExactStructureReport detect_structure_exact(const ExactComplexMatrix& m, const std::vector<ExactComplex>& candidates);

// --- block prediction --------------------------------------------------------

struct JordanBlock {
  std::size_t size = 1;
  Complex eigenvalue;
};

// Blocks of A (x) I + I (x) B: each pair of blocks of sizes n_a, n_b at
// alpha, beta contributes sizes n_a + n_b - (2k - 1), k = 1..min(n_a, n_b), at
// alpha + beta. Coincident eigenvalues are merged.
std::vector<JordanStructure> predict_kron_sum_blocks(const std::vector<JordanBlock>& a,
                                                     const std::vector<JordanBlock>& b,
                                                     double merge_tol = kDefaultClusterTol);

// Same with A = -i H_eff, B = i H_eff^*: pair (eps_i, eps_j) lands at
// i (eps_j^* - eps_i).
std::vector<JordanStructure> predict_liouvillian_blocks(const std::vector<JordanBlock>& h_a,
                                                        const std::vector<JordanBlock>& h_b,
                                                        double merge_tol = kDefaultClusterTol);

// --- Jordan chains -------------------------------------------------------------

struct JordanChainSet {
  Complex eigenvalue;
  std::vector<std::vector<ComplexVector>> chains;  // chains[u][k-1] has grade k
  std::size_t vector_count() const;
};

struct ExactJordanChainSet {
  ExactComplex eigenvalue;
  std::vector<std::vector<ExactComplexMatrix>> chains;  // column vectors
  std::size_t vector_count() const;
};

// Numerical chains for one detected cluster. Lower vectors are images of the
// top vector, so all relations but the last hold to rounding.
JordanChainSet jordan_chains(const ComplexMatrix& m, const JordanStructure& s, double rank_tol = kDefaultRankTol);

// Largest |(M - lambda) v_k - v_{k-1}| over all chains, relative to ||M||.
double chain_residual(const ComplexMatrix& m, const JordanChainSet& set);
bool chains_satisfy_recursion(const ExactComplexMatrix& m, const ExactJordanChainSet& set);

// Integer coefficients of the output chains of one input pair (lengths m, n):
// result[u][g][i][j] multiplies v_{i+1} (x) w_{j+1} in the grade-(g+1) vector of chain u+1.
using CoefficientTable = std::vector<std::vector<Integer>>;
std::vector<std::vector<CoefficientTable>> kron_chain_coefficients(std::size_t m, std::size_t n);

// Chains of A (x) I + I (x) B built from chains of A and B, one input pair at a time.
JordanChainSet kron_sum_jordan_basis(const JordanChainSet& a, const JordanChainSet& b);
ExactJordanChainSet kron_sum_jordan_basis(const ExactJordanChainSet& a, const ExactJordanChainSet& b);

// Chains of H turned into chains of -iH (first) and i H^* (second): grade-l
// vectors pick up i^l, and the second set is the complex conjugate.
std::pair<JordanChainSet, JordanChainSet> liouvillian_factor_chains(const JordanChainSet& h_chains);

// Complete Jordan basis: chains of every cluster, concatenated.
struct JordanBasis {
  std::vector<JordanChainSet> sets;
  ComplexMatrix basis;  // columns in chain order
  double condition_number = 0.0;
};
JordanBasis jordan_basis(const ComplexMatrix& m, const StructureOptions& options = {});
JordanBasis assemble_basis(std::vector<JordanChainSet> sets, std::size_t dim);

}  // namespace mbep
