#include "mbep/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "mbep/errors.hpp"

namespace mbep {

namespace {

using Index = Eigen::Index;

double spectral_norm(const ComplexMatrix& m) {
  const RealVector s = singular_values(m);
  return s.size() ? s(0) : 0.0;
}

ComplexMatrix shifted(const ComplexMatrix& m, Complex c) {
  return m - c * ComplexMatrix::Identity(m.rows(), m.cols());
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(10);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

struct Node {
  int left = -1;
  int right = -1;
  double height = 0.0;
  std::vector<std::size_t> members;
};

// Single-linkage dendrogram; the last node is the root.
std::vector<Node> single_linkage(const std::vector<Complex>& values) {
  const std::size_t n = values.size();
  std::vector<Node> nodes(n);
  for (std::size_t k = 0; k < n; ++k) nodes[k].members = {k};
  struct Edge {
    double d;
    std::size_t a, b;
  };
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) edges.push_back({std::abs(values[a] - values[b]), a, b});
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.d < y.d; });

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> node_of(n);
  std::iota(node_of.begin(), node_of.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) {
    const std::size_t ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    Node merged;
    merged.left = static_cast<int>(node_of[ra]);
    merged.right = static_cast<int>(node_of[rb]);
    merged.height = e.d;
    merged.members = nodes[node_of[ra]].members;
    const auto& other = nodes[node_of[rb]].members;
    merged.members.insert(merged.members.end(), other.begin(), other.end());
    nodes.push_back(std::move(merged));
    parent[rb] = ra;
    node_of[ra] = nodes.size() - 1;
  }
  return nodes;
}

Complex mean_of(const std::vector<Complex>& values, const std::vector<std::size_t>& members) {
  Complex c = 0.0;
  for (auto k : members) c += values[k];
  return c / static_cast<double>(members.size());
}

}  // namespace

std::size_t JordanStructure::algebraic_multiplicity() const {
  return std::accumulate(segre.begin(), segre.end(), std::size_t{0});
}

std::vector<std::size_t> conjugate_partition(const std::vector<std::size_t>& partition) {
  std::vector<std::size_t> p = partition;
  std::sort(p.begin(), p.end(), std::greater<>());
  std::vector<std::size_t> out;
  if (p.empty()) return out;
  for (std::size_t k = 1; k <= p.front(); ++k) {
    std::size_t count = 0;
    for (auto x : p)
      if (x >= k) ++count;
    out.push_back(count);
  }
  return out;
}

std::vector<std::size_t> weyr_from_staircase(const std::vector<std::size_t>& ranks) {
  std::vector<std::size_t> w;
  for (std::size_t j = 1; j < ranks.size(); ++j) {
    if (ranks[j] > ranks[j - 1]) throw NumericError("rank staircase increases");
    if (ranks[j] == ranks[j - 1]) break;
    w.push_back(ranks[j - 1] - ranks[j]);
  }
  return w;
}

std::vector<std::size_t> rank_staircase(const ComplexMatrix& m, Complex center, std::size_t max_power,
                                        double rank_tol) {
  require_square(m, "rank_staircase");
  const ComplexMatrix a = shifted(m, center);
  const double base = spectral_norm(a);
  std::vector<std::size_t> ranks{static_cast<std::size_t>(m.rows())};
  ComplexMatrix power = ComplexMatrix::Identity(m.rows(), m.cols());
  double reference = 1.0;
  for (std::size_t j = 1; j <= max_power; ++j) {
    power = a * power;
    reference *= base;
    ranks.push_back(numeric_rank_scaled(power, rank_tol, reference));
  }
  return ranks;
}

std::vector<std::size_t> exact_rank_staircase(const ExactComplexMatrix& m, const ExactComplex& center) {
  if (m.rows() != m.cols()) throw ConfigError("exact_rank_staircase: matrix must be square");
  const std::size_t n = m.rows();
  const ExactComplexMatrix a = m - center * ExactComplexMatrix::identity(n);
  std::vector<std::size_t> ranks{n};
  ExactComplexMatrix power = ExactComplexMatrix::identity(n);
  for (std::size_t j = 1; j <= n; ++j) {
    power = a * power;
    ranks.push_back(exact_rank(power));
    if (ranks[j] == ranks[j - 1]) break;
  }
  return ranks;
}

ExactStructureReport detect_structure_exact(const ExactComplexMatrix& m, const std::vector<ExactComplex>& candidates) {
  ExactStructureReport report;
  std::size_t covered = 0;
  std::vector<ExactComplex> seen;
  for (const auto& c : candidates) {
    if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
    seen.push_back(c);
    const auto ranks = exact_rank_staircase(m, c);
    const auto weyr = weyr_from_staircase(ranks);
    if (weyr.empty()) continue;
    ExactJordanStructure s;
    s.eigenvalue = c;
    s.weyr = weyr;
    s.segre = conjugate_partition(weyr);
    covered += std::accumulate(weyr.begin(), weyr.end(), std::size_t{0});
    report.clusters.push_back(std::move(s));
  }
  report.complete = covered == m.rows();
  return report;
}

StructureReport detect_structure(const ComplexMatrix& m, const StructureOptions& options) {
  require_square(m, "detect_structure");
  if (!(options.cluster_tol > 0) || !(options.rank_tol > 0))
    throw ConfigError("detect_structure: tolerances must be positive");
  StructureReport report;
  const std::vector<Complex> values = eigenvalues(m);
  if (values.empty()) return report;
  const double scale = spectral_norm(m);
  const std::vector<Node> nodes = single_linkage(values);

  auto radius_for = [&](std::size_t k) { return scale * std::pow(options.cluster_tol, 1.0 / static_cast<double>(k)); };

  auto accept = [&](const Node& node) {
    JordanStructure s;
    s.eigenvalue = mean_of(values, node.members);
    for (auto k : node.members) s.cluster_radius = std::max(s.cluster_radius, std::abs(values[k] - s.eigenvalue));
    const std::size_t k = node.members.size();
    if (k == 1) {
      s.weyr = {1};
    } else {
      auto ranks = rank_staircase(m, s.eigenvalue, k, options.rank_tol);
      const std::size_t n = static_cast<std::size_t>(m.rows());
      for (std::size_t j = 1; j < ranks.size(); ++j) {
        // Rounding can make a rank tick up by one; clamp to keep a staircase.
        ranks[j] = std::min(ranks[j], ranks[j - 1]);
        if (n - ranks[j] >= k) {
          ranks[j] = n - k;
          ranks.resize(j + 1);
          break;
        }
      }
      s.weyr = weyr_from_staircase(ranks);
      if (!std::is_sorted(s.weyr.begin(), s.weyr.end(), std::greater<>())) {
        report.warnings.push_back("non-monotone Weyr characteristic at " + format_complex(s.eigenvalue));
        std::sort(s.weyr.begin(), s.weyr.end(), std::greater<>());
      }
    }
    s.segre = conjugate_partition(s.weyr);
    report.clusters.push_back(std::move(s));
  };

  auto nullity_matches = [&](const Node& node) {
    const std::size_t k = node.members.size();
    const auto ranks = rank_staircase(m, mean_of(values, node.members), k, options.rank_tol);
    return static_cast<std::size_t>(m.rows()) - ranks.back() == k;
  };

  std::function<void(int)> resolve = [&](int id) {
    const Node& node = nodes[static_cast<std::size_t>(id)];
    if (node.left < 0) {
      accept(node);
      return;
    }
    const double r = radius_for(node.members.size());
    if (node.height <= r && nullity_matches(node)) {
      accept(node);
      return;
    }
    if (node.height < 2.0 * r) {
      report.warnings.push_back("ambiguous clustering: groups near " +
                                format_complex(mean_of(values, nodes[static_cast<std::size_t>(node.left)].members)) +
                                " and " +
                                format_complex(mean_of(values, nodes[static_cast<std::size_t>(node.right)].members)) +
                                " were kept apart");
    }
    resolve(node.left);
    resolve(node.right);
  };
  resolve(static_cast<int>(nodes.size() - 1));

  std::stable_sort(report.clusters.begin(), report.clusters.end(),
                   [](const JordanStructure& a, const JordanStructure& b) { return spectral_less(a.eigenvalue, b.eigenvalue); });
  return report;
}

// --- prediction ----------------------------------------------------------------

std::vector<JordanStructure> predict_kron_sum_blocks(const std::vector<JordanBlock>& a,
                                                     const std::vector<JordanBlock>& b, double merge_tol) {
  struct Raw {
    Complex value;
    std::size_t size;
  };
  std::vector<Raw> raw;
  for (const auto& x : a)
    for (const auto& y : b) {
      if (x.size == 0 || y.size == 0) throw ConfigError("predict_kron_sum_blocks: block sizes must be >= 1");
      for (std::size_t k = 1; k <= std::min(x.size, y.size); ++k)
        raw.push_back({x.eigenvalue + y.eigenvalue, x.size + y.size - (2 * k - 1)});
    }
  std::vector<JordanStructure> out;
  std::vector<std::vector<Complex>> members;
  for (const auto& r : raw) {
    std::size_t hit = out.size();
    for (std::size_t c = 0; c < out.size(); ++c) {
      for (const auto& v : members[c])
        if (std::abs(v - r.value) <= merge_tol * std::max(1.0, std::abs(r.value))) hit = c;
      if (hit != out.size()) break;
    }
    if (hit == out.size()) {
      out.push_back({r.value, {}, {}, 0.0});
      members.emplace_back();
    }
    out[hit].segre.push_back(r.size);
    members[hit].push_back(r.value);
  }
  for (auto& s : out) {
    std::sort(s.segre.begin(), s.segre.end(), std::greater<>());
    s.weyr = conjugate_partition(s.segre);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const JordanStructure& x, const JordanStructure& y) { return spectral_less(x.eigenvalue, y.eigenvalue); });
  return out;
}

std::vector<JordanStructure> predict_liouvillian_blocks(const std::vector<JordanBlock>& h_a,
                                                        const std::vector<JordanBlock>& h_b, double merge_tol) {
  const Complex I(0.0, 1.0);
  std::vector<JordanBlock> a, b;
  for (const auto& x : h_a) a.push_back({x.size, -I * x.eigenvalue});
  for (const auto& y : h_b) b.push_back({y.size, I * std::conj(y.eigenvalue)});
  return predict_kron_sum_blocks(a, b, merge_tol);
}

// --- chains ----------------------------------------------------------------------

std::size_t JordanChainSet::vector_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.size();
  return n;
}

std::size_t ExactJordanChainSet::vector_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.size();
  return n;
}

namespace {

// Orthonormal basis for the span of the columns, keeping `dim` directions.
ComplexMatrix leading_left_vectors(const ComplexMatrix& u, std::size_t dim) {
  if (dim == 0 || u.cols() == 0) return ComplexMatrix(u.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(u, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(static_cast<Index>(std::min<std::size_t>(dim, static_cast<std::size_t>(svd.matrixU().cols()))));
}

}  // namespace

JordanChainSet jordan_chains(const ComplexMatrix& m, const JordanStructure& s, double /*rank_tol*/) {
  require_square(m, "jordan_chains");
  JordanChainSet out;
  out.eigenvalue = s.eigenvalue;
  if (s.segre.empty()) return out;
  const Index n = m.rows();
  const ComplexMatrix a = shifted(m, s.eigenvalue);
  const std::size_t longest = s.segre.front();

  std::vector<ComplexMatrix> kernels;
  ComplexMatrix power = ComplexMatrix::Identity(n, n);
  kernels.push_back(ComplexMatrix(n, 0));
  // Nullities follow the Weyr data so kernels match the accepted structure.
  std::size_t nullity = 0;
  for (std::size_t j = 1; j <= longest; ++j) {
    power = a * power;
    nullity += j - 1 < s.weyr.size() ? s.weyr[j - 1] : 0;
    kernels.push_back(null_space(power, nullity));
  }

  for (std::size_t len = longest; len >= 1; --len) {
    const auto count = static_cast<std::size_t>(std::count(s.segre.begin(), s.segre.end(), len));
    if (count == 0) continue;
    const ComplexMatrix& lower = kernels[len - 1];
    std::vector<ComplexVector> existing;
    for (const auto& chain : out.chains) existing.push_back(chain[len - 1].normalized());
    ComplexMatrix u(n, lower.cols() + static_cast<Index>(existing.size()));
    u.leftCols(lower.cols()) = lower;
    for (std::size_t k = 0; k < existing.size(); ++k) u.col(lower.cols() + static_cast<Index>(k)) = existing[k];
    const ComplexMatrix q = leading_left_vectors(u, static_cast<std::size_t>(u.cols()));
    const ComplexMatrix& top_space = kernels[len];
    const ComplexMatrix residual = top_space - q * (q.adjoint() * top_space);
    Eigen::JacobiSVD<ComplexMatrix> svd(residual, Eigen::ComputeFullV);
    if (static_cast<Index>(count) > svd.matrixV().cols()) throw NumericError("jordan_chains: kernel too small");
    for (std::size_t t = 0; t < count; ++t) {
      ComplexVector x = top_space * svd.matrixV().col(static_cast<Index>(t));
      x.normalize();
      std::vector<ComplexVector> chain(len);
      chain[len - 1] = x;
      for (std::size_t g = len - 1; g >= 1; --g) chain[g - 1] = a * chain[g];
      out.chains.push_back(std::move(chain));
    }
  }
  return out;
}

double chain_residual(const ComplexMatrix& m, const JordanChainSet& set) {
  const ComplexMatrix a = shifted(m, set.eigenvalue);
  const double scale = std::max(1.0, m.norm());
  double worst = 0.0;
  for (const auto& chain : set.chains)
    for (std::size_t g = 0; g < chain.size(); ++g) {
      ComplexVector r = a * chain[g];
      if (g > 0) r -= chain[g - 1];
      worst = std::max(worst, r.norm() / scale);
    }
  return worst;
}

JordanBasis assemble_basis(std::vector<JordanChainSet> sets, std::size_t dim) {
  JordanBasis out;
  out.sets = std::move(sets);
  std::size_t total = 0;
  for (const auto& s : out.sets) total += s.vector_count();
  if (total != dim)
    throw NumericError("jordan basis incomplete: " + std::to_string(total) + " chain vectors for dimension " +
                       std::to_string(dim));
  out.basis.resize(static_cast<Index>(dim), static_cast<Index>(dim));
  Index col = 0;
  for (const auto& s : out.sets)
    for (const auto& chain : s.chains)
      for (const auto& v : chain) {
        if (v.size() != static_cast<Index>(dim)) throw ConfigError("jordan basis: vector length mismatch");
        out.basis.col(col++) = v;
      }
  out.condition_number = condition_number(out.basis);
  return out;
}

JordanBasis jordan_basis(const ComplexMatrix& m, const StructureOptions& options) {
  const auto report = detect_structure(m, options);
  std::vector<JordanChainSet> sets;
  for (const auto& s : report.clusters) sets.push_back(jordan_chains(m, s, options.rank_tol));
  return assemble_basis(std::move(sets), static_cast<std::size_t>(m.rows()));
}

}  // namespace mbep
