#include "mbep/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "mbep/assignment.hpp"
#include "mbep/dynamics.hpp"
#include "mbep/errors.hpp"
#include "mbep/exact.hpp"
#include "mbep/jordan.hpp"
#include "mbep/model.hpp"
#include "mbep/perturb.hpp"
#include "mbep/qgt.hpp"

namespace mbep {

namespace {

using Index = Eigen::Index;

std::string join(const std::vector<std::size_t>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s + "]";
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string num(Complex z) { return "(" + num(z.real()) + "," + num(z.imag()) + ")"; }

// Largest distance under the optimal one-to-one matching of two spectra.
double spectrum_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) cost[i][j] = std::abs(a[i] - b[j]);
  const auto col = min_cost_assignment(cost);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, cost[i][col[i]]);
  return worst;
}

const JordanStructure* cluster_near(const StructureReport& r, Complex z, double tol) {
  for (const auto& c : r.clusters)
    if (std::abs(c.eigenvalue - z) <= tol) return &c;
  return nullptr;
}

// ---- 1 ----------------------------------------------------------------------

CriterionResult qubit_multiblock() {
  CriterionResult r{1, "multi-block qubit EP", false, ""};
  PresetParams p = default_params(Preset::qubit_i);
  p.omega = 0.175;
  const ComplexMatrix l = build_parts(preset(Preset::qubit_i, p)).liouvillian_eff;
  const StructureReport rep = detect_structure(l);

  const ExactComplexMatrix exact = exact_preset_family(Preset::qubit_i, exact_preset_params(Preset::qubit_i, p)).at(0);
  const ExactComplex centre(Rational(-11, 20));
  const auto exact_ranks = exact_rank_staircase(exact, centre);

  std::ostringstream os;
  os << rep.clusters.size() << " cluster(s)";
  bool ok = rep.clusters.size() == 1;
  if (ok) {
    const auto& c = rep.clusters[0];
    const auto numeric_ranks = rank_staircase(l, c.eigenvalue, exact_ranks.size() - 1);
    os << ", eigenvalue " << num(c.eigenvalue) << " (err " << num(std::abs(c.eigenvalue - Complex(-0.55, 0)))
       << "), segre " << join(c.segre) << ", ranks numeric " << join(numeric_ranks) << " exact "
       << join(exact_ranks);
    ok = std::abs(c.eigenvalue - Complex(-0.55, 0)) <= 1e-9 && c.segre == std::vector<std::size_t>{3, 1} &&
         numeric_ranks == exact_ranks;
  }
  r.passed = ok;
  r.detail = os.str();
  return r;
}

// ---- 2 ----------------------------------------------------------------------

CriterionResult qutrit_multiblock() {
  CriterionResult r{2, "multi-block qutrit EP", false, ""};
  const PresetParams p = default_params(Preset::qutrit_i);
  const double gi = resolved_gamma_i(Preset::qutrit_i, p);
  const ComplexMatrix l = build_parts(preset(Preset::qutrit_i, p)).liouvillian_eff;
  const StructureReport rep = detect_structure(l);
  std::ostringstream os;
  os << rep.clusters.size() << " cluster(s)";
  bool ok = rep.clusters.size() == 1;
  if (ok) {
    const auto& c = rep.clusters[0];
    const double err = std::abs(c.eigenvalue - Complex(-gi, 0));
    os << ", eigenvalue " << num(c.eigenvalue) << " (err " << num(err) << "), segre " << join(c.segre);
    ok = err <= 1e-7 && c.segre == std::vector<std::size_t>{5, 3, 1};
  }
  r.passed = ok;
  r.detail = os.str();
  return r;
}

// ---- 3, 4: planted Jordan structures ----------------------------------------------

struct Planted {
  ExactComplexMatrix matrix;
  ExactComplexMatrix similarity;  // columns carry the Jordan chains
  std::vector<JordanBlock> blocks;
  std::vector<ExactComplex> values;
};

ExactComplexMatrix unit_triangular_inverse(const ExactComplexMatrix& t, bool lower) {
  const std::size_t n = t.rows();
  ExactComplexMatrix inv = ExactComplexMatrix::identity(n);
  // Solve t x = e_c column by column with unit diagonal.
  for (std::size_t c = 0; c < n; ++c) {
    if (lower) {
      for (std::size_t i = 0; i < n; ++i) {
        ExactComplex s = i == c ? ExactComplex(1) : ExactComplex(0);
        for (std::size_t j = 0; j < i; ++j) s -= t(i, j) * inv(j, c);
        inv(i, c) = s;
      }
    } else {
      for (std::size_t ii = n; ii-- > 0;) {
        ExactComplex s = ii == c ? ExactComplex(1) : ExactComplex(0);
        for (std::size_t j = ii + 1; j < n; ++j) s -= t(ii, j) * inv(j, c);
        inv(ii, c) = s;
      }
    }
  }
  return inv;
}

// Random S = lower * upper with small rational entries; returns S and S^-1.
std::pair<ExactComplexMatrix, ExactComplexMatrix> random_similarity(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> numer(-2, 2), denom(1, 2);
  ExactComplexMatrix lo = ExactComplexMatrix::identity(n), up = ExactComplexMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      lo(i, j) = ExactComplex(Rational(numer(rng), denom(rng)), Rational(numer(rng), denom(rng)));
      up(j, i) = ExactComplex(Rational(numer(rng), denom(rng)));
    }
  return {lo * up, unit_triangular_inverse(up, false) * unit_triangular_inverse(lo, true)};
}

Planted plant(const std::vector<std::size_t>& sizes, const std::vector<ExactComplex>& values, std::mt19937_64& rng) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  ExactComplexMatrix j(n, n);
  Planted out;
  std::size_t at = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    for (std::size_t k = 0; k < sizes[b]; ++k) {
      j(at + k, at + k) = values[b];
      if (k + 1 < sizes[b]) j(at + k, at + k + 1) = ExactComplex(1);
    }
    out.blocks.push_back({sizes[b], values[b].to_complex()});
    at += sizes[b];
  }
  auto [s, s_inv] = random_similarity(n, rng);
  out.matrix = s * j * s_inv;
  out.similarity = s;
  out.values = values;
  return out;
}

CriterionResult kron_sum_theorem(Execution exec) {
  CriterionResult r{3, "kron-sum block theorem", false, ""};
  constexpr std::size_t kCases = 200;
  const std::vector<ExactComplex> pool{ExactComplex(0), ExactComplex(1), ExactComplex(0, 1),
                                       ExactComplex(Rational(-1, 2))};
  std::vector<int> mismatch(kCases, 0);
  std::vector<std::string> notes(kCases);

  for_each_index(kCases, exec, [&](std::size_t c) {
    std::mt19937_64 rng(0xC0FFEEull + c);
    auto factor = [&]() {
      std::uniform_int_distribution<std::size_t> dim(1, 5);
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      std::size_t left = dim(rng);
      std::vector<std::size_t> sizes;
      std::vector<ExactComplex> values;
      while (left > 0) {
        std::uniform_int_distribution<std::size_t> sz(1, std::min<std::size_t>(4, left));
        sizes.push_back(sz(rng));
        values.push_back(pool[pick(rng)]);
        left -= sizes.back();
      }
      return plant(sizes, values, rng);
    };
    const Planted a = factor();
    const Planted b = factor();
    const auto predicted = predict_kron_sum_blocks(a.blocks, b.blocks);

    std::vector<ExactComplex> candidates;
    for (const auto& x : a.values)
      for (const auto& y : b.values) {
        const ExactComplex z = x + y;
        if (std::find(candidates.begin(), candidates.end(), z) == candidates.end()) candidates.push_back(z);
      }
    const ExactStructureReport detected = detect_structure_exact(exact_kron_sum(a.matrix, b.matrix), candidates);

    bool ok = detected.complete && detected.clusters.size() == predicted.size();
    for (const auto& p : predicted) {
      bool hit = false;
      for (const auto& d : detected.clusters)
        if (std::abs(d.eigenvalue.to_complex() - p.eigenvalue) < 1e-12) hit = d.segre == p.segre;
      ok = ok && hit;
    }
    if (!ok) {
      mismatch[c] = 1;
      std::string pa, pb;
      for (const auto& blk : a.blocks) pa += std::to_string(blk.size) + " ";
      for (const auto& blk : b.blocks) pb += std::to_string(blk.size) + " ";
      notes[c] = "case " + std::to_string(c) + " (A blocks " + pa + "| B blocks " + pb + ")";
    }
  });

  int bad = 0;
  std::string first;
  for (std::size_t c = 0; c < kCases; ++c) {
    bad += mismatch[c];
    if (mismatch[c] && first.empty()) first = notes[c];
  }
  r.passed = bad == 0;
  r.detail = std::to_string(kCases) + " planted pairs, " + std::to_string(bad) + " mismatches" +
             (first.empty() ? "" : "; first: " + first);
  return r;
}

CriterionResult kron_chain_constructor(Execution exec) {
  CriterionResult r{4, "kron-sum chain constructor", false, ""};
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t m = 1; m <= 5; ++m)
    for (std::size_t n = 1; n <= 5; ++n) pairs.emplace_back(m, n);
  std::vector<std::string> failures(pairs.size());

  for_each_index(pairs.size(), exec, [&](std::size_t k) {
    const auto [m, n] = pairs[k];
    std::mt19937_64 rng(0xA11CEull + k);
    const Planted a = plant({m}, {ExactComplex(Rational(1, 3), 1)}, rng);
    const Planted b = plant({n}, {ExactComplex(-2, Rational(1, 2))}, rng);
    auto chain_of = [](const Planted& p) {
      ExactJordanChainSet set;
      set.eigenvalue = p.values[0];
      set.chains.emplace_back();
      for (std::size_t c = 0; c < p.similarity.cols(); ++c) set.chains[0].push_back(p.similarity.col(c));
      return set;
    };
    const ExactJordanChainSet out = kron_sum_jordan_basis(chain_of(a), chain_of(b));
    const ExactComplexMatrix l = exact_kron_sum(a.matrix, b.matrix);

    ExactComplexMatrix span(m * n, out.vector_count());
    std::size_t col = 0;
    for (const auto& chain : out.chains)
      for (const auto& v : chain) {
        for (std::size_t i = 0; i < m * n; ++i) span(i, col) = v(i, 0);
        ++col;
      }
    std::string why;
    if (!chains_satisfy_recursion(l, out)) why += " recursion";
    if (out.chains.size() != std::min(m, n)) why += " chain-count=" + std::to_string(out.chains.size());
    if (out.vector_count() != m * n || exact_rank(span) != m * n) why += " span";
    if (!why.empty()) failures[k] = "(" + std::to_string(m) + "," + std::to_string(n) + "):" + why;
  });

  std::string bad;
  for (const auto& f : failures)
    if (!f.empty()) bad += " " + f;
  r.passed = bad.empty();
  r.detail = bad.empty() ? "all 25 (m,n) pairs: recursion exact, span m*n, min(m,n) chains" : "failed" + bad;
  return r;
}

// ---- 5 ----------------------------------------------------------------------------

CriterionResult newton_polygon() {
  CriterionResult r{5, "Newton diagram of qutrit case (i)", false, ""};
  const PresetParams p = default_params(Preset::qutrit_i);
  const ExactPresetParams ep = exact_preset_params(Preset::qutrit_i, p);
  const GammaPolynomial chi = char_poly_in_gamma(exact_preset_family(Preset::qutrit_i, ep));
  const GammaPolynomial shifted = recenter(chi, ExactComplex(-ep.gamma_i));

  const Rational gt = (ep.gamma_h - ep.gamma_e) / 2;
  const RatePolynomial g = RatePolynomial::gamma();
  const GammaPolynomial linear({RatePolynomial(ExactComplex(1)), g});
  const GammaPolynomial quadratic({RatePolynomial(ExactComplex(1)), RatePolynomial::monomial(ExactComplex(2), 1),
                                   RatePolynomial::monomial(ExactComplex(Rational(-gt / 2)), 1) +
                                       RatePolynomial::monomial(ExactComplex(Rational(3, 4)), 2)});
  const PolynomialDivision div = divide(shifted, linear * quadratic);

  std::ostringstream os;
  bool ok = div.exact() && div.quotient.degree() == 6;
  os << "division " << (div.exact() ? "exact" : "inexact") << ", quotient degree " << div.quotient.degree();

  // Expected leading Gamma orders and coefficients of the quotient.
  const Rational g2 = gt * gt, g4 = g2 * g2;
  const std::vector<std::pair<std::size_t, Rational>> table{
      {1, Rational(6)}, {1, -5 * gt / 2}, {1, -g2 / 2}, {2, -g2 / 2}, {1, -15 * g4 / 32}, {2, -g4 / 2}};
  if (ok) {
    int table_bad = 0;
    for (std::size_t k = 1; k <= 6; ++k) {
      const RatePolynomial& a = div.quotient.a(k);
      if (a.is_zero() || a.valuation() != table[k - 1].first ||
          a.coefficient(a.valuation()) != ExactComplex(table[k - 1].second))
        ++table_bad;
    }
    os << ", leading-order mismatches " << table_bad;
    ok = table_bad == 0;
  }

  const NewtonDiagram nd = newton_diagram(div.quotient);
  os << ", segments";
  for (const auto& s : nd.segments) os << " {" << s.slope.get_str() << "," << s.span() << "}";
  ok = ok && nd.segments.size() == 2 && nd.segments[0].slope == Rational(1, 5) && nd.segments[0].span() == 5 &&
       nd.segments[1].slope == Rational(1) && nd.segments[1].span() == 1;
  if (ok) {
    const double radius = std::pow(15.0 / 32.0, 0.2) * std::pow(gt.get_d(), 0.8);
    std::vector<Complex> expected;
    for (int k = 0; k < 5; ++k) expected.push_back(std::polar(radius, 2.0 * M_PI * k / 5.0));
    const double ring_err = spectrum_distance(nd.segments[0].roots(), expected);
    const auto lin = nd.segments[1].exact_root();
    os << ", ring error " << num(ring_err) << ", linear root " << (lin ? to_string(*lin) : "none");
    ok = ring_err <= 1e-12 && lin && *lin == ExactComplex(Rational(-16, 15));
  }
  r.passed = ok;
  r.detail = os.str();
  return r;
}

// ---- 6 -------------------------------------------------------------------------------

std::size_t count_near(const SplittingFit& fit, double target, double tol) {
  return static_cast<std::size_t>(std::count_if(fit.branches.begin(), fit.branches.end(),
                                                [&](const BranchFit& b) { return std::abs(b.exponent - target) <= tol; }));
}

std::string exponents(const SplittingFit& fit) {
  std::string s;
  for (const auto& b : fit.branches) s += (s.empty() ? "" : " ") + num(b.exponent);
  return s;
}

CriterionResult splitting_exponents(Execution exec) {
  CriterionResult r{6, "splitting exponents", false, ""};
  const auto grid = log_grid(1e-8, 1e-4, 12);
  SplittingOptions so;
  so.execution = exec;
  const SplittingFit qubit = splitting_exponent_fit(
      lindbladian_eff_family(preset_rate_family(Preset::qubit_i, default_params(Preset::qubit_i))), grid, so);
  const SplittingFit qutrit = splitting_exponent_fit(
      lindbladian_eff_family(preset_rate_family(Preset::qutrit_i, default_params(Preset::qutrit_i))), grid, so);

  const bool qubit_ok = qubit.branches.size() == 4 && count_near(qubit, 1.0 / 3.0, 0.02) == 3 &&
                        count_near(qubit, 1.0, 0.02) == 1;
  const bool qutrit_ok = qutrit.branches.size() == 9 && count_near(qutrit, 0.2, 0.02) == 5 &&
                         count_near(qutrit, 0.5, 0.02) == 2 && count_near(qutrit, 1.0, 0.02) == 2;
  r.passed = qubit_ok && qutrit_ok;
  r.detail = "qubit(i): " + exponents(qubit) + "; qutrit(i): " + exponents(qutrit);
  return r;
}

// ---- 7 -------------------------------------------------------------------------------

CriterionResult closed_forms(Execution exec) {
  CriterionResult r{7, "closed forms vs eig", false, ""};
  constexpr std::size_t kDraws = 100;
  std::vector<std::array<double, 3>> err(kDraws);
  for_each_index(kDraws, exec, [&](std::size_t k) {
    std::mt19937_64 rng(0x7777ull + k);
    std::uniform_real_distribution<double> rate(0.0, 1.0), drive(0.0, 0.5), cap(0.0, 0.5);
    const double gi = rate(rng), ge = rate(rng), gh = rate(rng), w = drive(rng), g = cap(rng);

    PresetParams qp;
    qp.gamma_i = gi;
    qp.gamma_e = ge;
    qp.omega = w;
    qp.gamma_cap = g;
    auto qubit_i = qubit_case_i_eigenvalues(gi, ge, w, g);
    auto qubit_ii = qubit_case_ii_eigenvalues(gi, ge, w, g);
    err[k][0] = spectrum_distance(eigenvalues(build_parts(preset(Preset::qubit_i, qp)).lindbladian_eff),
                                  {qubit_i.begin(), qubit_i.end()});
    err[k][1] = spectrum_distance(eigenvalues(build_parts(preset(Preset::qubit_ii, qp)).lindbladian_eff),
                                  {qubit_ii.begin(), qubit_ii.end()});

    PresetParams tp;
    tp.gamma_h = gh;
    tp.gamma_e = ge;
    tp.omega = w;
    tp.gamma_cap = g;
    auto qutrit_ii = qutrit_case_ii_eigenvalues(gh, ge, w, g);
    err[k][2] = spectrum_distance(eigenvalues(build_parts(preset(Preset::qutrit_ii, tp)).lindbladian_eff),
                                  {qutrit_ii.begin(), qutrit_ii.end()});
  });
  std::array<double, 3> worst{0, 0, 0};
  for (const auto& e : err)
    for (int j = 0; j < 3; ++j) worst[j] = std::max(worst[j], e[j]);
  r.passed = worst[0] <= 1e-9 && worst[1] <= 1e-9 && worst[2] <= 1e-9;
  r.detail = "100 draws, worst |closed - eig|: qubit(i) " + num(worst[0]) + ", qubit(ii) " + num(worst[1]) +
             ", qutrit(ii) " + num(worst[2]);
  return r;
}

// ---- 8 -------------------------------------------------------------------------------

std::string describe(const StructureReport& rep) {
  std::string s;
  for (const auto& c : rep.clusters) s += (s.empty() ? "" : " ") + num(c.eigenvalue.real()) + join(c.segre);
  return s;
}

CriterionResult transformation_tables() {
  CriterionResult r{8, "Jordan transformation at Gamma = 0.3", false, ""};
  constexpr double kGamma = 0.3;

  PresetParams qp = default_params(Preset::qubit_ii);
  qp.gamma_cap = kGamma;
  const double gi = *qp.gamma_i, ge = qp.gamma_e;
  const StructureReport qubit = detect_structure(build_parts(preset(Preset::qubit_ii, qp)).lindbladian_eff);
  const double ep2 = -(gi + ge) / 2;
  const auto* q1 = cluster_near(qubit, Complex(ep2, 0), 1e-6);
  const auto* q2 = cluster_near(qubit, Complex(ep2 - 2 * kGamma, 0), 1e-6);
  const bool qubit_ok = q1 && q2 && q1->segre == std::vector<std::size_t>{2} &&
                        q2->segre == std::vector<std::size_t>{1, 1};

  PresetParams tp = default_params(Preset::qutrit_ii);
  tp.gamma_cap = kGamma;
  const double ti = resolved_gamma_i(Preset::qutrit_ii, tp);
  const StructureReport qutrit = detect_structure(build_parts(preset(Preset::qutrit_ii, tp)).lindbladian_eff);
  const auto* t1 = cluster_near(qutrit, Complex(-ti, 0), 1e-6);
  const auto* t2 = cluster_near(qutrit, Complex(-ti - 2 * kGamma, 0), 1e-6);
  // J5 + J3 + J1 -> J3 at -gamma_i with J2 blocks at -gamma_i - 2 Gamma; the
  // remaining eigenvalues are semisimple.
  bool qutrit_ok = t1 && t2 && !t1->segre.empty() && t1->segre[0] == 3 && t2->segre.size() >= 2 &&
                   t2->segre[0] == 2 && t2->segre[1] == 2;
  for (const auto& c : qutrit.clusters)
    if (&c != t1 && &c != t2 && !c.segre.empty() && c.segre[0] > 1) qutrit_ok = false;

  r.passed = qubit_ok && qutrit_ok;
  r.detail = "qubit(ii): " + describe(qubit) + "; qutrit(ii): " + describe(qutrit);
  return r;
}

// ---- 9 -------------------------------------------------------------------------------

double trajectory_gap(const TrajectoryTable& a, const TrajectoryTable& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k)
    worst = std::max(worst, (a.states[k] - b.states[k]).cwiseAbs().maxCoeff());
  return worst;
}

ComplexMatrix excited_state(int excited_levels, int level) { return pure_state(excited_levels, level); }

CriterionResult dynamics_consistency(Execution exec) {
  CriterionResult r{9, "dynamics consistency", false, ""};
  std::ostringstream os;
  bool ok = true;

  // evolve vs jordan_evolve, at and off the EP drive, Gamma = 0.
  double worst = 0.0;
  for (Preset pr : {Preset::qubit_i, Preset::qutrit_i}) {
    for (double factor : {1.0, 1.3}) {
      PresetParams p = default_params(pr);
      p.omega = factor * resolved_omega(pr, p);
      const ComplexMatrix l = build_parts(preset(pr, p)).lindbladian_eff;
      const int d = is_qutrit(pr) ? 3 : 2;
      EvolveOptions eo;
      eo.keep_states = true;
      eo.execution = exec;
      const auto times = linear_grid(0.0, 12.0 / preset_time_scale(pr, p), 100);
      const ComplexMatrix rho0 = excited_state(d, 1);
      const auto direct = evolve(l, rho0, times, eo);
      const auto viaj = jordan_evolve(jordan_basis(l).sets, rho0, times, eo);
      worst = std::max(worst, trajectory_gap(direct, viaj));
    }
  }
  os << "evolve vs jordan_evolve " << num(worst);
  ok = ok && worst <= 1e-9;

  auto fit = [&](Preset pr, double gamma, double tau_max, std::size_t& degree, std::vector<double>& coef) {
    PresetParams p = default_params(pr);
    p.gamma_cap = gamma;
    const ComplexMatrix l = build_parts(preset(pr, p)).lindbladian_eff;
    EvolveOptions eo;
    eo.time_scale = preset_time_scale(pr, p);
    eo.execution = exec;
    const auto times = linear_grid(0.0, tau_max / eo.time_scale, 400);
    const auto table = evolve(l, excited_state(is_qutrit(pr) ? 3 : 2, 1), times, eo);
    const PrefactorFit f = prefactor_degree(table, 0);
    degree = f.degree;
    coef = f.coefficients;
  };

  std::size_t d_qubit0 = 0, d_qubit3 = 0, d_qutrit0 = 0, d_qutrit3 = 0;
  std::vector<double> c_qubit0, c_qubit3, c_qutrit0, c_qutrit3;
  fit(Preset::qubit_i, 0.0, 12.0, d_qubit0, c_qubit0);
  // Subdominant modes decay as e^{-0.6 tau} relative to the EP2; a long window
  // keeps them below the fit tolerance.
  fit(Preset::qubit_ii, 0.3, 60.0, d_qubit3, c_qubit3);
  fit(Preset::qutrit_ii, 0.0, 12.0, d_qutrit0, c_qutrit0);
  fit(Preset::qutrit_ii, 0.3, 24.0, d_qutrit3, c_qutrit3);
  auto ratio = [](const std::vector<double>& c) {
    return c.size() > 2 && c[1] != 0 ? std::abs(c[2] / c[1]) : 0.0;
  };
  os << "; prefactor degrees: qubit G=0 " << d_qubit0 << ", qubit(ii) G=0.3 " << d_qubit3 << ", qutrit G=0 "
     << d_qutrit0 << " (|c2/c1| " << num(ratio(c_qutrit0)) << "), qutrit(ii) G=0.3 " << d_qutrit3 << " (|c2/c1| "
     << num(ratio(c_qutrit3)) << ")";
  ok = ok && d_qubit0 == 2 && d_qubit3 == 1 && d_qutrit0 <= 4 && d_qutrit3 <= 2 && ratio(c_qutrit3) <= 0.1;
  r.passed = ok;
  r.detail = os.str();
  return r;
}

// ---- 10 ------------------------------------------------------------------------------

std::vector<double> locations(const QgtScan& s) {
  std::vector<double> out;
  for (const auto& c : s.critical_points) out.push_back(c.omega);
  return out;
}

bool match_locations(const std::vector<double>& found, const std::vector<double>& expected, double tol) {
  if (found.size() != expected.size()) return false;
  for (std::size_t k = 0; k < found.size(); ++k)
    if (std::abs(found[k] - expected[k]) > tol) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s = "{";
  for (std::size_t k = 0; k < v.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.7f", v[k]);
    s += (k ? ", " : "") + std::string(buf);
  }
  return s + "}";
}

CriterionResult qgt_locations(Execution exec) {
  CriterionResult r{10, "QGT critical points", false, ""};
  std::vector<double> grid;
  for (int k = 0; k < 400; ++k) grid.push_back(0.0005 + 1e-3 * k);
  ScanOptions so;
  so.execution = exec;
  so.qgt.richardson = true;

  PresetParams qp = default_params(Preset::qubit_ii);
  qp.gamma_i = 0.1;
  qp.gamma_e = 0.9;
  PresetParams tp = default_params(Preset::qutrit_ii);
  tp.gamma_h = 0.8;
  tp.gamma_e = 0.2;

  auto scan = [&](Preset pr, PresetParams p, double gamma) {
    p.gamma_cap = gamma;
    return locations(metric_scan(lindbladian_eff_family(preset_drive_family(pr, p)), grid, so));
  };
  const auto q3 = scan(Preset::qubit_ii, qp, 0.3);
  const auto q0 = scan(Preset::qubit_ii, qp, 0.0);
  const auto t3 = scan(Preset::qutrit_ii, tp, 0.3);
  const auto t0 = scan(Preset::qutrit_ii, tp, 0.0);

  const auto qd = qubit_case_ii_critical_drives(0.1, 0.9, 0.3);
  const auto td = qutrit_case_ii_critical_drives(0.8, 0.2, 0.3);
  const bool ok = match_locations(q3, {qd.liouvillian_ep, qd.lindbladian_ep}, 2e-3) &&
                  match_locations(t3, {td.liouvillian_ep, td.lindbladian_ep1, td.lindbladian_ep2}, 2e-3) &&
                  match_locations(q0, {qd.liouvillian_ep}, 2e-3) && match_locations(t0, {td.liouvillian_ep}, 2e-3);
  r.passed = ok;
  r.detail = "qubit G=0.3 " + list(q3) + ", G=0 " + list(q0) + "; qutrit G=0.3 " + list(t3) + ", G=0 " + list(t0);
  return r;
}

// ---- 11 ------------------------------------------------------------------------------

ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = scale * Complex(g(rng), g(rng));
  return m;
}

OpenSystemSpec random_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> levels(2, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OpenSystemSpec s;
  s.n_levels = levels(rng);
  const int ne = s.n_levels - 1;
  for (int k = 0; k < ne; ++k) {
    s.detunings.push_back(u(rng) - 0.5);
    s.sink_rates.push_back(u(rng));
  }
  for (int i = 2; i <= s.n_levels; ++i)
    for (int j = i + 1; j <= s.n_levels; ++j)
      if (u(rng) < 0.7) s.drives.push_back({i, j, 0.5 * u(rng)});
  const int jumps = static_cast<int>(u(rng) * 3.0);
  for (int k = 0; k < jumps; ++k) {
    IntraJump jmp;
    jmp.matrix = ComplexMatrix::Zero(s.n_levels, s.n_levels);
    jmp.matrix.bottomRightCorner(ne, ne) = random_matrix(static_cast<std::size_t>(ne), rng, 0.5);
    jmp.rate = u(rng);
    s.intra_jumps.push_back(jmp);
  }
  return s;
}

ComplexMatrix random_density(std::size_t n, std::mt19937_64& rng) {
  const ComplexMatrix a = random_matrix(n, rng, 1.0);
  ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

double conjugate_defect(const std::vector<Complex>& spectrum) {
  std::vector<Complex> conj;
  for (const auto& z : spectrum) conj.push_back(std::conj(z));
  return spectrum_distance(spectrum, conj);
}

CriterionResult physicality(Execution exec) {
  CriterionResult r{11, "physicality suite", false, ""};
  constexpr std::size_t kSpecs = 50;
  struct Worst {
    double trace = 0, herm = 0, pos = 0, conj = 0, mono = 0;
  };
  std::vector<Worst> worst(kSpecs);
  for_each_index(kSpecs, exec, [&](std::size_t k) {
    std::mt19937_64 rng(0x9999ull + k);
    const OpenSystemSpec spec = random_spec(rng);
    spec.validate();
    const LindbladParts parts = build_parts(spec);
    const auto n = static_cast<std::size_t>(spec.n_levels);
    Worst& w = worst[k];

    // Tr(L rho) = 0 for every rho: vec(I)^T L vanishes.
    for (Index c = 0; c < parts.full_lindbladian.cols(); ++c) {
      Complex s = 0;
      for (std::size_t l = 0; l < n; ++l) s += parts.full_lindbladian(static_cast<Index>(vec_index(l, l, n)), c);
      w.trace = std::max(w.trace, std::abs(s));
    }

    const auto times = linear_grid(0.0, 20.0, 41);
    EvolveOptions eo;
    eo.keep_states = true;
    const ComplexMatrix rho0 = random_density(n, rng);
    const auto full = evolve(parts.full_lindbladian, rho0, times, eo);
    for (const auto& rho : full.states) {
      w.trace = std::max(w.trace, std::abs(rho.trace() - Complex(1, 0)));
      w.herm = std::max(w.herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
      w.pos = std::max(w.pos, -es.eigenvalues().minCoeff());
    }

    w.conj = std::max(conjugate_defect(eigenvalues(parts.full_lindbladian)),
                      conjugate_defect(eigenvalues(parts.lindbladian_eff)));

    const auto ne = n - 1;
    const ComplexMatrix sub = rho0.bottomRightCorner(static_cast<Index>(ne), static_cast<Index>(ne));
    const auto eff = evolve(parts.lindbladian_eff, sub, times, eo);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& rho : eff.states) {
      const double total = rho.trace().real();
      w.mono = std::max(w.mono, total - prev);
      w.herm = std::max(w.herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      prev = total;
    }
  });
  Worst all;
  for (const auto& w : worst) {
    all.trace = std::max(all.trace, w.trace);
    all.herm = std::max(all.herm, w.herm);
    all.pos = std::max(all.pos, w.pos);
    all.conj = std::max(all.conj, w.conj);
    all.mono = std::max(all.mono, w.mono);
  }
  r.passed = all.trace <= 1e-10 && all.herm <= 1e-10 && all.pos <= 1e-9 && all.conj <= 1e-8 && all.mono <= 1e-12;
  r.detail = "50 specs: trace " + num(all.trace) + ", hermiticity " + num(all.herm) + ", negativity " + num(all.pos) +
             ", conjugate defect " + num(all.conj) + ", population rise " + num(all.mono);
  return r;
}

// ---- 12 ------------------------------------------------------------------------------

CriterionResult conclusion_fixture() {
  CriterionResult r{12, "block-merging fixture", false, ""};
  auto fixture = [](double t) {
    const double lambda = -0.3;
    ComplexMatrix m = lambda * ComplexMatrix::Identity(9, 9);
    for (Index k = 0; k < 7; ++k) m(k, k + 1) = 1.0;
    m(4, 5) = t;
    return m;
  };
  const StructureReport merged = detect_structure(fixture(1.0));
  const StructureReport split = detect_structure(fixture(0.0));
  const bool ok = merged.clusters.size() == 1 && merged.clusters[0].segre == std::vector<std::size_t>{8, 1} &&
                  split.clusters.size() == 1 && split.clusters[0].segre == std::vector<std::size_t>{5, 3, 1};

  // Exact oracle for both.
  auto exact_segre = [&](double t) {
    const auto rep = detect_structure_exact(lift(fixture(t)), {ExactComplex(lift(fixture(t))(0, 0))});
    return rep.clusters.empty() ? std::vector<std::size_t>{} : rep.clusters[0].segre;
  };
  const auto e1 = exact_segre(1.0), e0 = exact_segre(0.0);
  r.passed = ok && e1 == std::vector<std::size_t>{8, 1} && e0 == std::vector<std::size_t>{5, 3, 1};
  r.detail = "t=1: " + describe(merged) + " (exact " + join(e1) + "); t=0: " + describe(split) + " (exact " +
             join(e0) + ")";
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, Execution exec) {
  static const std::vector<std::function<CriterionResult(Execution)>> table{
      [](Execution) { return qubit_multiblock(); },
      [](Execution) { return qutrit_multiblock(); },
      kron_sum_theorem,
      kron_chain_constructor,
      [](Execution) { return newton_polygon(); },
      splitting_exponents,
      closed_forms,
      [](Execution) { return transformation_tables(); },
      dynamics_consistency,
      qgt_locations,
      physicality,
      [](Execution) { return conclusion_fixture(); },
  };
  if (id < 1 || id > kCriterionCount) throw ConfigError("acceptance criterion must be 1.." + std::to_string(kCriterionCount));
  try {
    return table[static_cast<std::size_t>(id - 1)](exec);
  } catch (const std::exception& e) {
    return {id, "criterion " + std::to_string(id), false, std::string("threw: ") + e.what()};
  }
}

std::vector<CriterionResult> run_acceptance(Execution exec) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, exec));
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[16];
  std::snprintf(head, sizeof head, "%-4s %2d ", r.passed ? "PASS" : "FAIL", r.id);
  return std::string(head) + r.name + ": " + r.detail;
}

}  // namespace mbep
