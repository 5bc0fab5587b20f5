#include "mbep/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mbep/assignment.hpp"
#include "mbep/errors.hpp"

namespace mbep {

// ---- exact families ---------------------------------------------------------------

ExactComplexMatrix ExactRateFamily::at(const Rational& gamma) const { return base + ExactComplex(gamma) * slope; }

ExactRateFamily exact_rate_family(const ExactComplexMatrix& h0, const std::vector<ExactJumpTerm>& jumps) {
  if (h0.rows() != h0.cols()) throw ConfigError("exact_rate_family: h_eff must be square");
  const std::size_t d = h0.rows();
  const ExactComplex i = ExactComplex::i_unit();
  const ExactComplexMatrix id = ExactComplexMatrix::identity(d);
  ExactRateFamily out;
  out.base = exact_kron_sum(-i * h0, i * h0.conjugate());
  out.slope = ExactComplexMatrix(d * d, d * d);
  const ExactComplex half(Rational(1, 2));
  for (const auto& term : jumps) {
    if (term.jump.rows() != d || term.jump.cols() != d) throw ConfigError("exact_rate_family: jump shape mismatch");
    const ExactComplexMatrix ldl = term.jump.adjoint() * term.jump;
    out.slope += ExactComplex(term.kron_weight) * exact_kron_product(term.jump, term.jump.conjugate());
    out.slope -= half * (exact_kron_product(ldl, id) + exact_kron_product(id, ldl.conjugate()));
  }
  return out;
}

ExactPresetParams exact_preset_params(Preset p, const PresetParams& params) {
  ExactPresetParams out;
  out.gamma_e = decimal_rational(params.gamma_e);
  out.gamma_h = decimal_rational(params.gamma_h);
  if (is_qutrit(p)) {
    out.gamma_i = params.gamma_i ? decimal_rational(*params.gamma_i) : Rational((out.gamma_h + out.gamma_e) / 2);
    if (params.omega) {
      const Rational w = decimal_rational(*params.omega);
      out.omega_squared = Rational(w * w);
    } else {
      const Rational d = out.gamma_h - out.gamma_e;
      out.omega_squared = Rational(d * d / 32);
    }
  } else {
    if (!params.gamma_i) throw ConfigError("qubit presets need gamma_i");
    out.gamma_i = decimal_rational(*params.gamma_i);
    out.omega = params.omega ? decimal_rational(*params.omega) : Rational(abs(out.gamma_i - out.gamma_e) / 4);
  }
  return out;
}

ExactRateFamily exact_preset_family(Preset p, const ExactPresetParams& params) {
  const ExactComplex i = ExactComplex::i_unit();
  const ExactComplex half(Rational(1, 2));
  std::vector<ExactJumpTerm> jumps;
  for (const auto& l : preset_excited_jumps(p)) jumps.push_back({lift(l), 1});

  if (!is_qutrit(p)) {
    if (!params.omega) throw ConfigError("exact qubit family needs a rational omega");
    ExactComplexMatrix h(2, 2);
    h(0, 0) = -i * half * ExactComplex(params.gamma_i);
    h(1, 1) = -i * half * ExactComplex(params.gamma_e);
    h(0, 1) = ExactComplex(*params.omega);
    h(1, 0) = ExactComplex(*params.omega);
    return exact_rate_family(h, jumps);
  }

  if (!params.omega_squared || sgn(*params.omega_squared) < 0)
    throw ConfigError("exact qutrit family needs a non-negative rational omega^2");
  const Rational& q = *params.omega_squared;
  ExactComplexMatrix h(3, 3);
  h(0, 0) = -i * half * ExactComplex(params.gamma_h);
  h(1, 1) = -i * half * ExactComplex(params.gamma_i);
  h(2, 2) = -i * half * ExactComplex(params.gamma_e);
  if (sgn(q) > 0) {
    // Frame diag(1, 1/omega, 1): couplings become q and 1, all rational.
    h(0, 1) = ExactComplex(q);
    h(1, 0) = ExactComplex(1);
    h(1, 2) = ExactComplex(1);
    h(2, 1) = ExactComplex(q);
    if (p == Preset::qutrit_i) {
      jumps[0].kron_weight = Rational(1 / q);  // |i><h|
      jumps[2].kron_weight = q;                // |e><i|
    }
  }
  return exact_rate_family(h, jumps);
}

GammaPolynomial char_poly_in_gamma(const ExactRateFamily& family) {
  const std::size_t n = family.base.rows();
  if (n != family.base.cols() || family.slope.rows() != n || family.slope.cols() != n)
    throw ConfigError("char_poly_in_gamma: family matrices must be square and equal in size");
  using PolyMatrix = std::vector<RatePolynomial>;
  PolyMatrix a(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a[r * n + c] = RatePolynomial({family.base(r, c), family.slope(r, c)});

  auto multiply = [&](const PolyMatrix& x, const PolyMatrix& y) {
    PolyMatrix z(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k) {
        const RatePolynomial& xrk = x[r * n + k];
        if (xrk.is_zero()) continue;
        for (std::size_t c = 0; c < n; ++c)
          if (!y[k * n + c].is_zero()) z[r * n + c] += xrk * y[k * n + c];
      }
    return z;
  };

  // M_k = A M_{k-1} + a_{k-1} I, a_k = -tr(A M_k) / k.
  std::vector<RatePolynomial> coeffs{RatePolynomial(ExactComplex(1))};
  PolyMatrix m(n * n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = multiply(a, m);
    for (std::size_t d = 0; d < n; ++d) m[d * n + d] += coeffs.back();
    const PolyMatrix am = multiply(a, m);
    RatePolynomial trace;
    for (std::size_t d = 0; d < n; ++d) trace += am[d * n + d];
    coeffs.push_back(RatePolynomial(ExactComplex(Rational(-1, static_cast<long>(k)))) * trace);
  }
  return GammaPolynomial(std::move(coeffs));
}

// ---- Newton diagram ------------------------------------------------------------------

std::vector<Complex> NewtonSegment::roots() const {
  std::vector<Complex> c;
  for (const auto& z : polynomial) c.push_back(z.to_complex());
  return polynomial_roots(c);
}

std::optional<ExactComplex> NewtonSegment::exact_root() const {
  if (span() != 1) return std::nullopt;
  return -polynomial[1] / polynomial[0];
}

NewtonDiagram newton_diagram(const GammaPolynomial& p) {
  NewtonDiagram out;
  std::size_t n = p.degree();
  while (n > 0 && p.a(n).is_zero()) {
    --n;
    ++out.zero_roots_removed;
  }
  out.degree = n;
  for (std::size_t k = 0; k <= n; ++k) {
    const RatePolynomial& ak = p.a(k);
    if (ak.is_zero()) continue;
    const std::size_t beta = ak.valuation();
    out.points.push_back({k, beta, ak.coefficient(beta)});
  }
  if (n == 0) return out;

  auto cross = [](const NewtonPoint& o, const NewtonPoint& a, const NewtonPoint& b) {
    const auto ak = static_cast<long long>(a.k) - static_cast<long long>(o.k);
    const auto ab = static_cast<long long>(a.beta) - static_cast<long long>(o.beta);
    const auto bk = static_cast<long long>(b.k) - static_cast<long long>(o.k);
    const auto bb = static_cast<long long>(b.beta) - static_cast<long long>(o.beta);
    return ak * bb - ab * bk;
  };
  std::vector<NewtonPoint> hull;
  for (const auto& pt : out.points) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), pt) <= 0) hull.pop_back();
    hull.push_back(pt);
  }

  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const NewtonPoint& b = hull[h];
    const NewtonPoint& e = hull[h + 1];
    NewtonSegment seg;
    seg.k_begin = b.k;
    seg.k_end = e.k;
    const long dk = static_cast<long>(e.k - b.k);
    const long db = static_cast<long>(e.beta) - static_cast<long>(b.beta);
    seg.slope = Rational(db, dk);
    seg.slope.canonicalize();
    seg.polynomial.assign(e.k - b.k + 1, ExactComplex());
    for (const auto& pt : out.points) {
      if (pt.k < b.k || pt.k > e.k) continue;
      const long lhs = (static_cast<long>(pt.beta) - static_cast<long>(b.beta)) * dk;
      const long rhs = db * static_cast<long>(pt.k - b.k);
      if (lhs == rhs) seg.polynomial[pt.k - b.k] = pt.alpha;
    }
    out.segments.push_back(std::move(seg));
  }
  return out;
}

// ---- splitting fits --------------------------------------------------------------------

MatrixFamily lindbladian_eff_family(SpecFamily family) {
  return [family = std::move(family)](double x) { return build_parts(family(x)).lindbladian_eff; };
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0) || !(hi > lo) || count < 2) throw ConfigError("log_grid: need 0 < lo < hi and at least 2 points");
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SplittingFit splitting_exponent_fit(const MatrixFamily& family, const std::vector<double>& gamma_grid,
                                    const SplittingOptions& options) {
  if (gamma_grid.size() < 2) throw ConfigError("splitting_exponent_fit: need at least two grid points");
  for (double g : gamma_grid)
    if (!(g > 0) || !std::isfinite(g)) throw ConfigError("splitting_exponent_fit: grid values must be positive");
  if (options.substeps == 0) throw ConfigError("splitting_exponent_fit: substeps must be >= 1");

  std::vector<double> coarse = gamma_grid;
  std::sort(coarse.begin(), coarse.end(), std::greater<>());
  coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());

  // Fine descending grid, plus one ghost point above the top for a first step.
  std::vector<double> fine;
  std::vector<std::size_t> coarse_at;
  const double first_ratio = std::pow(coarse[0] / coarse[1], 1.0 / static_cast<double>(options.substeps));
  fine.push_back(coarse[0] * first_ratio);
  for (std::size_t c = 0; c < coarse.size(); ++c) {
    if (c > 0) {
      const double ratio = std::pow(coarse[c - 1] / coarse[c], 1.0 / static_cast<double>(options.substeps));
      for (std::size_t s = 1; s < options.substeps; ++s)
        fine.push_back(coarse[c - 1] / std::pow(ratio, static_cast<double>(s)));
    }
    coarse_at.push_back(fine.size());
    fine.push_back(coarse[c]);
  }

  std::vector<std::vector<Complex>> spectra(fine.size());
  for_each_index(fine.size(), options.execution, [&](std::size_t k) { spectra[k] = eigenvalues(family(fine[k])); });
  const std::size_t n = spectra[0].size();
  for (const auto& s : spectra)
    if (s.size() != n) throw ConfigError("splitting_exponent_fit: family changes dimension");

  SplittingFit out;
  std::vector<std::vector<Complex>> track(n, std::vector<Complex>(fine.size()));
  for (std::size_t b = 0; b < n; ++b) track[b][0] = spectra[0][b];
  std::vector<bool> ambiguous(n, false);
  double scale = 0.0;
  for (const auto& z : spectra[0]) scale = std::max(scale, std::abs(z));
  const double distinct_tol = 1e-12 * std::max(1.0, scale);

  for (std::size_t k = 1; k < fine.size(); ++k) {
    std::vector<Complex> predicted(n);
    for (std::size_t b = 0; b < n; ++b) {
      if (k < 2) {
        predicted[b] = track[b][k - 1];
      } else {
        const double step = std::log(fine[k] / fine[k - 1]) / std::log(fine[k - 1] / fine[k - 2]);
        predicted[b] = track[b][k - 1] + (track[b][k - 1] - track[b][k - 2]) * step;
      }
    }
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t m = 0; m < n; ++m) cost[b][m] = std::abs(predicted[b] - spectra[k][m]);
    const auto match = min_cost_assignment(cost);
    for (std::size_t b = 0; b < n; ++b) {
      const Complex chosen = spectra[k][match[b]];
      track[b][k] = chosen;
      double second = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < n; ++m)
        if (m != match[b] && std::abs(spectra[k][m] - chosen) > distinct_tol)
          second = std::min(second, cost[b][m]);
      if (cost[b][match[b]] > options.ambiguity_ratio * second) ambiguous[b] = true;
    }
  }

  const auto reference_clusters = detect_structure(family(0.0), options.structure);
  for (const auto& w : reference_clusters.warnings) out.warnings.push_back("reference spectrum: " + w);

  // Coarse points in ascending order for the output.
  std::vector<std::size_t> order(coarse.size());
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  for (auto c : order) out.gammas.push_back(coarse[c]);

  for (std::size_t b = 0; b < n; ++b) {
    BranchFit fit;
    for (auto c : order) fit.trajectory.push_back(track[b][coarse_at[c]]);
    const Complex smallest = fit.trajectory.front();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cl : reference_clusters.clusters)
      if (std::abs(cl.eigenvalue - smallest) < best) {
        best = std::abs(cl.eigenvalue - smallest);
        fit.reference = cl.eigenvalue;
      }
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < out.gammas.size(); ++j) {
      const double dev = std::abs(fit.trajectory[j] - fit.reference);
      if (dev > 0) {
        xs.push_back(std::log(out.gammas[j]));
        ys.push_back(std::log(dev));
      }
    }
    if (xs.size() < 2) {
      fit.exponent = std::numeric_limits<double>::infinity();
      fit.r2 = 1.0;
      fit.coefficient = 0.0;
    } else {
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxx = 0, sxy = 0, syy = 0;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        sxx += (xs[j] - mx) * (xs[j] - mx);
        sxy += (xs[j] - mx) * (ys[j] - my);
        syy += (ys[j] - my) * (ys[j] - my);
      }
      fit.exponent = sxy / sxx;
      fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
      fit.coefficient = (smallest - fit.reference) / std::pow(out.gammas.front(), fit.exponent);
    }
    fit.ambiguous = ambiguous[b];
    if (fit.ambiguous) {
      std::ostringstream os;
      os << "branch ending at " << smallest << " had an ambiguous match; refine the grid or raise substeps";
      out.warnings.push_back(os.str());
    }
    out.branches.push_back(std::move(fit));
  }
  std::stable_sort(out.branches.begin(), out.branches.end(), [](const BranchFit& a, const BranchFit& b) {
    if (a.exponent != b.exponent) return a.exponent < b.exponent;
    return spectral_less(a.reference, b.reference);
  });
  return out;
}

}  // namespace mbep
