#include "mbep/qgt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mbep/assignment.hpp"
#include "mbep/errors.hpp"

namespace mbep {

namespace {

using Index = Eigen::Index;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Left and right vectors of one evaluation of the family, columns in the
// centre point's mode order.
struct Frame {
  double offset = 0.0;
  ComplexMatrix right;
  ComplexMatrix left;
};

class TrackingFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

void fix_phases(ComplexMatrix& r) {
  for (Index c = 0; c < r.cols(); ++c) {
    Index at = 0;
    r.col(c).cwiseAbs().maxCoeff(&at);
    const Complex z = r(at, c);
    if (std::abs(z) > 0) r.col(c) *= std::abs(z) / z;
  }
}

// Groups eigenvalues closer than tol (single linkage). Returns group ids.
std::vector<std::size_t> degenerate_groups(const std::vector<Complex>& vals, double tol, std::size_t& count) {
  const std::size_t n = vals.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (std::abs(vals[a] - vals[b]) <= tol) parent[find(a)] = find(b);
  std::vector<std::size_t> id(n), label(n, n);
  count = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t root = find(a);
    if (label[root] == n) label[root] = count++;
    id[a] = label[root];
  }
  return id;
}

// Carries the centre modes to a neighbouring drive value: each centre vector is
// projected onto the spectral subspace of the neighbour it overlaps most.
Frame transport(const ComplexMatrix& m, const EigenSystem& centre, double offset, const QgtOptions& options) {
  const EigenSystem sys = eig(m);
  if (sys.left_vectors.size() == 0 || !(sys.condition_number < options.ep_condition_threshold))
    throw EpProximityError("qgt: neighbouring point is numerically defective", sys.condition_number);

  double scale = 1.0;
  for (const auto& z : sys.eigenvalues) scale = std::max(scale, std::abs(z));
  std::size_t groups = 0;
  const auto id = degenerate_groups(sys.eigenvalues, options.degeneracy_tol * scale, groups);

  std::vector<ComplexMatrix> projectors(groups, ComplexMatrix::Zero(m.rows(), m.cols()));
  std::vector<std::size_t> size(groups, 0), used(groups, 0);
  for (std::size_t k = 0; k < id.size(); ++k) {
    const auto c = static_cast<Index>(k);
    projectors[id[k]] += sys.right_vectors.col(c) * sys.left_vectors.col(c).adjoint();
    ++size[id[k]];
  }

  Frame f;
  f.offset = offset;
  f.right.resize(m.rows(), m.cols());
  for (Index n = 0; n < m.cols(); ++n) {
    const ComplexVector r = centre.right_vectors.col(n);
    std::size_t best = 0;
    double best_norm = -1.0;
    ComplexVector best_vec;
    for (std::size_t g = 0; g < groups; ++g) {
      ComplexVector v = projectors[g] * r;
      const double nv = v.norm();
      if (nv > best_norm) {
        best_norm = nv;
        best = g;
        best_vec = std::move(v);
      }
    }
    if (++used[best] > size[best]) throw TrackingFailure("qgt: two modes transported into one eigenvalue");
    f.right.col(n) = best_vec;
  }
  const double cond = condition_number(f.right);
  if (!(cond < options.ep_condition_threshold)) throw TrackingFailure("qgt: transported basis is degenerate");
  f.left = f.right.partialPivLu().inverse().adjoint();
  return f;
}

struct Derivatives {
  ComplexMatrix right;
  ComplexMatrix left;
};

// Central differences from frames at (+h, -h) and optionally (+h/2, -h/2).
Derivatives differentiate(const std::vector<Frame>& frames, double h) {
  auto central = [](const Frame& plus, const Frame& minus, double step) {
    return Derivatives{(plus.right - minus.right) / (2.0 * step), (plus.left - minus.left) / (2.0 * step)};
  };
  Derivatives d = central(frames[0], frames[1], h);
  if (frames.size() == 4) {
    const Derivatives half = central(frames[2], frames[3], 0.5 * h);
    d.right = (4.0 * half.right - d.right) / 3.0;
    d.left = (4.0 * half.left - d.left) / 3.0;
  }
  return d;
}

std::vector<Complex> assemble(const ComplexMatrix& r, const ComplexMatrix& l, const Derivatives& d) {
  std::vector<Complex> q(static_cast<std::size_t>(r.cols()));
  for (Index n = 0; n < r.cols(); ++n) {
    const Complex dldr = d.left.col(n).dot(d.right.col(n));
    const Complex dlr = d.left.col(n).dot(r.col(n));
    const Complex ldr = l.col(n).dot(d.right.col(n));
    q[static_cast<std::size_t>(n)] = dldr - dlr * ldr;
  }
  return q;
}

struct Gauge {
  std::vector<Complex> a, b, c;
  Complex chi(std::size_t n, double x) const { return a[n] + x * (b[n] + x * c[n]); }
};

Gauge random_gauge(std::size_t n, double omega, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(omega)),
                    static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(omega) >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Gauge g;
  for (auto* v : {&g.a, &g.b, &g.c}) {
    v->resize(n);
    for (auto& z : *v) z = Complex(u(rng), u(rng));
  }
  return g;
}

void regauge(const Gauge& g, double x, ComplexMatrix& r, ComplexMatrix& l) {
  for (Index n = 0; n < r.cols(); ++n) {
    const Complex e = std::exp(g.chi(static_cast<std::size_t>(n), x));
    r.col(n) *= e;
    l.col(n) /= std::conj(e);
  }
}

double default_step(double omega) { return 1e-6 * std::max(1.0, std::abs(omega)); }

}  // namespace

EigenSystem biorthonormal_modes(const ComplexMatrix& m, const ModeOptions& options) {
  EigOptions eo;
  eo.ill_condition_threshold = options.ep_condition_threshold;
  EigenSystem sys = eig(m, eo);
  if (sys.ill_conditioned)
    throw EpProximityError("eigenbasis condition number " + std::to_string(sys.condition_number) +
                               " exceeds the EP-proximity threshold",
                           sys.condition_number);
  fix_phases(sys.right_vectors);
  sys.left_vectors = sys.right_vectors.partialPivLu().inverse().adjoint();
  return sys;
}

double biorthonormality_error(const EigenSystem& modes) {
  const ComplexMatrix g = modes.left_vectors.adjoint() * modes.right_vectors;
  return (g - ComplexMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

QgtPoint qgt_point(const MatrixFamily& family, double omega, const QgtOptions& options) {
  if (!std::isfinite(omega)) throw ConfigError("qgt: drive value must be finite");
  if (options.step < 0 || !std::isfinite(options.step)) throw ConfigError("qgt: step must be positive");
  if (!(options.degeneracy_tol > 0) || !(options.gauge_tol > 0) || !(options.ep_condition_threshold > 1))
    throw ConfigError("qgt: tolerances must be positive");
  const double h = options.step > 0 ? options.step : default_step(omega);

  QgtPoint p;
  p.omega = omega;
  const ComplexMatrix m0 = family(omega);
  require_square(m0, "qgt");
  const auto n = static_cast<std::size_t>(m0.rows());
  p.q.assign(n, Complex(kNaN, kNaN));

  EigenSystem centre;
  try {
    ModeOptions mo;
    mo.ep_condition_threshold = options.ep_condition_threshold;
    centre = biorthonormal_modes(m0, mo);
  } catch (const EpProximityError& e) {
    const EigenSystem raw = eig(m0);
    p.eigenvalues = raw.eigenvalues;
    p.right_vectors = raw.right_vectors;
    p.condition = e.condition();
    p.flag = "ep_proximity";
    return p;
  }
  p.eigenvalues = centre.eigenvalues;
  p.right_vectors = centre.right_vectors;
  p.condition = centre.condition_number;

  // Steps below this lose every digit of the difference quotient.
  if (h < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(omega))) {
    p.flag = "step_underflow";
    return p;
  }

  std::vector<double> offsets{h, -h};
  if (options.richardson) offsets.insert(offsets.end(), {0.5 * h, -0.5 * h});
  std::vector<Frame> frames;
  try {
    for (double o : offsets) frames.push_back(transport(family(omega + o), centre, o, options));
  } catch (const EpProximityError& e) {
    p.flag = "ep_proximity";
    p.condition = std::max(p.condition, e.condition());
    return p;
  } catch (const TrackingFailure&) {
    p.flag = "tracking_failure";
    return p;
  }

  p.q = assemble(centre.right_vectors, centre.left_vectors, differentiate(frames, h));

  if (options.gauge_check) {
    const Gauge g = random_gauge(n, omega, options.gauge_seed);
    ComplexMatrix r0 = centre.right_vectors, l0 = centre.left_vectors;
    regauge(g, 0.0, r0, l0);
    std::vector<Frame> moved = frames;
    for (auto& f : moved) regauge(g, f.offset, f.right, f.left);
    const auto q2 = assemble(r0, l0, differentiate(moved, h));
    for (std::size_t k = 0; k < n; ++k)
      p.gauge_deviation = std::max(p.gauge_deviation, std::abs(q2[k] - p.q[k]) / std::max(1.0, std::abs(p.q[k])));
    if (!(p.gauge_deviation <= options.gauge_tol)) p.flag = "gauge_mismatch";
  }
  return p;
}

QgtComponent qgt_tensor(const MatrixFamily& family, double omega, std::size_t mode, const QgtOptions& options) {
  const QgtPoint p = qgt_point(family, omega, options);
  if (mode >= p.q.size()) throw ConfigError("qgt_tensor: mode index out of range");
  if (p.flag == "ep_proximity")
    throw EpProximityError("qgt_tensor: eigenbasis is numerically defective at this drive", p.condition);
  if (p.flag == "tracking_failure") throw NumericError("qgt_tensor: mode tracking failed across the difference step");
  if (p.flag == "step_underflow") throw NumericError("qgt_tensor: difference step underflows at this drive");
  if (p.flag == "gauge_mismatch")
    throw NumericError("qgt_tensor: result changed by " + std::to_string(p.gauge_deviation) +
                       " under a random gauge");
  return {p.q[mode], p.gauge_deviation};
}

namespace {

struct Candidate {
  double omega;
  double peak;
  double exponent;
  std::size_t mode;
};

// Fits log|g| = a - p log|omega - omega_c| through the finite points of
// k-2..k+2, scanning omega_c between the neighbours of k.
bool localize(const std::vector<double>& x, const std::vector<double>& g, std::size_t k, double& omega_c,
              double& p) {
  std::vector<std::size_t> pts;
  for (long d = -2; d <= 2; ++d) {
    const long j = static_cast<long>(k) + d;
    if (j < 0 || j >= static_cast<long>(x.size())) continue;
    const double v = std::abs(g[static_cast<std::size_t>(j)]);
    if (std::isfinite(v) && v > 0) pts.push_back(static_cast<std::size_t>(j));
  }
  if (pts.size() < 3) return false;
  const double lo = k > 0 ? x[k - 1] : x[k] - (x[k + 1] - x[k]);
  const double hi = k + 1 < x.size() ? x[k + 1] : x[k] + (x[k] - x[k - 1]);
  constexpr int kSteps = 2000;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 1; s < kSteps; ++s) {
    const double c = lo + (hi - lo) * s / kSteps;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool hit = false;
    for (std::size_t j : pts) {
      const double dx = std::abs(x[j] - c);
      if (dx == 0) {
        hit = true;
        break;
      }
      const double u = std::log(dx), v = std::log(std::abs(g[j]));
      sx += u;
      sy += v;
      sxx += u * u;
      sxy += u * v;
    }
    if (hit) continue;
    const double m = static_cast<double>(pts.size());
    const double den = m * sxx - sx * sx;
    if (den <= 0) continue;
    const double slope = (m * sxy - sx * sy) / den;
    const double icpt = (sy - slope * sx) / m;
    double res = 0;
    for (std::size_t j : pts) {
      const double e = icpt + slope * std::log(std::abs(x[j] - c)) - std::log(std::abs(g[j]));
      res += e * e;
    }
    if (res < best) {
      best = res;
      omega_c = c;
      p = -slope;
    }
  }
  return std::isfinite(best);
}

}  // namespace

QgtScan metric_scan(const MatrixFamily& family, const std::vector<double>& grid, const ScanOptions& options) {
  if (grid.size() < 3) throw ConfigError("metric_scan: grid needs at least three points");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ConfigError("metric_scan: grid must be strictly ascending");
  if (!(options.divergence_threshold > 0)) throw ConfigError("metric_scan: divergence threshold must be positive");

  std::vector<QgtPoint> points(grid.size());
  for_each_index(grid.size(), options.execution,
                 [&](std::size_t k) { points[k] = qgt_point(family, grid[k], options.qgt); });

  QgtScan scan;
  scan.omegas = grid;
  scan.n_modes = points[0].eigenvalues.size();
  const std::size_t n = scan.n_modes;
  scan.eigenvalues.assign(grid.size(), std::vector<Complex>(n));
  scan.metric.assign(grid.size(), std::vector<double>(n, kNaN));
  scan.condition.resize(grid.size());
  scan.flags.resize(grid.size());

  // label -> column of the previous point
  std::vector<std::size_t> column(n);
  std::iota(column.begin(), column.end(), 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const QgtPoint& p = points[k];
    if (p.eigenvalues.size() != n) throw ConfigError("metric_scan: family changes dimension along the grid");
    if (k > 0) {
      const ComplexMatrix& prev = points[k - 1].right_vectors;
      std::vector<std::vector<double>> cost(n, std::vector<double>(n));
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          cost[a][b] = -std::abs(prev.col(static_cast<Index>(column[a])).dot(p.right_vectors.col(static_cast<Index>(b))));
      column = min_cost_assignment(cost);
    }
    for (std::size_t a = 0; a < n; ++a) {
      scan.eigenvalues[k][a] = p.eigenvalues[column[a]];
      scan.metric[k][a] = p.q[column[a]].real();
    }
    scan.condition[k] = p.condition;
    scan.flags[k] = p.flag;
  }

  // Peaks are taken on the envelope max_n |g_n|: labels inside an exactly
  // degenerate subspace may swap between grid points, which breaks single
  // mode series into spurious local maxima.
  std::vector<Candidate> found;
  const double spacing = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  std::vector<double> env(grid.size(), kNaN);
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t a = 0; a < n; ++a) {
      const double v = std::abs(scan.metric[k][a]);
      if (std::isfinite(v) && !(v <= env[k])) env[k] = v;
    }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = env[k];
    if (!(v > options.divergence_threshold)) continue;
    const bool left_ok = k == 0 || !(env[k - 1] > v);
    const bool right_ok = k + 1 == grid.size() || !(env[k + 1] > v);
    if (!left_ok || !right_ok) continue;
    double wc = grid[k], p = 0;
    if (!localize(grid, env, k, wc, p) || !(p > options.min_exponent)) continue;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t j = k > 0 ? k - 1 : 0; j <= std::min(k + 1, grid.size() - 1); ++j)
        if (std::abs(scan.metric[j][a]) > options.divergence_threshold) {
          found.push_back({wc, v, p, a});
          break;
        }
  }
  std::sort(found.begin(), found.end(), [](const Candidate& x, const Candidate& y) { return x.omega < y.omega; });
  std::size_t i = 0;
  while (i < found.size()) {
    std::size_t j = i + 1;
    while (j < found.size() && found[j].omega - found[j - 1].omega <= 2.0 * spacing) ++j;
    CriticalPoint cp;
    std::size_t lead = i;
    for (std::size_t t = i; t < j; ++t) {
      if (found[t].peak > found[lead].peak) lead = t;
      cp.modes.push_back(found[t].mode);
    }
    cp.omega = found[lead].omega;
    cp.exponent = found[lead].exponent;
    cp.peak_metric = found[lead].peak;
    std::sort(cp.modes.begin(), cp.modes.end());
    cp.modes.erase(std::unique(cp.modes.begin(), cp.modes.end()), cp.modes.end());
    scan.critical_points.push_back(std::move(cp));
    i = j;
  }
  return scan;
}

}  // namespace mbep
