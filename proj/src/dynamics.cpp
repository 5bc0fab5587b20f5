#include "mbep/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mbep/errors.hpp"
#include "mbep/model.hpp"

namespace mbep {

namespace {

using Index = Eigen::Index;

constexpr double kImagResidue = 1e-10;

std::size_t density_dim(const ComplexMatrix& generator, const ComplexMatrix& rho0) {
  require_square(generator, "evolve");
  const auto d = static_cast<std::size_t>(rho0.rows());
  if (rho0.rows() != rho0.cols()) throw ConfigError("initial state must be square");
  if (static_cast<std::size_t>(generator.rows()) != d * d)
    throw ConfigError("generator is " + std::to_string(generator.rows()) + "x" + std::to_string(generator.rows()) +
                      " but the state needs dimension " + std::to_string(d * d));
  return d;
}

TrajectoryTable empty_table(std::size_t d, const std::vector<double>& times, const EvolveOptions& options) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k])) throw ConfigError("time grid has non-finite entries");
    if (k > 0 && !(times[k] > times[k - 1])) throw ConfigError("time grid must be strictly ascending");
  }
  if (!(options.time_scale > 0)) throw ConfigError("time_scale must be positive");
  TrajectoryTable t;
  t.times = times;
  t.time_scale = options.time_scale;
  if (options.levels.empty()) {
    for (std::size_t l = 1; l <= d; ++l) t.levels.push_back(std::to_string(l));
  } else {
    if (options.levels.size() != d) throw ConfigError("level label count does not match the state dimension");
    t.levels = options.levels;
  }
  t.populations.assign(d, std::vector<double>(times.size()));
  t.prefactor.assign(d, std::vector<double>(times.size()));
  if (options.keep_states) t.states.resize(times.size());
  return t;
}

// Writes column k of the table from e^{(L + lambda_0) t} vec(rho0).
void record(TrajectoryTable& table, std::size_t k, const ComplexVector& shifted_state, std::size_t d, bool keep) {
  const ComplexMatrix rho = unvectorize(shifted_state, d);
  const double back = std::exp(-table.decay_rate * table.times[k]);
  for (std::size_t l = 0; l < d; ++l) {
    const Complex z = rho(static_cast<Index>(l), static_cast<Index>(l));
    if (std::abs(z.imag()) > kImagResidue * std::max(1.0, std::abs(z.real())))
      throw NumericError("population of level " + table.levels[l] + " has imaginary residue " +
                         std::to_string(z.imag()));
    table.prefactor[l][k] = z.real();
    table.populations[l][k] = back * z.real();
  }
  if (keep) table.states[k] = back * rho;
}

}  // namespace

void validate_density_matrix(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw ConfigError("density matrix must be square and non-empty");
  if (!all_finite(rho)) throw ConfigError("density matrix has non-finite entries");
  const double scale = std::max(1.0, rho.norm());
  if ((rho - rho.adjoint()).norm() > 1e-10 * scale) throw ConfigError("initial state is not Hermitian");
  const Complex tr = rho.trace();
  if (tr.real() > 1.0 + 1e-10) throw ConfigError("initial state has trace above one");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw ConfigError("initial state is not positive semidefinite");
}

std::vector<double> linear_grid(double t0, double t1, std::size_t count) {
  if (count < 2 || !(t1 > t0)) throw ConfigError("linear_grid: need t1 > t0 and at least two points");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(count - 1);
  out.back() = t1;
  return out;
}

TrajectoryTable evolve(const ComplexMatrix& generator, const ComplexMatrix& rho0, const std::vector<double>& times,
                       const EvolveOptions& options) {
  const std::size_t d = density_dim(generator, rho0);
  validate_density_matrix(rho0);
  TrajectoryTable table = empty_table(d, times, options);

  // A defective eigenvalue is smeared by rounding into a ring of radius
  // eps^(1/k); the cluster mean is accurate to rounding, its members are not.
  double top = -std::numeric_limits<double>::infinity();
  if (generator.rows() > 0)
    for (const auto& c : detect_structure(generator).clusters) top = std::max(top, c.eigenvalue.real());
  table.decay_rate = generator.rows() > 0 ? -top : 0.0;

  const ComplexMatrix shifted = generator + table.decay_rate * ComplexMatrix::Identity(generator.rows(), generator.cols());
  const ComplexVector v0 = vectorize(rho0);
  for_each_index(times.size(), options.execution, [&](std::size_t k) {
    record(table, k, matrix_exp(shifted, times[k]) * v0, d, options.keep_states);
  });
  return table;
}

TrajectoryTable jordan_evolve(const std::vector<JordanChainSet>& chains, const ComplexMatrix& rho0,
                              const std::vector<double>& times, const EvolveOptions& options) {
  const auto d = static_cast<std::size_t>(rho0.rows());
  if (rho0.rows() != rho0.cols()) throw ConfigError("initial state must be square");
  validate_density_matrix(rho0);
  const JordanBasis basis = assemble_basis(chains, d * d);
  if (!(basis.condition_number < 1e12))
    throw EpProximityError("jordan_evolve: chain basis is numerically singular", basis.condition_number);
  TrajectoryTable table = empty_table(d, times, options);

  double top = -std::numeric_limits<double>::infinity();
  for (const auto& set : chains)
    if (set.vector_count() > 0) top = std::max(top, set.eigenvalue.real());
  table.decay_rate = -top;

  const ComplexVector coords = basis.basis.partialPivLu().solve(vectorize(rho0));

  for_each_index(times.size(), options.execution, [&](std::size_t k) {
    const double t = times[k];
    ComplexVector b(coords.size());
    Index offset = 0;
    for (const auto& set : chains) {
      const Complex growth = std::exp((set.eigenvalue + table.decay_rate) * t);
      for (const auto& chain : set.chains) {
        const auto len = static_cast<Index>(chain.size());
        // e^{J t} on one block: upper Toeplitz with t^j / j!.
        for (Index p = 0; p < len; ++p) {
          Complex acc = 0.0;
          double term = 1.0;
          for (Index j = p; j < len; ++j) {
            acc += term * coords(offset + j);
            term *= t / static_cast<double>(j - p + 1);
          }
          b(offset + p) = growth * acc;
        }
        offset += len;
      }
    }
    record(table, k, basis.basis * b, d, options.keep_states);
  });
  return table;
}

PrefactorFit prefactor_degree(const TrajectoryTable& table, std::size_t level, const PrefactorOptions& options) {
  if (level >= table.prefactor.size()) throw ConfigError("prefactor_degree: level index out of range");
  if (!(options.window_fraction > 0 && options.window_fraction <= 1))
    throw ConfigError("prefactor_degree: window_fraction must lie in (0, 1]");
  const std::size_t n = table.times.size();
  const auto first = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - options.window_fraction)));
  const std::size_t count = n - std::min(first, n);
  if (count < options.max_degree + 2) throw ConfigError("prefactor_degree: window holds too few time points");

  const double t_lo = table.tau(first), t_hi = table.tau(n - 1);
  const double mid = 0.5 * (t_lo + t_hi), half = 0.5 * (t_hi - t_lo);
  Eigen::VectorXd y(static_cast<Index>(count));
  Eigen::VectorXd s(static_cast<Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    y(static_cast<Index>(k)) = table.prefactor[level][first + k];
    s(static_cast<Index>(k)) = (table.tau(first + k) - mid) / half;
  }
  const double ynorm = y.norm();

  PrefactorFit best;
  best.residual = std::numeric_limits<double>::infinity();
  best.window_begin = t_lo;
  best.window_end = t_hi;
  for (std::size_t deg = 0; deg <= options.max_degree; ++deg) {
    Eigen::MatrixXd v(static_cast<Index>(count), static_cast<Index>(deg + 1));
    for (Index r = 0; r < v.rows(); ++r) {
      double p = 1.0;
      for (Index c = 0; c < v.cols(); ++c, p *= s(r)) v(r, c) = p;
    }
    const Eigen::VectorXd b = v.householderQr().solve(y);
    const double res = ynorm > 0 ? (v * b - y).norm() / ynorm : 0.0;
    if (res < best.residual) {
      best.degree = deg;
      best.residual = res;
      // Expand sum b_j ((tau - mid)/half)^j in powers of tau.
      std::vector<double> c(deg + 1, 0.0);
      for (std::size_t j = 0; j <= deg; ++j) {
        const double bj = b(static_cast<Index>(j)) / std::pow(half, static_cast<double>(j));
        double binom = 1.0;
        for (std::size_t i = 0; i <= j; ++i) {
          c[i] += bj * binom * std::pow(-mid, static_cast<double>(j - i));
          binom = binom * static_cast<double>(j - i) / static_cast<double>(i + 1);
        }
      }
      best.coefficients = std::move(c);
    }
    if (res < options.rel_tol) return best;
  }
  std::ostringstream os;
  os << "prefactor_degree: no polynomial up to degree " << options.max_degree << " fits level "
     << table.levels[level] << " to " << options.rel_tol << " over tau in [" << t_lo << ", " << t_hi
     << "] (best residual " << best.residual << " at degree " << best.degree
     << "); subdominant exponentials still contribute, so widen the time range or move the window later";
  throw NumericError(os.str());
}

}  // namespace mbep
