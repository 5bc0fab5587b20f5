#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mbep/jordan.hpp"
#include "mbep/linalg.hpp"
#include "mbep/parallel.hpp"

namespace mbep {

struct TrajectoryTable {
  std::vector<double> times;                     // raw t, ascending
  double time_scale = 1.0;                       // tau = time_scale * t
  std::vector<std::string> levels;               // column labels
  std::vector<std::vector<double>> populations;  // [level][time]
  double decay_rate = 0.0;                       // lambda_0 = -max Re(spectrum)
  std::vector<std::vector<double>> prefactor;    // e^{lambda_0 t} populations
  std::vector<ComplexMatrix> states;             // filled when requested

  double tau(std::size_t k) const { return time_scale * times[k]; }
};

struct EvolveOptions {
  double time_scale = 1.0;
  std::vector<std::string> levels;  // default "1".."dim"
  bool keep_states = false;
  Execution execution = Execution::serial;
};

// rho(t) = unvec(e^{L t} vec(rho0)).
TrajectoryTable evolve(const ComplexMatrix& generator, const ComplexMatrix& rho0, const std::vector<double>& times,
                       const EvolveOptions& options = {});

// Same trajectory from a complete set of Jordan chains of the generator.
// Throws EpProximityError when the chain basis is numerically singular.
TrajectoryTable jordan_evolve(const std::vector<JordanChainSet>& chains, const ComplexMatrix& rho0,
                              const std::vector<double>& times, const EvolveOptions& options = {});

struct PrefactorFit {
  std::size_t degree = 0;
  double residual = 0.0;             // relative 2-norm over the window
  std::vector<double> coefficients;  // ascending powers of tau
  double window_begin = 0.0;         // tau range used
  double window_end = 0.0;
};

struct PrefactorOptions {
  double window_fraction = 0.5;  // late-time share of the table
  std::size_t max_degree = 8;
  double rel_tol = 1e-6;
};

// Smallest polynomial degree in tau that fits the prefactor of one level over
// the late-time window. Throws NumericError (with guidance) if none does.
PrefactorFit prefactor_degree(const TrajectoryTable& table, std::size_t level, const PrefactorOptions& options = {});

// n points from t0 to t1 inclusive.
std::vector<double> linear_grid(double t0, double t1, std::size_t count);

// Hermitian, positive semidefinite, trace at most one (tolerance 1e-10).
void validate_density_matrix(const ComplexMatrix& rho);

}  // namespace mbep
