#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mbep/linalg.hpp"
#include "mbep/parallel.hpp"

namespace mbep {

struct ModeOptions {
  double ep_condition_threshold = kEpConditionThreshold;
};

// Right vectors unit-norm with the largest component real positive; left
// vectors from the inverse of the right basis. Throws EpProximityError when
// the right basis condition number exceeds the threshold.
EigenSystem biorthonormal_modes(const ComplexMatrix& m, const ModeOptions& options = {});

// max |l_m^H r_n - delta_mn|
double biorthonormality_error(const EigenSystem& modes);

struct QgtOptions {
  double step = 0.0;               // 0: 1e-6 * max(1, |omega|)
  bool richardson = false;         // combine steps h and h/2
  double degeneracy_tol = 1e-7;    // groups shifted eigenvalues into spectral projectors
  double ep_condition_threshold = kEpConditionThreshold;
  bool gauge_check = true;
  double gauge_tol = 1e-6;
  std::uint64_t gauge_seed = 0x5eed;
};

// All modes at one drive value. Q_n = <dL_n|dR_n> - <dL_n|R_n><L_n|dR_n>.
struct QgtPoint {
  double omega = 0.0;
  std::vector<Complex> eigenvalues;  // spectral order
  ComplexMatrix right_vectors;
  std::vector<Complex> q;            // per mode; NaN when flagged
  double condition = 0.0;
  double gauge_deviation = 0.0;      // worst relative change under a random gauge
  std::string flag = "ok";           // ok | ep_proximity | tracking_failure | gauge_mismatch
};

QgtPoint qgt_point(const MatrixFamily& family, double omega, const QgtOptions& options = {});

struct QgtComponent {
  Complex value;
  double gauge_deviation = 0.0;
};

// One component Q_{n,11}; throws on EP proximity or tracking failure.
QgtComponent qgt_tensor(const MatrixFamily& family, double omega, std::size_t mode, const QgtOptions& options = {});

struct CriticalPoint {
  double omega = 0.0;
  double exponent = 0.0;            // fitted p in |g| ~ |omega - omega_c|^-p
  double peak_metric = 0.0;         // largest |g| seen near omega_c
  std::vector<std::size_t> modes;   // participating mode labels
};

struct ScanOptions {
  QgtOptions qgt;
  double divergence_threshold = 1e4;
  double min_exponent = 0.5;
  Execution execution = Execution::serial;
};

struct QgtScan {
  std::vector<double> omegas;
  std::size_t n_modes = 0;
  // [point][label]
  std::vector<std::vector<Complex>> eigenvalues;
  std::vector<std::vector<double>> metric;
  std::vector<double> condition;
  std::vector<std::string> flags;
  std::vector<CriticalPoint> critical_points;
};

QgtScan metric_scan(const MatrixFamily& family, const std::vector<double>& grid, const ScanOptions& options = {});

}  // namespace mbep
