#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mbep/exact.hpp"
#include "mbep/jordan.hpp"
#include "mbep/model.hpp"
#include "mbep/parallel.hpp"
#include "mbep/polynomial.hpp"

namespace mbep {

// ---- closed forms ------------------------------------------------------------
// Principal square and cube roots. In the Cardano form the cube root is taken
// of whichever of nu +- sqrt(nu^2 - q^3) is larger in modulus.

std::array<Complex, 4> qubit_case_i_eigenvalues(double gamma_i, double gamma_e, double omega, double gamma);
std::array<Complex, 4> qubit_case_ii_eigenvalues(double gamma_i, double gamma_e, double omega, double gamma);
// gamma_i is pinned to (gamma_h + gamma_e)/2.
std::array<Complex, 9> qutrit_case_ii_eigenvalues(double gamma_h, double gamma_e, double omega, double gamma);

struct QubitCriticalDrives {
  double liouvillian_ep;   // |gamma_i - gamma_e| / 4
  double lindbladian_ep;   // sqrt((gamma_i - gamma_e)^2 + 4 Gamma^2) / 4
};
QubitCriticalDrives qubit_case_ii_critical_drives(double gamma_i, double gamma_e, double gamma);

struct QutritCriticalDrives {
  double liouvillian_ep;   // |gt| / (2 sqrt 2), gt = (gamma_h - gamma_e)/2
  double lindbladian_ep1;  // sqrt(Gamma^2 + gt^2) / (2 sqrt 2)
  double lindbladian_ep2;  // sqrt(4 Gamma^2 + gt^2) / (2 sqrt 2)
};
QutritCriticalDrives qutrit_case_ii_critical_drives(double gamma_h, double gamma_e, double gamma);

struct QutritSplitting {
  Complex lambda6;                // -gamma_i - Gamma
  std::array<Complex, 2> lambda78;  // -gamma_i - Gamma -/+ sqrt(Gamma (Gamma + gamma_h - gamma_e)) / 2
  Complex lambda9;                // leading order: -gamma_i - 16 Gamma / 15
  std::array<Complex, 5> ring;    // leading order, r = 1..5
  double ring_radius;
};
QutritSplitting qutrit_case_i_splitting(double gamma_h, double gamma_e, double gamma);

// ---- exact rate families -------------------------------------------------------

// One jump term of an exact family. kron_weight rescales the recycling term
// L (x) L^* only; it represents a diagonal similarity under which jump^dag jump
// is invariant, which lets irrational drives be absorbed into a rational frame.
struct ExactJumpTerm {
  ExactComplexMatrix jump;  // excited subspace
  Rational kron_weight = 1;
};

// L_eff(Gamma) = base + Gamma * slope.
struct ExactRateFamily {
  ExactComplexMatrix base;
  ExactComplexMatrix slope;
  ExactComplexMatrix at(const Rational& gamma) const;
};

ExactRateFamily exact_rate_family(const ExactComplexMatrix& h_eff0, const std::vector<ExactJumpTerm>& jumps);

struct ExactPresetParams {
  Rational gamma_i;
  Rational gamma_e;
  Rational gamma_h;
  std::optional<Rational> omega;          // qubits
  std::optional<Rational> omega_squared;  // qutrits
};

// Decimal inputs become the rationals they were written as; the qutrit EP
// drive enters through omega^2 = (gamma_h - gamma_e)^2 / 32.
ExactPresetParams exact_preset_params(Preset p, const PresetParams& params);
ExactRateFamily exact_preset_family(Preset p, const ExactPresetParams& params);

// det(lambda - L_eff(Gamma)) by Faddeev-LeVerrier over rate polynomials.
GammaPolynomial char_poly_in_gamma(const ExactRateFamily& family);

// ---- Newton diagram ----------------------------------------------------------------

struct NewtonPoint {
  std::size_t k;
  std::size_t beta;    // lowest Gamma power in a_k
  ExactComplex alpha;  // its coefficient
};

struct NewtonSegment {
  Rational slope;
  std::size_t k_begin;
  std::size_t k_end;
  // alpha_k for points on the segment, as coefficients of mu^(k_end - k), leading first
  std::vector<ExactComplex> polynomial;
  std::size_t span() const { return k_end - k_begin; }
  std::vector<Complex> roots() const;
  // Only for span 1.
  std::optional<ExactComplex> exact_root() const;
};

struct NewtonDiagram {
  std::size_t degree = 0;              // after removing zero roots
  std::size_t zero_roots_removed = 0;  // trailing a_k identically zero
  std::vector<NewtonPoint> points;
  std::vector<NewtonSegment> segments;
};

NewtonDiagram newton_diagram(const GammaPolynomial& p);

// ---- splitting exponents -------------------------------------------------------------

MatrixFamily lindbladian_eff_family(SpecFamily family);

struct SplittingOptions {
  std::size_t substeps = 8;        // tracking points per grid interval
  double ambiguity_ratio = 0.5;    // best / second-best match distance that raises a flag
  StructureOptions structure;      // for the Gamma = 0 reference clusters
  Execution execution = Execution::serial;
};

struct BranchFit {
  double exponent = 0.0;
  Complex coefficient;   // (lambda - reference) / Gamma^exponent at the smallest Gamma
  double r2 = 0.0;
  Complex reference;     // unperturbed eigenvalue the branch emanates from
  bool ambiguous = false;
  std::vector<Complex> trajectory;  // eigenvalue at each grid point, grid order
};

struct SplittingFit {
  std::vector<double> gammas;
  std::vector<BranchFit> branches;  // ordered by exponent, then reference
  std::vector<std::string> warnings;
};

SplittingFit splitting_exponent_fit(const MatrixFamily& family, const std::vector<double>& gamma_grid,
                                    const SplittingOptions& options = {});

std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace mbep
