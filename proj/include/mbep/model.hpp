#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbep/linalg.hpp"

namespace mbep {

// Coherent drive between excited levels i < j (1-based, level 1 is ground).
struct Drive {
  int i = 2;
  int j = 3;
  double omega = 0.0;
};

// Jump operator on the full N-level space; row and column 1 must vanish.
struct IntraJump {
  ComplexMatrix matrix;
  double rate = 0.0;
};

struct OpenSystemSpec {
  int n_levels = 2;
  std::vector<double> detunings;   // levels 2..N
  std::vector<Drive> drives;
  std::vector<double> sink_rates;  // decay k -> 1 for levels 2..N
  std::vector<IntraJump> intra_jumps;
  std::vector<std::string> level_names;  // optional, size N

  // Throws ConfigError describing the first violated invariant.
  void validate() const;
  std::string level_name(int level) const;  // 1-based
};

struct LindbladParts {
  ComplexMatrix hamiltonian;       // N x N
  ComplexMatrix h_eff;             // (N-1) x (N-1), includes -i/2 sum of decay terms
  ComplexMatrix liouvillian_eff;   // (-i h_eff) (x) I + I (x) (i h_eff^*)
  ComplexMatrix lindbladian_eff;   // liouvillian_eff plus intra-jump recycling terms
  ComplexMatrix full_lindbladian;  // N^2 x N^2, naive ordering
  ComplexMatrix projector;         // P (x) P, P projects onto levels 2..N
};

LindbladParts build_parts(const OpenSystemSpec& spec);

// |m><n| (0-based) -> m*dim + n.
constexpr std::size_t vec_index(std::size_t m, std::size_t n, std::size_t dim) { return m * dim + n; }
ComplexVector vectorize(const ComplexMatrix& rho);
ComplexMatrix unvectorize(const ComplexVector& v, std::size_t dim);

// perm[new_index] = naive index, excited-excited pairs first.
std::vector<std::size_t> excited_first_permutation(int n_levels);
// Returns P M P^T for the permutation above.
ComplexMatrix permute_symmetric(const ComplexMatrix& m, const std::vector<std::size_t>& perm);

// Basis density matrix |level><level| of an n-level system (1-based level).
ComplexMatrix pure_state(int n_levels, int level);

// --- presets ---------------------------------------------------------------

enum class Preset { qubit_i, qubit_ii, qutrit_i, qutrit_ii };

Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset p);
bool is_qutrit(Preset p);

struct PresetParams {
  std::optional<double> gamma_i;  // qutrit default: (gamma_h + gamma_e)/2
  double gamma_e = 0.9;
  double gamma_h = 0.4;
  std::optional<double> omega;    // default: the EP drive
  double gamma_cap = 0.0;         // intra-jump rate
};

// Default parameter sets: qubit (0.2, 0.9), qutrit (0.4, 0.2).
PresetParams default_params(Preset p);

double resolved_gamma_i(Preset p, const PresetParams& params);
double resolved_omega(Preset p, const PresetParams& params);

OpenSystemSpec preset(Preset p, const PresetParams& params);

// The jump operator of each preset on the excited subspace, unit rate.
std::vector<ComplexMatrix> preset_excited_jumps(Preset p);

// Dimensionless time unit: (gamma_i + gamma_e)/2 for qubits, gamma_i for qutrits.
double preset_time_scale(Preset p, const PresetParams& params);

struct QubitEp {
  double omega;
  Complex eigenvalue;
};
QubitEp qubit_ep_parameters(double gamma_i, double gamma_e);

struct QutritEp {
  double gamma_i;
  double omega;
  Complex eigenvalue;
};
QutritEp qutrit_ep_parameters(double gamma_h, double gamma_e);

using SpecFamily = std::function<OpenSystemSpec(double)>;

// Preset with the intra-jump rate as the free parameter.
SpecFamily preset_rate_family(Preset p, PresetParams params);
// Preset with the drive amplitude as the free parameter.
SpecFamily preset_drive_family(Preset p, PresetParams params);

}  // namespace mbep
