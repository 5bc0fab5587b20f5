#include "mbep/model.hpp"

#include <cmath>
#include <string>

#include "mbep/errors.hpp"

namespace mbep {

namespace {

using Index = Eigen::Index;

std::string level_str(int n) { return std::to_string(n); }

bool finite(double x) { return std::isfinite(x); }

ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

// rate * (L (x) L^* - 1/2 (L^dag L (x) I + I (x) L^T L^*))
ComplexMatrix dissipator(const ComplexMatrix& l, double rate) {
  const Index n = l.rows();
  const ComplexMatrix ldl = l.adjoint() * l;
  return rate * (kron_product(l, l.conjugate()) -
                 0.5 * (kron_product(ldl, identity(n)) + kron_product(identity(n), ldl.conjugate())));
}

}  // namespace

std::string OpenSystemSpec::level_name(int level) const {
  if (level >= 1 && static_cast<std::size_t>(level) <= level_names.size()) return level_names[level - 1];
  return level_str(level);
}

void OpenSystemSpec::validate() const {
  if (n_levels < 2) throw ConfigError("n_levels must be at least 2, got " + level_str(n_levels));
  const auto d = static_cast<std::size_t>(n_levels - 1);
  if (detunings.size() != d)
    throw ConfigError("detunings must list " + std::to_string(d) + " values (levels 2..N), got " +
                      std::to_string(detunings.size()));
  if (sink_rates.size() != d)
    throw ConfigError("sink_rates must list " + std::to_string(d) + " values (levels 2..N), got " +
                      std::to_string(sink_rates.size()));
  for (double x : detunings)
    if (!finite(x)) throw ConfigError("detunings must be finite");
  for (double g : sink_rates)
    if (!finite(g) || g < 0) throw ConfigError("sink rates must be finite and non-negative");
  for (const auto& dr : drives) {
    if (dr.i < 2 || dr.j > n_levels || dr.i >= dr.j)
      throw ConfigError("drive (" + level_str(dr.i) + "," + level_str(dr.j) +
                        ") must couple excited levels with 2 <= i < j <= N");
    if (!finite(dr.omega)) throw ConfigError("drive amplitude must be finite");
  }
  for (std::size_t k = 0; k < intra_jumps.size(); ++k) {
    const auto& jump = intra_jumps[k];
    const std::string tag = "intra_jumps[" + std::to_string(k) + "]";
    if (jump.matrix.rows() != n_levels || jump.matrix.cols() != n_levels)
      throw ConfigError(tag + ": matrix must be " + level_str(n_levels) + "x" + level_str(n_levels));
    if (!all_finite(jump.matrix)) throw ConfigError(tag + ": non-finite matrix entry");
    if (!finite(jump.rate) || jump.rate < 0) throw ConfigError(tag + ": rate must be finite and non-negative");
    for (Index c = 0; c < n_levels; ++c)
      if (jump.matrix(0, c) != Complex(0) || jump.matrix(c, 0) != Complex(0))
        throw ConfigError(tag + ": row and column of the ground level must vanish");
  }
  if (!level_names.empty() && level_names.size() != static_cast<std::size_t>(n_levels))
    throw ConfigError("level_names must have n_levels entries");
}

LindbladParts build_parts(const OpenSystemSpec& spec) {
  spec.validate();
  const Index n = spec.n_levels;
  const Index d = n - 1;
  const Complex I(0.0, 1.0);

  LindbladParts parts;
  parts.hamiltonian = ComplexMatrix::Zero(n, n);
  for (Index k = 1; k < n; ++k) parts.hamiltonian(k, k) = spec.detunings[static_cast<std::size_t>(k - 1)];
  for (const auto& dr : spec.drives) {
    parts.hamiltonian(dr.i - 1, dr.j - 1) += dr.omega;
    parts.hamiltonian(dr.j - 1, dr.i - 1) += dr.omega;
  }

  const ComplexMatrix& h = parts.hamiltonian;
  parts.full_lindbladian = -I * (kron_product(h, identity(n)) - kron_product(identity(n), h.transpose()));
  for (Index k = 1; k < n; ++k) {
    ComplexMatrix sink = ComplexMatrix::Zero(n, n);
    sink(0, k) = 1.0;
    parts.full_lindbladian += dissipator(sink, spec.sink_rates[static_cast<std::size_t>(k - 1)]);
  }
  for (const auto& jump : spec.intra_jumps) parts.full_lindbladian += dissipator(jump.matrix, jump.rate);

  parts.h_eff = h.bottomRightCorner(d, d);
  for (Index k = 0; k < d; ++k) parts.h_eff(k, k) -= 0.5 * I * spec.sink_rates[static_cast<std::size_t>(k)];
  for (const auto& jump : spec.intra_jumps) {
    const ComplexMatrix l = jump.matrix.bottomRightCorner(d, d);
    parts.h_eff -= 0.5 * I * jump.rate * (l.adjoint() * l);
  }

  parts.liouvillian_eff = kron_sum(-I * parts.h_eff, I * parts.h_eff.conjugate());
  parts.lindbladian_eff = parts.liouvillian_eff;
  for (const auto& jump : spec.intra_jumps) {
    const ComplexMatrix l = jump.matrix.bottomRightCorner(d, d);
    parts.lindbladian_eff += jump.rate * kron_product(l, l.conjugate());
  }

  ComplexMatrix p = identity(n);
  p(0, 0) = 0.0;
  parts.projector = kron_product(p, p);
  return parts;
}

ComplexVector vectorize(const ComplexMatrix& rho) {
  const Index dim = rho.rows();
  if (rho.cols() != dim) throw ConfigError("vectorize: density matrix must be square");
  ComplexVector v(dim * dim);
  for (Index m = 0; m < dim; ++m)
    for (Index k = 0; k < dim; ++k) v(m * dim + k) = rho(m, k);
  return v;
}

ComplexMatrix unvectorize(const ComplexVector& v, std::size_t dim) {
  const auto d = static_cast<Index>(dim);
  if (v.size() != d * d) throw ConfigError("unvectorize: length is not dim^2");
  ComplexMatrix rho(d, d);
  for (Index m = 0; m < d; ++m)
    for (Index k = 0; k < d; ++k) rho(m, k) = v(m * d + k);
  return rho;
}

std::vector<std::size_t> excited_first_permutation(int n_levels) {
  if (n_levels < 1) throw ConfigError("excited_first_permutation: n_levels must be positive");
  const auto n = static_cast<std::size_t>(n_levels);
  std::vector<std::size_t> perm;
  perm.reserve(n * n);
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t k = 1; k < n; ++k) perm.push_back(vec_index(m, k, n));
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k)
      if (m == 0 || k == 0) perm.push_back(vec_index(m, k, n));
  return perm;
}

ComplexMatrix permute_symmetric(const ComplexMatrix& m, const std::vector<std::size_t>& perm) {
  if (static_cast<Index>(perm.size()) != m.rows() || m.rows() != m.cols())
    throw ConfigError("permute_symmetric: permutation size mismatch");
  ComplexMatrix out(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      out(r, c) = m(static_cast<Index>(perm[static_cast<std::size_t>(r)]),
                    static_cast<Index>(perm[static_cast<std::size_t>(c)]));
  return out;
}

ComplexMatrix pure_state(int n_levels, int level) {
  if (level < 1 || level > n_levels) throw ConfigError("pure_state: level out of range");
  ComplexMatrix rho = ComplexMatrix::Zero(n_levels, n_levels);
  rho(level - 1, level - 1) = 1.0;
  return rho;
}

// --- presets ---------------------------------------------------------------

Preset parse_preset(std::string_view name) {
  if (name == "qubit_i") return Preset::qubit_i;
  if (name == "qubit_ii") return Preset::qubit_ii;
  if (name == "qutrit_i") return Preset::qutrit_i;
  if (name == "qutrit_ii") return Preset::qutrit_ii;
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected qubit_i, qubit_ii, qutrit_i, qutrit_ii)");
}

std::string_view preset_name(Preset p) {
  switch (p) {
    case Preset::qubit_i: return "qubit_i";
    case Preset::qubit_ii: return "qubit_ii";
    case Preset::qutrit_i: return "qutrit_i";
    case Preset::qutrit_ii: return "qutrit_ii";
  }
  return "?";
}

bool is_qutrit(Preset p) { return p == Preset::qutrit_i || p == Preset::qutrit_ii; }

PresetParams default_params(Preset p) {
  PresetParams out;
  if (is_qutrit(p)) {
    out.gamma_h = 0.4;
    out.gamma_e = 0.2;
  } else {
    out.gamma_i = 0.2;
    out.gamma_e = 0.9;
  }
  return out;
}

double resolved_gamma_i(Preset p, const PresetParams& params) {
  if (params.gamma_i) return *params.gamma_i;
  if (is_qutrit(p)) return 0.5 * (params.gamma_h + params.gamma_e);
  throw ConfigError("qubit presets need gamma_i");
}

double resolved_omega(Preset p, const PresetParams& params) {
  if (params.omega) return *params.omega;
  if (is_qutrit(p)) return qutrit_ep_parameters(params.gamma_h, params.gamma_e).omega;
  return qubit_ep_parameters(resolved_gamma_i(p, params), params.gamma_e).omega;
}

std::vector<ComplexMatrix> preset_excited_jumps(Preset p) {
  const Complex I(0.0, 1.0);
  switch (p) {
    case Preset::qubit_i: {
      ComplexMatrix l = ComplexMatrix::Zero(2, 2);
      l(1, 0) = 1.0;  // |e><i|
      return {l};
    }
    case Preset::qubit_ii: {
      ComplexMatrix l = ComplexMatrix::Zero(2, 2);
      l(0, 1) = -I;
      l(1, 0) = I;
      return {l};
    }
    case Preset::qutrit_i: {
      // levels h, i, e
      ComplexMatrix ih = ComplexMatrix::Zero(3, 3), eh = ComplexMatrix::Zero(3, 3), ei = ComplexMatrix::Zero(3, 3);
      ih(1, 0) = 1.0;
      eh(2, 0) = 1.0;
      ei(2, 1) = 1.0;
      return {ih, eh, ei};
    }
    case Preset::qutrit_ii: {
      ComplexMatrix l = ComplexMatrix::Zero(3, 3);
      l(0, 2) = -1.0;
      l(1, 1) = 1.0;
      l(2, 0) = -1.0;
      return {l};
    }
  }
  throw ConfigError("unknown preset");
}

OpenSystemSpec preset(Preset p, const PresetParams& params) {
  const double gi = resolved_gamma_i(p, params);
  const double omega = resolved_omega(p, params);
  if (!std::isfinite(params.gamma_cap) || params.gamma_cap < 0)
    throw ConfigError("gamma_cap must be finite and non-negative");

  OpenSystemSpec spec;
  if (is_qutrit(p)) {
    spec.n_levels = 4;
    spec.level_names = {"g", "h", "i", "e"};
    spec.sink_rates = {params.gamma_h, gi, params.gamma_e};
    spec.drives = {{2, 3, omega}, {3, 4, omega}};
  } else {
    spec.n_levels = 3;
    spec.level_names = {"g", "i", "e"};
    spec.sink_rates = {gi, params.gamma_e};
    spec.drives = {{2, 3, omega}};
  }
  spec.detunings.assign(static_cast<std::size_t>(spec.n_levels - 1), 0.0);
  const Index n = spec.n_levels;
  for (const auto& l : preset_excited_jumps(p)) {
    IntraJump jump;
    jump.matrix = ComplexMatrix::Zero(n, n);
    jump.matrix.bottomRightCorner(n - 1, n - 1) = l;
    jump.rate = params.gamma_cap;
    spec.intra_jumps.push_back(std::move(jump));
  }
  spec.validate();
  return spec;
}

double preset_time_scale(Preset p, const PresetParams& params) {
  const double gi = resolved_gamma_i(p, params);
  return is_qutrit(p) ? gi : 0.5 * (gi + params.gamma_e);
}

QubitEp qubit_ep_parameters(double gamma_i, double gamma_e) {
  if (!std::isfinite(gamma_i) || !std::isfinite(gamma_e)) throw ConfigError("qubit_ep_parameters: non-finite rate");
  if (gamma_i == gamma_e) throw ConfigError("qubit_ep_parameters: equal decay rates admit no EP");
  return {std::abs(gamma_i - gamma_e) / 4.0, Complex(0.0, -(gamma_i + gamma_e) / 4.0)};
}

QutritEp qutrit_ep_parameters(double gamma_h, double gamma_e) {
  if (!std::isfinite(gamma_h) || !std::isfinite(gamma_e)) throw ConfigError("qutrit_ep_parameters: non-finite rate");
  if (gamma_h == gamma_e) throw ConfigError("qutrit_ep_parameters: gamma_h == gamma_e gives no EP");
  const double gi = 0.5 * (gamma_h + gamma_e);
  return {gi, (gamma_h - gamma_e) / (4.0 * std::sqrt(2.0)), Complex(0.0, -gi / 2.0)};
}

SpecFamily preset_rate_family(Preset p, PresetParams params) {
  params.omega = resolved_omega(p, params);
  return [p, params](double gamma) {
    PresetParams q = params;
    q.gamma_cap = gamma;
    return preset(p, q);
  };
}

SpecFamily preset_drive_family(Preset p, PresetParams params) {
  return [p, params](double omega) {
    PresetParams q = params;
    q.omega = omega;
    return preset(p, q);
  };
}

}  // namespace mbep
