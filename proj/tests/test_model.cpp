#include <doctest.h>

#include <random>

#include "mbep/errors.hpp"
#include "mbep/model.hpp"
#include "mbep/model_io.hpp"
#include "support.hpp"

using namespace mbep;

namespace {

const Complex I(0, 1);

ComplexMatrix random_state(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexMatrix a(n, n);
  for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = Complex(u(rng), u(rng));
  ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

// L[rho] written out in operator form, with no vectorisation.
ComplexMatrix lindblad_action(const OpenSystemSpec& s, const ComplexMatrix& h, const ComplexMatrix& rho) {
  ComplexMatrix out = -I * (h * rho - rho * h);
  auto dissipate = [&](const ComplexMatrix& l, double rate) {
    const ComplexMatrix ll = l.adjoint() * l;
    out += rate * (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
  };
  const auto n = s.n_levels;
  for (int k = 1; k < n; ++k) {
    ComplexMatrix sink = ComplexMatrix::Zero(n, n);
    sink(0, k) = 1;
    dissipate(sink, s.sink_rates[static_cast<std::size_t>(k - 1)]);
  }
  for (const auto& j : s.intra_jumps) dissipate(j.matrix, j.rate);
  return out;
}

}  // namespace

TEST_CASE("vec index convention and round trip") {
  CHECK(vec_index(1, 0, 2) == 2);
  ComplexMatrix rho(2, 2);
  rho << 1, 2, 3, 4;
  const ComplexVector v = vectorize(rho);
  CHECK(v(vec_index(1, 0, 2)) == Complex(3));
  CHECK(unvectorize(v, 2) == rho);
}

TEST_CASE("full Lindbladian matches the operator form for every preset") {
  std::mt19937_64 rng(8);
  for (auto name : {"qubit_i", "qubit_ii", "qutrit_i", "qutrit_ii"}) {
    const Preset p = parse_preset(name);
    PresetParams params = default_params(p);
    params.gamma_cap = 0.3;
    const OpenSystemSpec s = preset(p, params);
    const LindbladParts parts = build_parts(s);
    const ComplexMatrix rho = random_state(s.n_levels, rng);
    const ComplexMatrix direct = lindblad_action(s, parts.hamiltonian, rho);
    const ComplexMatrix via_vec =
        unvectorize(parts.full_lindbladian * vectorize(rho), static_cast<std::size_t>(s.n_levels));
    CHECK((direct - via_vec).norm() < 1e-14);
    CHECK(std::abs(direct.trace()) < 1e-14);
  }
}

TEST_CASE("effective generators act as the no-jump and recycled evolution") {
  std::mt19937_64 rng(9);
  PresetParams params = default_params(Preset::qutrit_ii);
  params.gamma_cap = 0.25;
  const OpenSystemSpec s = preset(Preset::qutrit_ii, params);
  const LindbladParts parts = build_parts(s);
  const auto d = s.n_levels - 1;
  const ComplexMatrix rho = random_state(d, rng);
  const ComplexMatrix& h = parts.h_eff;
  const ComplexMatrix no_jump = -I * (h * rho - rho * h.adjoint());
  CHECK((unvectorize(parts.liouvillian_eff * vectorize(rho), d) - no_jump).norm() < 1e-14);
  ComplexMatrix recycled = no_jump;
  for (const auto& j : s.intra_jumps) {
    const ComplexMatrix l = j.matrix.bottomRightCorner(d, d);
    recycled += j.rate * l * rho * l.adjoint();
  }
  CHECK((unvectorize(parts.lindbladian_eff * vectorize(rho), d) - recycled).norm() < 1e-14);
}

TEST_CASE("effective generator is the excited block of the full one up to the sink feed") {
  PresetParams params = default_params(Preset::qubit_ii);
  params.gamma_cap = 0.3;
  const OpenSystemSpec s = preset(Preset::qubit_ii, params);
  const LindbladParts parts = build_parts(s);
  const auto perm = excited_first_permutation(s.n_levels);
  const ComplexMatrix permuted = permute_symmetric(parts.full_lindbladian, perm);
  const auto dd = (s.n_levels - 1) * (s.n_levels - 1);
  CHECK((permuted.topLeftCorner(dd, dd) - parts.lindbladian_eff).norm() < 1e-14);
}

TEST_CASE("qubit EP drive merges the H_eff eigenvalues") {
  const QubitEp ep = qubit_ep_parameters(0.2, 0.9);
  CHECK(ep.omega == doctest::Approx(0.175));
  const OpenSystemSpec s = preset(Preset::qubit_i, default_params(Preset::qubit_i));
  const auto ev = eigenvalues(build_parts(s).h_eff);
  CHECK(std::abs(ev[0] - ev[1]) < 1e-6);
  CHECK(std::abs(ev[0] - ep.eigenvalue) < 1e-6);
}

TEST_CASE("qutrit EP parameters merge all three H_eff eigenvalues") {
  const QutritEp ep = qutrit_ep_parameters(0.4, 0.2);
  CHECK(ep.gamma_i == doctest::Approx(0.3));
  const auto ev = eigenvalues(build_parts(preset(Preset::qutrit_i, default_params(Preset::qutrit_i))).h_eff);
  for (auto z : ev) CHECK(std::abs(z - ep.eigenvalue) < 1e-4);
  CHECK_THROWS_AS(qutrit_ep_parameters(0.3, 0.3), ConfigError);
}

TEST_CASE("model validation rejects malformed input") {
  OpenSystemSpec s;
  s.n_levels = 3;
  s.detunings = {0, 0};
  s.sink_rates = {0.1};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.sink_rates = {0.1, -0.2};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.sink_rates = {0.1, 0.2};
  s.drives = {{1, 2, 0.1}};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.drives = {{2, 3, 0.1}};
  IntraJump j;
  j.matrix = ComplexMatrix::Zero(3, 3);
  j.matrix(0, 1) = 1;
  j.rate = 1;
  s.intra_jumps = {j};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.intra_jumps.clear();
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS(parse_preset("qubit"), ConfigError);
}

TEST_CASE("model JSON round trip") {
  PresetParams params = default_params(Preset::qutrit_ii);
  params.gamma_cap = 0.1;
  const OpenSystemSpec s = preset(Preset::qutrit_ii, params);
  const OpenSystemSpec back = spec_from_json(spec_to_json(s));
  CHECK((build_parts(back).full_lindbladian - build_parts(s).full_lindbladian).norm() == 0.0);
  CHECK(back.level_names == s.level_names);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"n_levels", 3}}), ConfigError);
}
