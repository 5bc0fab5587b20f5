#include <doctest.h>

#include <random>

#include "mbep/dynamics.hpp"
#include "mbep/errors.hpp"
#include "mbep/model.hpp"

using namespace mbep;

namespace {

// Vectorised 2x2 generator with rho_00' = -rho_00 + rho_11, rho_11' = -rho_11:
// from rho_11(0) = 1 the populations are t e^-t and e^-t.
ComplexMatrix feeding_generator() {
  ComplexMatrix l = ComplexMatrix::Zero(4, 4);
  l(0, 0) = -1;
  l(3, 3) = -1;
  l(0, 3) = 1;
  l(1, 1) = -2;
  l(2, 2) = -2;
  return l;
}

}  // namespace

TEST_CASE("evolve reproduces a polynomial-times-exponential solution") {
  const auto times = linear_grid(0.0, 6.0, 61);
  const TrajectoryTable t = evolve(feeding_generator(), pure_state(2, 2), times);
  CHECK(t.decay_rate == doctest::Approx(1.0));
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(t.populations[0][k] == doctest::Approx(times[k] * std::exp(-times[k])).epsilon(1e-12));
    CHECK(t.populations[1][k] == doctest::Approx(std::exp(-times[k])).epsilon(1e-12));
    CHECK(t.prefactor[0][k] == doctest::Approx(times[k]).epsilon(1e-10));
  }
  CHECK(prefactor_degree(t, 0).degree == 1);
  CHECK(prefactor_degree(t, 1).degree == 0);
}

TEST_CASE("jordan_evolve matches the matrix exponential") {
  const ComplexMatrix l = feeding_generator();
  const auto times = linear_grid(0.0, 5.0, 21);
  const TrajectoryTable a = evolve(l, pure_state(2, 2), times);
  const TrajectoryTable b = jordan_evolve(jordan_basis(l).sets, pure_state(2, 2), times);
  for (std::size_t lv = 0; lv < 2; ++lv)
    for (std::size_t k = 0; k < times.size(); ++k)
      CHECK(std::abs(a.populations[lv][k] - b.populations[lv][k]) < 1e-10);
}

TEST_CASE("full Lindbladian evolution stays a density matrix, serial equals parallel") {
  PresetParams params = default_params(Preset::qutrit_ii);
  params.gamma_cap = 0.3;
  const OpenSystemSpec s = preset(Preset::qutrit_ii, params);
  const ComplexMatrix l = build_parts(s).full_lindbladian;
  const auto times = linear_grid(0.0, 20.0, 41);
  EvolveOptions eo;
  eo.keep_states = true;
  const TrajectoryTable serial = evolve(l, pure_state(4, 4), times, eo);
  eo.execution = Execution::parallel;
  const TrajectoryTable parallel = evolve(l, pure_state(4, 4), times, eo);
  CHECK(serial.populations == parallel.populations);
  for (const auto& rho : serial.states) {
    CHECK(std::abs(rho.trace() - Complex(1)) < 1e-12);
    CHECK((rho - rho.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("effective evolution loses population monotonically") {
  PresetParams params = default_params(Preset::qubit_ii);
  params.gamma_cap = 0.3;
  const ComplexMatrix l = build_parts(preset(Preset::qubit_ii, params)).lindbladian_eff;
  const auto times = linear_grid(0.0, 30.0, 61);
  const TrajectoryTable t = evolve(l, pure_state(2, 1), times);
  double prev = 1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double total = t.populations[0][k] + t.populations[1][k];
    CHECK(total <= prev + 1e-12);
    prev = total;
  }
}

TEST_CASE("density matrix validation") {
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  CHECK_NOTHROW(validate_density_matrix(rho));
  rho(0, 1) = 1.0;
  CHECK_THROWS_AS(validate_density_matrix(rho), ConfigError);
  rho(0, 1) = 0;
  rho(1, 1) = 0.9;
  CHECK_THROWS_AS(validate_density_matrix(rho), ConfigError);
}

TEST_CASE("prefactor fit reports an unreachable tolerance") {
  TrajectoryTable t;
  t.times = linear_grid(0.0, 10.0, 50);
  t.levels = {"x"};
  t.populations = {std::vector<double>(50)};
  t.prefactor = {std::vector<double>(50)};
  for (std::size_t k = 0; k < 50; ++k) t.prefactor[0][k] = std::sin(3 * t.times[k]);
  PrefactorOptions po;
  po.max_degree = 2;
  CHECK_THROWS_AS(prefactor_degree(t, 0, po), NumericError);
}
