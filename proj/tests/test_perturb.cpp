#include <doctest.h>

#include "mbep/perturb.hpp"
#include "support.hpp"

using namespace mbep;

namespace {

std::vector<Complex> numeric_spectrum(Preset p, double gi, double ge, double gh, double omega, double gamma) {
  PresetParams params = default_params(p);
  if (!is_qutrit(p)) params.gamma_i = gi;
  params.gamma_e = ge;
  params.gamma_h = gh;
  params.omega = omega;
  params.gamma_cap = gamma;
  return eigenvalues(build_parts(preset(p, params)).lindbladian_eff);
}

}  // namespace

// Drives sit away from the EP at 0.175, where diagonalisation itself loses
// half the digits.
TEST_CASE("qubit closed forms agree with diagonalisation") {
  for (double w : {0.05, 0.12, 0.4})
    for (double g : {0.0, 0.1, 0.7}) {
      const auto a = qubit_case_i_eigenvalues(0.2, 0.9, w, g);
      CHECK(testing::matched_distance({a.begin(), a.end()}, numeric_spectrum(Preset::qubit_i, 0.2, 0.9, 0, w, g)) <
            1e-6);
      const auto b = qubit_case_ii_eigenvalues(0.2, 0.9, w, g);
      CHECK(testing::matched_distance({b.begin(), b.end()}, numeric_spectrum(Preset::qubit_ii, 0.2, 0.9, 0, w, g)) <
            1e-6);
    }
}

TEST_CASE("qutrit case (ii) closed form agrees away from degeneracies") {
  for (double w : {0.03, 0.21})
    for (double g : {0.05, 0.4}) {
      const auto a = qutrit_case_ii_eigenvalues(0.8, 0.2, w, g);
      CHECK(testing::matched_distance({a.begin(), a.end()},
                                      numeric_spectrum(Preset::qutrit_ii, 0, 0.2, 0.8, w, g)) < 1e-6);
    }
}

TEST_CASE("critical drives of case (ii) close the gap") {
  const auto d = qubit_case_ii_critical_drives(0.1, 0.9, 0.3);
  CHECK(d.liouvillian_ep == doctest::Approx(0.2));
  CHECK(d.lindbladian_ep == doctest::Approx(0.25));
  // Two eigenvalues of L_eff coalesce at the Lindbladian EP.
  const auto ev = numeric_spectrum(Preset::qubit_ii, 0.1, 0.9, 0, d.lindbladian_ep, 0.3);
  double gap = INFINITY;
  for (std::size_t a = 0; a < ev.size(); ++a)
    for (std::size_t b = a + 1; b < ev.size(); ++b) gap = std::min(gap, std::abs(ev[a] - ev[b]));
  CHECK(gap < 1e-6);
  const auto t = qutrit_case_ii_critical_drives(0.8, 0.2, 0.0);
  CHECK(t.lindbladian_ep1 == doctest::Approx(t.liouvillian_ep));
}

TEST_CASE("qutrit splitting: exact members and the ring radius") {
  const double g = 1e-6;
  const QutritSplitting s = qutrit_case_i_splitting(0.4, 0.2, g);
  const auto ev = numeric_spectrum(Preset::qutrit_i, 0, 0.2, 0.4, qutrit_ep_parameters(0.4, 0.2).omega, g);
  auto nearest = [&](Complex z) {
    double best = INFINITY;
    for (auto e : ev) best = std::min(best, std::abs(e - z));
    return best;
  };
  CHECK(nearest(s.lambda6) < 1e-8);
  CHECK(nearest(s.lambda78[0]) < 1e-8);
  CHECK(nearest(s.lambda78[1]) < 1e-8);
  // mu = (15/32)^(1/5) gt^(4/5) (Gamma)^(1/5), gt = 0.1
  const double radius = std::pow(15.0 / 32.0, 0.2) * std::pow(0.1, 0.8) * std::pow(g, 0.2);
  CHECK(s.ring_radius == doctest::Approx(radius).epsilon(1e-12));
  // Leading order only: corrections are a factor Gamma^(1/5) smaller.
  for (auto z : s.ring) CHECK(nearest(z) < 0.2 * radius);
}

TEST_CASE("exact characteristic polynomial reproduces the numeric spectrum") {
  PresetParams params = default_params(Preset::qubit_i);
  const ExactRateFamily fam = exact_preset_family(Preset::qubit_i, exact_preset_params(Preset::qubit_i, params));
  const GammaPolynomial p = char_poly_in_gamma(fam);
  CHECK(p.degree() == 4);
  for (double g : {0.05, 0.3}) {
    params.gamma_cap = g;
    CHECK(testing::matched_distance(p.roots(g), eigenvalues(build_parts(preset(Preset::qubit_i, params)).lindbladian_eff)) <
          1e-5);
  }
}

TEST_CASE("newton diagram of a hand-built polynomial") {
  // (mu^2 - Gamma)(mu - Gamma) = mu^3 - Gamma mu^2 - Gamma mu + Gamma^2
  const RatePolynomial g = RatePolynomial::gamma();
  const GammaPolynomial p({ExactComplex(1), -g, -g, g * g});
  const NewtonDiagram nd = newton_diagram(p);
  REQUIRE(nd.segments.size() == 2);
  CHECK(nd.segments[0].slope == Rational(1, 2));
  CHECK(nd.segments[0].span() == 2);
  CHECK(testing::matched_distance(nd.segments[0].roots(), {1.0, -1.0}) < 1e-14);
  CHECK(nd.segments[1].slope == Rational(1));
  REQUIRE(nd.segments[1].exact_root());
  CHECK(*nd.segments[1].exact_root() == ExactComplex(1));
}

TEST_CASE("newton diagram strips identically vanishing constant terms") {
  const RatePolynomial g = RatePolynomial::gamma();
  const GammaPolynomial p({ExactComplex(1), g, RatePolynomial()});
  const NewtonDiagram nd = newton_diagram(p);
  CHECK(nd.zero_roots_removed == 1);
  CHECK(nd.degree == 1);
}

TEST_CASE("log grid") {
  const auto g = log_grid(1e-8, 1e-4, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(1e-8));
  CHECK(g[2] == doctest::Approx(1e-6));
  CHECK(g.back() == doctest::Approx(1e-4));
}

TEST_CASE("splitting fit on a planted square-root branch, serial equals parallel") {
  // [[0, 1], [Gamma, 0]] splits as +- Gamma^(1/2)
  const MatrixFamily f = [](double g) {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 1) = 1;
    m(1, 0) = g;
    m(2, 2) = -1.0 + g;
    return m;
  };
  SplittingOptions so;
  const auto grid = log_grid(1e-8, 1e-4, 8);
  const SplittingFit serial = splitting_exponent_fit(f, grid, so);
  so.execution = Execution::parallel;
  const SplittingFit parallel = splitting_exponent_fit(f, grid, so);
  REQUIRE(serial.branches.size() == 3);
  CHECK(serial.branches[0].exponent == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(serial.branches[1].exponent == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(serial.branches[2].exponent == doctest::Approx(1.0).epsilon(1e-3));
  for (std::size_t b = 0; b < 3; ++b) CHECK(serial.branches[b].trajectory == parallel.branches[b].trajectory);
}
