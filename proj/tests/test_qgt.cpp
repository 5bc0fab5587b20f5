#include <doctest.h>

#include <random>

#include "mbep/errors.hpp"
#include "mbep/qgt.hpp"

using namespace mbep;

namespace {

// Real symmetric two-level family: eigenvectors rotate by half the polar
// angle atan(omega), so the metric is 1 / (4 (1 + omega^2)^2) for both modes.
ComplexMatrix spin(double w) {
  ComplexMatrix m(2, 2);
  m << 1, w, w, -1;
  return m;
}

// Eigenvalues +- sqrt(omega - 0.3) (+ a spectator) coalesce at omega = 0.3.
ComplexMatrix square_root_ep(double w) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 1) = 1;
  m(1, 0) = w - 0.3;
  m(0, 0) = Complex(0, -0.1);
  m(1, 1) = Complex(0, -0.1);
  m(2, 2) = Complex(-1, 0.5 * w);
  return m;
}

ComplexMatrix random_family(double w) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexMatrix a(4, 4), b(4, 4);
  for (Eigen::Index k = 0; k < 16; ++k) a.data()[k] = Complex(u(rng), u(rng));
  for (Eigen::Index k = 0; k < 16; ++k) b.data()[k] = Complex(u(rng), u(rng));
  return a + w * b;
}

}  // namespace

TEST_CASE("biorthonormal modes") {
  const EigenSystem es = biorthonormal_modes(random_family(0.3));
  CHECK(biorthonormality_error(es) < 1e-12);
  for (Eigen::Index n = 0; n < es.right_vectors.cols(); ++n) {
    Eigen::Index arg = 0;
    es.right_vectors.col(n).cwiseAbs().maxCoeff(&arg);
    CHECK(es.right_vectors(arg, n).imag() == doctest::Approx(0.0));
    CHECK(es.right_vectors(arg, n).real() > 0);
  }
  ComplexMatrix jordan = ComplexMatrix::Zero(2, 2);
  jordan(0, 1) = 1;
  CHECK_THROWS_AS(biorthonormal_modes(jordan), EpProximityError);
}

TEST_CASE("hermitian family gives the Fubini-Study metric") {
  for (double w : {-0.7, 0.0, 0.4, 2.0}) {
    const QgtPoint p = qgt_point(spin, w);
    REQUIRE(p.flag == "ok");
    const double expected = 1.0 / (4.0 * (1 + w * w) * (1 + w * w));
    for (auto q : p.q) {
      CHECK(q.real() == doctest::Approx(expected).epsilon(1e-6));
      CHECK(std::abs(q.imag()) < 1e-8);
    }
  }
}

TEST_CASE("richardson sharpens the finite difference") {
  QgtOptions plain, rich;
  plain.step = rich.step = 1e-3;
  rich.richardson = true;
  const double expected = 1.0 / (4.0 * 1.25 * 1.25);
  const double e1 = std::abs(qgt_point(spin, 0.5, plain).q[0].real() - expected);
  const double e2 = std::abs(qgt_point(spin, 0.5, rich).q[0].real() - expected);
  CHECK(e2 < e1);
}

TEST_CASE("metric is gauge invariant") {
  QgtOptions o;
  o.gauge_tol = 1e-6;
  for (double w : {0.1, 0.6}) {
    const QgtPoint p = qgt_point(random_family, w, o);
    CHECK(p.flag == "ok");
    CHECK(p.gauge_deviation < 1e-6);
    const QgtComponent c = qgt_tensor(random_family, w, 1, o);
    CHECK(c.value == p.q[1]);
  }
}

TEST_CASE("points at an exceptional point are flagged, not evaluated") {
  const QgtPoint p = qgt_point(square_root_ep, 0.3);
  CHECK(p.flag == "ep_proximity");
  CHECK(std::isnan(p.q[0].real()));
  CHECK_THROWS_AS(qgt_tensor(square_root_ep, 0.3, 0), EpProximityError);
}

TEST_CASE("scan locates a square-root EP with quadratic divergence, serial equals parallel") {
  std::vector<double> grid;
  for (int k = 0; k < 600; ++k) grid.push_back(0.0005 + 1e-3 * k);
  ScanOptions so;
  so.qgt.richardson = true;
  const QgtScan serial = metric_scan(square_root_ep, grid, so);
  REQUIRE(serial.critical_points.size() == 1);
  CHECK(serial.critical_points[0].omega == doctest::Approx(0.3).epsilon(2e-3 / 0.3));
  CHECK(serial.critical_points[0].exponent == doctest::Approx(2.0).epsilon(0.1));

  so.execution = Execution::parallel;
  const QgtScan parallel = metric_scan(square_root_ep, grid, so);
  CHECK(parallel.flags == serial.flags);
  bool same = true;
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t a = 0; a < serial.n_modes; ++a) {
      const double x = serial.metric[k][a], y = parallel.metric[k][a];
      same = same && (x == y || (std::isnan(x) && std::isnan(y)));
    }
  CHECK(same);
  CHECK(parallel.critical_points[0].omega == serial.critical_points[0].omega);
}

TEST_CASE("scan input validation") {
  CHECK_THROWS_AS(metric_scan(spin, {0.1, 0.2}), ConfigError);
  CHECK_THROWS_AS(metric_scan(spin, {0.3, 0.2, 0.1}), ConfigError);
}
