#include <cmath>
#include <numbers>

#include "mbep/errors.hpp"
#include "mbep/perturb.hpp"

namespace mbep {

namespace {

Complex csqrt(double x) { return std::sqrt(Complex(x, 0.0)); }

void check_rates(std::initializer_list<double> values) {
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("closed form: non-finite parameter");
}

}  // namespace

std::array<Complex, 4> qubit_case_i_eigenvalues(double gi, double ge, double omega, double gamma) {
  check_rates({gi, ge, omega, gamma});
  const double nu = gamma * omega * omega;
  const double kappa = (gamma + gi - ge) * (gamma + gi - ge) - 16.0 * omega * omega;
  const Complex q = kappa / 12.0;
  const Complex xi = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const double center = -0.5 * (gamma + ge + gi);

  // Roots of x^3 - 3 q x - 2 nu: x = C + q / C, C^3 = nu + sqrt(nu^2 - q^3).
  // Taking the larger of nu +- sqrt keeps C away from zero; the root set is
  // the same because C -> q / C permutes it.
  const Complex s = std::sqrt(nu * nu - q * q * q);
  const Complex w = std::abs(nu + s) >= std::abs(nu - s) ? Complex(nu) + s : Complex(nu) - s;
  const Complex c = std::pow(w, 1.0 / 3.0);
  std::array<Complex, 4> out;
  for (int k = 0; k < 3; ++k) {
    const Complex ck = c * std::pow(xi, k);
    out[static_cast<std::size_t>(k)] = std::abs(ck) == 0.0 ? Complex(center) : center + ck + q / ck;
  }
  out[3] = center;
  return out;
}

std::array<Complex, 4> qubit_case_ii_eigenvalues(double gi, double ge, double omega, double gamma) {
  check_rates({gi, ge, omega, gamma});
  const Complex root = csqrt(4 * gamma * gamma + (gi - ge) * (gi - ge) - 16 * omega * omega);
  const double mid = -(2 * gamma + gi + ge);
  return {Complex(-(gi + ge) / 2), 0.5 * (mid + root), 0.5 * (mid - root), Complex(-(4 * gamma + gi + ge) / 2)};
}

std::array<Complex, 9> qutrit_case_ii_eigenvalues(double gh, double ge, double omega, double gamma) {
  check_rates({gh, ge, omega, gamma});
  const double gi = 0.5 * (gh + ge);
  const double gt = 0.5 * (gh - ge);
  const Complex r45 = csqrt(gamma * gamma + gt * gt - 8 * omega * omega);
  const Complex r69 = 0.5 * csqrt(4 * gamma * gamma + gt * gt - 8 * omega * omega);
  const Complex mid = -gamma - gi;
  return {Complex(-gi), Complex(-gi), Complex(-2 * gamma - gi), mid - r45, mid + r45,
          mid - r69,    mid - r69,    mid + r69,                mid + r69};
}

QubitCriticalDrives qubit_case_ii_critical_drives(double gi, double ge, double gamma) {
  check_rates({gi, ge, gamma});
  return {std::abs(gi - ge) / 4.0, std::sqrt((gi - ge) * (gi - ge) + 4 * gamma * gamma) / 4.0};
}

QutritCriticalDrives qutrit_case_ii_critical_drives(double gh, double ge, double gamma) {
  check_rates({gh, ge, gamma});
  const double gt = 0.5 * (gh - ge);
  const double k = 2.0 * std::numbers::sqrt2;
  return {std::abs(gt) / k, std::sqrt(gamma * gamma + gt * gt) / k, std::sqrt(4 * gamma * gamma + gt * gt) / k};
}

QutritSplitting qutrit_case_i_splitting(double gh, double ge, double gamma) {
  check_rates({gh, ge, gamma});
  if (gamma < 0) throw ConfigError("qutrit_case_i_splitting: Gamma must be non-negative");
  const double gi = 0.5 * (gh + ge);
  QutritSplitting out;
  out.lambda6 = -gi - gamma;
  const Complex r = 0.5 * csqrt(gamma * (gamma + gh - ge));
  out.lambda78 = {-gi - gamma - r, -gi - gamma + r};
  out.lambda9 = -gi - 16.0 * gamma / 15.0;
  const double d = gh - ge;
  out.ring_radius = std::pow(15.0 * d * d * d * d / 512.0, 0.2) * std::pow(gamma, 0.2);
  for (int r5 = 1; r5 <= 5; ++r5)
    out.ring[static_cast<std::size_t>(r5 - 1)] = -gi + std::polar(out.ring_radius, 2.0 * std::numbers::pi * r5 / 5.0);
  return out;
}

}  // namespace mbep
