#include "invsq/special_functions.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "invsq/error.hpp"

namespace invsq {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::HardyViolation: return "hardy violation";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::Convergence: return "convergence failure";
    case ErrorKind::InvalidSpec: return "invalid spec";
    case ErrorKind::ZeroField: return "zero field";
    case ErrorKind::ExponentWindow: return "exponent window violation";
    case ErrorKind::InadmissiblePair: return "inadmissible pair";
    case ErrorKind::InsufficientSampling: return "insufficient sampling";
    case ErrorKind::TailNotConverged: return "tail not converged";
    case ErrorKind::Config: return "config error";
  }
  return "error";
}

namespace {

using std::numbers::pi;

// Is nu one of the closed-form orders 1/2, 3/2?
int half_integer_index(double nu) {
  if (nu == 0.5) return 0;
  if (nu == 1.5) return 1;
  return -1;
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
  if (!std::isfinite(nu) || nu < 0.0 || nu >= 50.0)
    throw Error(ErrorKind::InvalidParameter, "bessel order must lie in [0, 50), got " + std::to_string(nu));
}

bool BesselOrder::is_half_integer() const { return half_integer_index(nu_) >= 0; }

double gamma(double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::Domain, "gamma requires x > 0");
  return boost::math::tgamma(x);
}

double bessel_j(BesselOrder order, double x) {
  if (!(x >= 0.0)) throw Error(ErrorKind::Domain, "bessel_j requires x >= 0");
  const double nu = order.value();
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  switch (half_integer_index(nu)) {
    case 0:
      return std::sqrt(2.0 / (pi * x)) * std::sin(x);
    case 1:
      return std::sqrt(2.0 / (pi * x)) * (std::sin(x) / x - std::cos(x));
    default:
      return boost::math::cyl_bessel_j(nu, x);
  }
}

double bessel_j_prime(BesselOrder order, double x) {
  const double nu = order.value();
  if (x == 0.0) {
    if (nu == 1.0) return 0.5;
    return nu == 0.0 || nu > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  // J' = (J_{nu-1} - J_{nu+1})/2 rewritten with J_{nu-1} = (2nu/x) J_nu - J_{nu+1},
  // which avoids negative orders.
  return nu / x * bessel_j(order, x) - bessel_j(BesselOrder(nu + 1.0), x);
}

std::vector<double> bessel_zeros(BesselOrder order, int count) {
  if (count < 1) throw Error(ErrorKind::InvalidParameter, "bessel_zeros requires count >= 1");
  const double nu = order.value();
  std::vector<double> zeros(static_cast<std::size_t>(count));
  if (nu == 0.5) {
    for (int k = 0; k < count; ++k) zeros[k] = pi * (k + 1);
    return zeros;
  }
  boost::math::cyl_bessel_j_zero(nu, 1, static_cast<unsigned>(count), zeros.begin());
  for (int k = 0; k < count; ++k) {
    double z = zeros[k];
    // Newton polish; boost is already close, this only tightens the last digits.
    for (int it = 0; it < 4; ++it) {
      const double j = bessel_j(order, z);
      if (std::abs(j) <= 1e-15) break;
      const double step = j / bessel_j_prime(order, z);
      z -= step;
      if (std::abs(step) <= 1e-15 * z) break;
    }
    if (std::abs(bessel_j(order, z)) > 1e-11 || (k > 0 && !(z > zeros[k - 1])))
      throw Error(ErrorKind::Convergence, "bessel zero " + std::to_string(k + 1) + " did not converge");
    zeros[k] = z;
  }
  return zeros;
}

double bessel_i_scaled_direct(BesselOrder order, double x) {
  const double nu = order.value();
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (nu == 0.5) return std::sqrt(2.0 / (pi * x)) * 0.5 * (-std::expm1(-2.0 * x));
  return std::exp(-x) * boost::math::cyl_bessel_i(nu, x);
}

double bessel_i_scaled_asymptotic(BesselOrder order, double x) {
  // Hankel expansion: e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k / x^k.
  const double mu = 4.0 * order.value() * order.value();
  // Terms first grow while (2k-1)^2 < mu, then shrink; truncate at the
  // smallest term once past that hump.
  const double hump = 0.5 * std::sqrt(mu) + 1.0;
  double term = 1.0, sum = 1.0, previous = 1.0;
  for (int k = 1; k < 400; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * x);
    if (k > hump && std::abs(term) > previous) break;
    previous = std::abs(term);
    sum += term;
    if (k > hump && previous < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * pi * x);
}

double bessel_i_scaled(BesselOrder order, double x) {
  if (!(x >= 0.0)) throw Error(ErrorKind::Domain, "bessel_i_scaled requires x >= 0");
  if (order.value() == 0.5) return bessel_i_scaled_direct(order, x);
  if (x <= kBesselIAsymptoticSeam) return bessel_i_scaled_direct(order, x);
  return bessel_i_scaled_asymptotic(order, x);
}

}  // namespace invsq
