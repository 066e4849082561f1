#include "invsq/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "invsq/error.hpp"
#include "invsq/special_functions.hpp"

namespace invsq {

double CouplingParams::omega() const {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / gamma(0.5 * d);
}

CouplingParams derive_params(int d, double a) {
  if (d < 3) throw Error(ErrorKind::InvalidParameter, "dimension must be at least 3");
  if (!std::isfinite(a)) throw Error(ErrorKind::InvalidParameter, "coupling must be finite");
  const double h = 0.5 * (d - 2);
  if (a <= -h * h)
    throw Error(ErrorKind::HardyViolation,
                "a = " + std::to_string(a) + " is at or below the Hardy constant -" + std::to_string(h * h));
  CouplingParams p;
  p.d = d;
  p.a = a;
  p.nu = std::sqrt(h * h + a);
  p.sigma = h - p.nu;
  p.beta = p.nu / h;
  // Strict inequality a > -1/4 + 1/25; values within rounding of the edge
  // (e.g. the literal -0.21) count as the edge itself.
  const double edge = -0.25 + 0.04;
  p.evolution_admissible = d == 3 && a > edge + 1e-12;
  return p;
}

double blowup_window_edge(int d) {
  const double h = 0.5 * (d - 2);
  const double q = double(d - 2) / (d + 2);
  return -h * h + q * q;
}

CouplingParams negative_part(const CouplingParams& p) {
  return p.a < 0.0 ? p : derive_params(p.d, 0.0);
}

}  // namespace invsq
