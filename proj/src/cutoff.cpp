#include "invsq/cutoff.hpp"

#include <cmath>

namespace invsq {

std::array<double, 4> smoothstep7(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0, 0.0};
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double s = t4 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t3);
  const double s1 = 140.0 * t3 * (1.0 - t) * (1.0 - t) * (1.0 - t);
  const double s2 = 420.0 * t2 * (1.0 - t) * (1.0 - t) * (1.0 - 2.0 * t);
  const double s3 = 840.0 * t * (1.0 - t) * (1.0 - 5.0 * t + 5.0 * t2);
  return {s, s1, s2, s3};
}

double lp_phi(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  return std::exp(1.0 - 1.0 / (2.0 - x));
}

std::array<double, 5> virial_phi(double s) {
  if (s <= 1.0) return {s, 1.0, 0.0, 0.0, 0.0};
  if (s >= 2.0) return {1.5, 0.0, 0.0, 0.0, 0.0};
  // phi' = 1 - S(s-1); phi = 1 + integral of that.
  const double t = s - 1.0;
  const auto S = smoothstep7(t);
  const double t2 = t * t, t4 = t2 * t2, t5 = t4 * t;
  const double intS = t5 * (7.0 - 14.0 * t + 10.0 * t2 - 2.5 * t2 * t);
  return {1.0 + t - intS, 1.0 - S[0], -S[1], -S[2], -S[3]};
}

double mass_phi(double rho) { return 1.0 - smoothstep7(rho - 1.0)[0]; }

double wall_cutoff(double r, double r0, double r1) {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  // C-infinity ramp built from exp(-1/x).
  const double x = (r - r0) / (r1 - r0);
  const double f = std::exp(-1.0 / (1.0 - x));
  const double g = std::exp(-1.0 / x);
  return f / (f + g);
}

}  // namespace invsq
