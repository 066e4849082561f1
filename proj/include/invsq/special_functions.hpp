#pragma once

#include <vector>

namespace invsq {

// Order of a Bessel family. Orders past 50 are refused: nothing here needs
// them and the asymptotic branches are not exercised there.
class BesselOrder {
 public:
  explicit BesselOrder(double nu);
  double value() const { return nu_; }
  bool is_half_integer() const;

 private:
  double nu_;
};

double gamma(double x);

// J_nu(x) for x >= 0.
double bessel_j(BesselOrder order, double x);

// J_nu'(x), from the three-term recurrence.
double bessel_j_prime(BesselOrder order, double x);

// First `count` positive zeros of J_nu, increasing.
std::vector<double> bessel_zeros(BesselOrder order, int count);

// exp(-x) I_nu(x), finite for every x >= 0.
double bessel_i_scaled(BesselOrder order, double x);

// Crossover between the direct and the asymptotic branch of bessel_i_scaled.
inline constexpr double kBesselIAsymptoticSeam = 500.0;
double bessel_i_scaled_asymptotic(BesselOrder order, double x);
double bessel_i_scaled_direct(BesselOrder order, double x);

}  // namespace invsq
