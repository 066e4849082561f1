#include "invsq/data.hpp"

#include <array>
#include <cmath>

#include "invsq/cutoff.hpp"
#include "invsq/ground_state.hpp"

namespace invsq {

RadialField gaussian_bump(const BasisPtr& basis, double amp, double width) {
  return RadialField::from_function(
      basis, [=](double r) { return std::complex<double>(amp * std::exp(-r * r / (2.0 * width * width))); });
}

RadialField truncated_ground_state(const PlanPtr& plan, double amp, double c0, double c1) {
  const auto& p = plan->params();
  const double R = plan->radius();
  return RadialField::from_function(plan, [&](double r) {
    return std::complex<double>(amp * wall_cutoff(r, c0 * R, c1 * R) * ground_state_value(p, r));
  });
}

RadialField random_regular_field(const BasisPtr& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> rate(0.2, 2.0);
  std::array<std::complex<double>, 3> c;
  std::array<double, 3> k;
  for (int j = 0; j < 3; ++j) {
    c[j] = {g(rng), g(rng)};
    k[j] = rate(rng);
  }
  const double sigma = basis->params().sigma;
  return RadialField::from_function(basis, [&](double r) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < 3; ++j) acc += c[j] * std::pow(r * r, j) * std::exp(-k[j] * r * r);
    return std::pow(r, -sigma) * acc;
  });
}

}  // namespace invsq
