#pragma once

#include <cstdint>
#include <random>

#include "invsq/hankel.hpp"

namespace invsq {

// amp exp(-r^2 / (2 width^2)).
RadialField gaussian_bump(const BasisPtr& basis, double amp, double width = 1.0);

// amp chi W_a with chi a smooth cutoff from c0 R to c1 R, R the wall radius.
RadialField truncated_ground_state(const PlanPtr& plan, double amp, double c0 = 0.5, double c1 = 0.9);

// r^{-sigma} sum_j c_j r^{2j} exp(-k_j r^2) with three complex Gaussian
// coefficients and rates k_j uniform in [0.2, 2]: a random field of the
// regular class, negligible well inside a wall at r >= 12.
RadialField random_regular_field(const BasisPtr& basis, std::mt19937_64& rng);

}  // namespace invsq
