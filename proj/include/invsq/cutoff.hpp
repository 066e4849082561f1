#pragma once

#include <array>

namespace invsq {

// Degree-7 smoothstep on [0,1]: 0 -> 1 with three vanishing derivatives at
// both ends. Returns S, S', S'', S'''.
std::array<double, 4> smoothstep7(double t);

// Littlewood-Paley profile: 1 on [0,1], exp(1 - 1/(2-x)) on (1,2), 0 beyond.
double lp_phi(double x);

// Virial profile phi(s): s on [0,1], C^4 blend on (1,2), constant 3/2 beyond.
// Returns phi and its first four derivatives.
std::array<double, 5> virial_phi(double s);

// Truncated-mass profile: 1 on [0,1], 0 beyond 2, smoothstep between.
double mass_phi(double rho);

// Smooth wall-compatible cutoff in r: 1 for r <= r0, 0 for r >= r1.
double wall_cutoff(double r, double r0, double r1);

}  // namespace invsq
