#pragma once

#include "invsq/hankel.hpp"

namespace invsq {

// Amplitude [d(d-2) beta^2]^{(d-2)/4} of the explicit soliton.
double ground_state_amplitude(const CouplingParams& params);
// W_a(r) = amplitude * [r^{beta-1} / (1 + r^{2 beta})]^{(d-2)/2}.
double ground_state_value(const CouplingParams& params, double r);
double ground_state_derivative(const CouplingParams& params, double r);
// K(a) = ||W_a||^2 = int W_a^{2d/(d-2)} in closed form:
// [pi d (d-2)/4]^{d/2} 2 sqrt(pi) beta^{d-1} / Gamma((d+1)/2).
double ground_state_constant(const CouplingParams& params);
// The displayed normalization pi d(d-2)/4 [2 sqrt(pi) beta^{d-1}/Gamma((d+1)/2)]^{2/d}.
double ground_state_constant_printed(const CouplingParams& params);
// int_{|x| > R} W_a^{2d/(d-2)} dx, through the incomplete beta function.
double ground_state_l6_tail(const CouplingParams& params, double R);

struct GroundState {
  CouplingParams params;
  RadialField field;  // W_a at the basis nodes
  double operator()(double r) const { return ground_state_value(params, r); }
  double derivative(double r) const { return ground_state_derivative(params, r); }
};

GroundState eval_ground_state(const CouplingParams& params, const BasisPtr& basis);

struct ResidualReport {
  double residual = 0.0;       // relative L^2(R^d) residual inside the window
  double window = 0.0;         // residual measured on r <= window
  double spectral_tail = 0.0;  // top-5% coefficient mass relative to the peak
  bool resolution_warning = false;
};

// ||L_a v - |v|^{4/(d-2)} v|| / |||v|^{4/(d-2)} v|| in L^2(R^d) over r <= R/2,
// with v = chi w and chi a smooth cutoff from R/2 to 0.9 R so that v is
// compatible with the Dirichlet wall. w must live on a HankelPlan.
ResidualReport pde_residual(const RadialField& w);
ResidualReport pde_residual(const GroundState& ws);

struct PohozaevReport {
  double q_kinetic = 0.0;     // ||W_a||^2 in the energy space
  double q_l6 = 0.0;          // int W_a^{2d/(d-2)}
  double closed_form = 0.0;
  double printed_form = 0.0;  // the displayed expression, kept for comparison
  double kinetic_l6_gap = 0.0;
  double closed_form_gap = 0.0;
  bool printed_form_discrepancy = false;  // printed and closed form differ by > 1e-6
};

// Quadrature of both sides on the given basis. On a HankelPlan the field
// stops at the wall, so the exterior is added in closed form and the
// kinetic side uses the analytic derivative. On the logarithmic basis both
// come straight from the basis.
PohozaevReport pohozaev_report(const CouplingParams& params, const BasisPtr& basis);
// Same, on a logarithmic basis built for params.
PohozaevReport pohozaev_report(const CouplingParams& params);

// -r^2 (y')^2 + ((d-2)^2/4 + a) y^2 - (d-2)/d y^{2d/(d-2)} with y = r^{(d-2)/2} amp W_a,
// which vanishes identically for amp = 1.
double first_order_invariant(const CouplingParams& params, double r, double amp = 1.0);

struct ThresholdReport {
  CouplingParams params;          // the a /\ 0 parameters used
  double kinetic_threshold = 0.0; // ||W_{a^0}||^2, by quadrature
  double energy_threshold = 0.0;  // E_{a^0}(W_{a^0}) = kinetic / d
  double kinetic_closed_form = 0.0;
  double discrepancy = 0.0;
};

ThresholdReport thresholds(const CouplingParams& params);

}  // namespace invsq
