#pragma once

#include <string>
#include <vector>

#include "invsq/radial_basis.hpp"

namespace invsq {

// ||u||_{2d/(d-2)} / ||u||_{H^1_a}.
double sobolev_quotient(const RadialField& u);

struct QuotientOptions {
  double tol = 1e-10;     // stop when the relative quotient change falls below this
  int max_iter = 100000;
  double step0 = 1.0;
};

struct VariationalReport {
  double best_quotient = 0.0;
  int iterations = 0;
  bool converged = false;
  RadialField final_field;          // normalized to ||u||_{H^1_a} = 1
  double reference_constant = 0.0;  // K(a /\ 0)^{-1/d}
  double gap = 0.0;                 // reference - best
  double dilation = 0.0;            // lambda of the best-matching lambda^{(d-2)/2} W_a(lambda r)
  double alignment_error = 0.0;     // relative H^1_a distance to that rescaled W_a
  std::vector<double> trace;        // quotient after each accepted step
  std::string stop_reason;
};

// Projected gradient ascent of int |u|^{2d/(d-2)} on the unit sphere of
// H^1_a. The ascent direction is the Euler-Lagrange field
// L_a^{-1}(|u|^{4/(d-2)} u), rescaled so that a unit step is the normalized
// fixed-point map; steps halve on non-increase.
VariationalReport maximize_quotient(const RadialField& init, const QuotientOptions& opts = {});

struct DilationFit {
  double lambda = 1.0;
  double error = 0.0;  // min over lambda, phase of ||u/|u| - W_lambda/|W_lambda| || in H^1_a
};
// Best dilation of W_a against u, by a scan in log(lambda) and golden-section refinement.
DilationFit fit_dilation(const RadialField& u);

// Quotient of the shifted free bubble W_0(x - t e_1) for L_a in d = 3, by
// quadrature over the meridian half-plane in polar coordinates about the
// origin, which absorbs the 1/|x|^2 singularity into the area element.
double shifted_bubble_quotient(double a, double shift);

// 1/2 Q(u) + mu (d-2)/(2d) int |u|^{2d/(d-2)}; mu = +1 defocusing, -1 focusing.
double energy(const RadialField& u, double mu);

// int |grad u|^2 + a|u|^2/|x|^2 - |u|^{2d/(d-2)}, the focusing virial functional.
double virial_functional(const RadialField& u);

enum class TrapLabel { TrappedBelow, BlowupRegion, AboveThresholdEnergy, Degenerate };
std::string to_string(TrapLabel label);

struct TrapClass {
  TrapLabel label = TrapLabel::Degenerate;
  double delta0 = 0.0;
  double energy_ratio = 0.0;   // E_a(u0) / E_{a^0}(W_{a^0})
  double kinetic_ratio = 0.0;  // ||u0||^2 / ||W_{a^0}||^2
  bool blowup_window = false;  // a above the edge where the blowup statement applies
};

// Compares the focusing energy with (1 - delta0) times the threshold energy
// and the kinetic norm with the threshold norm. Ties within 1e-9 relative
// count as Degenerate.
TrapClass classify_initial_data(const RadialField& u0, double delta0 = 0.0);

}  // namespace invsq
