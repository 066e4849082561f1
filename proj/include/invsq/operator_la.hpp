#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <utility>

#include "invsq/hankel.hpp"

namespace invsq {

// Spectral multiplier m(lambda) applied in the eigenbasis of L_a.
struct MultiplierSpec {
  enum class Kind { Propagator, Heat, Fractional, LpBand, LpProjection, LpLow, Custom };
  Kind kind = Kind::Custom;
  double t = 0.0;     // propagator / heat time
  double s = 0.0;     // fractional power of sqrt(L_a)
  double band = 1.0;  // dyadic frequency N
  std::function<std::complex<double>(double)> custom;

  static MultiplierSpec propagator(double t);
  static MultiplierSpec heat(double t);
  // L_a^{s/2}, s in [-2, 2].
  static MultiplierSpec fractional(double s);
  // exp(-lambda/N^2) - exp(-4 lambda/N^2), the heat-flow band.
  static MultiplierSpec lp_band(double N);
  // phi(sqrt(lambda)/N) - phi(2 sqrt(lambda)/N) with the smooth bump phi.
  static MultiplierSpec lp_projection(double N);
  static MultiplierSpec lp_low(double N);
  static MultiplierSpec from_function(std::function<std::complex<double>(double)> f);

  void validate() const;
  std::complex<double> operator()(double lambda) const;
};

RadialField apply_multiplier(const PlanPtr& plan, const RadialField& u, const MultiplierSpec& spec);

struct QuadraticFormReport {
  double spectral = 0.0;            // omega sum lambda_k |c_k|^2
  double gradient_potential = 0.0;  // omega int |u_r|^2 + a |u|^2 / r^2, origin-corrected
  double completed_square = 0.0;    // omega int |u_r + sigma u / r|^2
  double origin_correction = 0.0;   // analytic correction folded into gradient_potential
  bool converged = false;           // the three agree to 1e-6
  double max_relative_spread() const;
};

// Q(u) three ways on whichever basis u lives on.
QuadraticFormReport quadratic_form_Q(const RadialField& u);

// Radial heat kernel of e^{-t L_a} against r'^{d-1} dr'.
double heat_kernel_radial(const CouplingParams& params, double t, double r, double r2);

struct HeatEnvelopeFit {
  double c = 0.0;             // Gaussian constant in exp(-(r-r')^2/(c t))
  double C_coarse = 0.0;      // sup of the ratio on the coarse grid
  double C_fine = 0.0;        // sup on the refined, wider grid
  double min_ratio_coarse = 0.0;
  bool stable = false;        // |C_fine - C_coarse| <= 20% of C_coarse
};

// Ratio of the kernel to the envelope (1 v sqrt(t)/r)^sigma (1 v sqrt(t)/r')^sigma
// t^{-d/2} exp(-(r-r')^2/(c t)).
double heat_envelope_ratio(const CouplingParams& params, double c, double t, double r, double r2);
// Fits c from a scan and the sup constant on an n^3 log grid over
// [10^-2, 10^2]^3 and a 2n^3 grid over [10^-3, 10^3]^3.
HeatEnvelopeFit fit_heat_envelope(const CouplingParams& params, int n = 20);

// Lebesgue window of the Bernstein inequality: 1 < p <= q <= inf for a >= 0,
// r0 < p <= q < d/sigma otherwise; r0 defaults to the dual exponent d/(d-sigma).
bool bernstein_window(const CouplingParams& params, double p, double q, std::optional<double> r0 = std::nullopt);
double bernstein_ratio(const PlanPtr& plan, const RadialField& u, double N, double p, double q,
                       std::optional<double> r0 = std::nullopt);

bool riesz_window(const CouplingParams& params, double s, double p);
// (||(-Delta)^{s/2} u||_p / ||L_a^{s/2} u||_p, reciprocal). The free operator
// acts on free_plan (order (d-2)/2); u is carried over by evaluating its
// eigen-expansion at free_plan's nodes.
std::pair<double, double> sobolev_equiv_ratio(const PlanPtr& plan, const RadialField& u, double s, double p,
                                              const PlanPtr& free_plan);

// Evaluate u (a field on plan) at the nodes of another basis via its expansion.
RadialField resample(const PlanPtr& plan, const RadialField& u, const BasisPtr& target);

}  // namespace invsq
