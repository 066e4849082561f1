#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "invsq/evolution.hpp"

namespace invsq {

struct ConservedQuantities {
  double mass = 0.0;
  double energy = 0.0;
  double kinetic = 0.0;
};

ConservedQuantities conserved_quantities(const RadialField& u, double mu);

// psi(x) = R^2 phi(|x|^2 / R^2) with the C^4 virial profile: |x|^2 inside
// r <= R, constant 3R^2/2 beyond sqrt(2) R.
struct VirialWeights {
  double R = 1.0;
  Eigen::VectorXd psi, psi_r, psi_rr, psi_rrr, psi_rrrr;  // radial derivatives at the nodes
  Eigen::VectorXd laplacian;    // Delta psi
  Eigen::VectorXd bilaplacian;  // Delta Delta psi
  Eigen::VectorXd phi_prime;    // phi'(r^2/R^2)
};

VirialWeights virial_weights(const RadialBasis& basis, double R);

// V_R = int psi |u|^2.
double virial_value(const RadialField& u, const VirialWeights& w);
// dV_R/dt = 4 Im int phi'(|x|^2/R^2) conj(u) x.grad u.
double virial_rate(const RadialField& u, const VirialWeights& w);
// d^2V_R/dt^2 for i u_t = L_a u + mu |u|^{4/(d-2)} u:
// 4 int psi'' |u_r|^2 - int Delta^2 psi |u|^2 + 4a int (x.grad psi) |u|^2/|x|^4
// + (4/d) mu int Delta psi |u|^{2d/(d-2)}.
double virial_acceleration(const RadialField& u, const VirialWeights& w, double mu);

struct VirialSeries {
  std::vector<double> times, V, dV, d2V_formula, d2V_fd, dV_fd;
  double mismatch = 0.0;       // max |d2V_formula - d2V_fd| / max |d2V_formula| over interior samples
  double rate_mismatch = 0.0;  // the same for the first derivative
};

// Finite differences use the three-point formula on nonuniform samples;
// the end samples carry NaN in the difference columns.
VirialSeries virial_report(const Trajectory& traj, double R, double mu);

// int phi(|x|/R) |u|^2 with phi = 1 on [0, 1], 0 beyond 2.
double truncated_mass(const RadialField& u, double R);
// d/dt of truncated_mass along the flow: (2/R) Im int phi'(|x|/R) conj(u) u_r.
double truncated_mass_rate(const RadialField& u, double R);
// int |u|^2 / |x|^2.
double hardy_integral(const RadialField& u);

// ||e^{-itL_a} u0||_{L^q_t L^r_x([0,T])} / ||u0||_{L^2}; 2/q + d/r = d/2,
// 2 < q <= infinity. Pass q = infinity for the energy pair.
double strichartz_ratio(const PlanPtr& plan, const RadialField& u0, double q, double r, double T);

struct LocalSmoothing {
  double ratio = 0.0;
  double numerator = 0.0;
  double gradient_part = 0.0;  // int_R int |u_r|^2 / (R <x/R>^3)
  double hardy_part = 0.0;     // int_R int |u|^2 / (R |x|^2), equal to pi ||u0||^2 / (2 nu R)
  double denominator = 0.0;
};
// [int_R int |u_r|^2/(R <x/R>^3) + |u|^2/(R |x|^2) dx dt] / [||u0|| ||u0||_{H^1_a} + ||u0||^2/R]
// for the free whole-space flow of u0 extended by zero past the wall. The
// time integral over the whole line is done exactly by Plancherel in t:
// int_R |e^{-itL_a} u0(r)|^2 dt = pi int |H(k)|^2 psi_k(r)^2 k dk, H the
// order-nu transform of u0, so no wall reflection enters.
LocalSmoothing local_smoothing_ratio(const PlanPtr& plan, const RadialField& u0, double R);

// int int |u|^10 over the stored samples; Simpson on sample pairs,
// trapezoid on a trailing odd interval. Returns the running total per sample.
std::vector<double> spacetime_L10_accumulated(const Trajectory& traj);
double spacetime_L10(const Trajectory& traj);

struct DiagnosticsSeries {
  std::vector<double> t, mass, energy, kinetic, l6, sup, V, dV, d2V_formula, d2V_fd, M_R, l10_accum;
};

// True if h never decreases after the last entry at or below a tenth of its
// final value (the whole series if there is none).
bool monotone_last_decade(const std::vector<double>& h);

DiagnosticsSeries diagnostics_series(const Trajectory& traj, double R, double mu);
void write_csv(std::ostream& os, const DiagnosticsSeries& s);

}  // namespace invsq
