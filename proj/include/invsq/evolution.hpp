#pragma once

#include <functional>
#include <string>
#include <vector>

#include "invsq/hankel.hpp"

namespace invsq {

// i u_t = L_a u + mu |u|^4 u on a Bessel plan; mu = +1 defocusing, -1 focusing.
struct EvolutionConfig {
  double mu = 1.0;
  double t_end = 1.0;
  double dt_init = 1e-3;
  double local_error_tol = 1e-8;  // L^2 step-doubling estimate
  double blowup_factor = 10.0;    // stop once ||u||_{H^1_a} exceeds this times the initial value
  double wall_guard = 1e-6;       // max |u| allowed on r >= wall_fraction R
  double wall_fraction = 0.9;
  int sample_every = 0;           // store every n-th accepted step (0: none beyond the fixed times)
  std::vector<double> sample_times;  // times the stepper lands on exactly and stores
  double dt_min = 1e-14;
  long max_steps = 10000000;
  bool nonlinear = true;
  bool override_admissibility = false;
  // Called after every accepted step with (t, u).
  std::function<void(double, const RadialField&)> observer;

  void validate() const;
};

enum class Termination { Completed, BlowupDetected, WallContamination, StepUnderflow };
std::string to_string(Termination t);

struct StepRecord {
  double t = 0.0;   // time at the start of the step
  double dt = 0.0;
  double error = 0.0;
  bool accepted = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<RadialField> fields;
  std::vector<StepRecord> steps;  // every attempt, accepted or not
  std::vector<double> h1_norms;   // ||u||_{H^1_a} after every accepted step, starting with u0
  std::vector<double> h1_times;
  Termination reason = Termination::Completed;
  double final_time = 0.0;
  double mu = 1.0;

  const RadialField& final_field() const { return fields.back(); }
  // Accepted step sizes in order; replaying them reproduces the run.
  std::vector<double> accepted_steps() const;
  // Sample stored at time t (exact match within 1e-12), or throws.
  const RadialField& at(double t) const;
};

// Half linear step, exact nonlinear phase u e^{-i mu |u|^4 dt}, half linear step.
RadialField strang_step(const PlanPtr& plan, const RadialField& u, double dt, double mu, bool nonlinear = true);
// n consecutive Strang steps of size dt with the inner half steps merged.
RadialField strang_steps(const PlanPtr& plan, const RadialField& u, double dt, int n, double mu,
                         bool nonlinear = true);
// The time-reversed step conj(S_dt(conj(u))), which undoes strang_step exactly.
RadialField conjugate_step(const PlanPtr& plan, const RadialField& u, double dt, double mu, bool nonlinear = true);

// Adaptive step-doubling integration; the finer (two half step) solution is kept.
Trajectory evolve(const PlanPtr& plan, const RadialField& u0, const EvolutionConfig& config);

// Applies a recorded step sequence (each step taken as two half steps, as
// evolve does). With backward = true the sequence is walked in reverse with
// conjugate steps, retracing a run from its end to its start.
RadialField replay(const PlanPtr& plan, const RadialField& u, const std::vector<double>& steps, double mu,
                   bool backward, bool nonlinear = true,
                   const std::function<void(int, const RadialField&)>& observer = nullptr);

struct PicardReport {
  RadialField u;                     // solution at T
  std::vector<double> increments;    // max_j ||v^{k+1}(s_j) - v^k(s_j)||_{H^1_a}, per iteration
  int iterations = 0;
  bool contracting = true;           // increments decreased geometrically
};

// Picard iteration of the Duhamel formula in the interaction picture
// v = e^{itL_a} u: v(t) = u0 - i mu int_0^t e^{isL_a} |u|^4 u(s) ds, with v
// carried at Gauss-Legendre nodes on [0, T], the integrand interpolated by
// the node polynomial, and exact propagators.
PicardReport picard_short_time(const PlanPtr& plan, const RadialField& u0, double T, int iters, double mu,
                               int nodes = 20, bool nonlinear = true);

struct ScatteringReport {
  RadialField u_plus;                 // e^{i t_end L_a} u(t_end)
  std::vector<double> times;          // dyadic times t_k
  std::vector<double> cauchy_defects; // ||w(t_{k+1}) - w(t_k)||_{H^1_a}
  bool decreasing = false;
};

// Needs samples at the dyadic times 2^k <= t_end (request them through
// EvolutionConfig::sample_times; see dyadic_times).
ScatteringReport extract_scattering_state(const PlanPtr& plan, const Trajectory& traj);
std::vector<double> dyadic_times(double t_end, double first = 0.5);

struct StabilityReport {
  double epsilon = 0.0;
  double sup_ratio = 0.0;  // sup_t ||u_eps(t) - u(t)||_{H^1_a} / eps
};

// Evolves u0 adaptively, then u0 + eps * delta/||delta||_{H^1_a} on the same
// step sequence, for each eps.
std::vector<StabilityReport> stability_compare(const PlanPtr& plan, const RadialField& u0, const RadialField& delta,
                                               const std::vector<double>& epsilons, const EvolutionConfig& config);

}  // namespace invsq
