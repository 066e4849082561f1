#include "invsq/experiments.hpp"

#include <fftw3.h>
#include <unistd.h>

#include <Eigen/Core>
#include <algorithm>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "invsq/acceptance.hpp"
#include "invsq/data.hpp"
#include "invsq/diagnostics.hpp"
#include "invsq/error.hpp"
#include "invsq/ground_state.hpp"
#include "invsq/log_basis.hpp"
#include "invsq/operator_la.hpp"
#include "invsq/parallel.hpp"
#include "invsq/variational.hpp"

#ifndef INVSQ_VERSION
#define INVSQ_VERSION "0.0.0"
#endif

namespace invsq {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::Config, what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& obj, const std::string& path, const std::vector<std::string>& allowed) {
  if (!obj.is_object()) config_error(path + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      config_error(join(path, key) + ": unknown key");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error(join(path, key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_error(join(path, key) + ": must be finite");
  return x;
}

long long get_integer(const json& obj, const std::string& key, const std::string& path, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) config_error(join(path, key) + ": expected an integer");
  return v.get<long long>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) config_error(join(path, key) + ": expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) config_error(join(path, key) + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& obj, const std::string& key, const std::string& path,
                                const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array()) config_error(join(path, key) + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) config_error(join(path, key) + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) config_error(field + ": " + what);
}

bool is_evolution(const std::string& name) {
  return name == "evolve" || name == "virial" || name == "blowup" || name == "scattering" ||
         name == "picard-crosscheck";
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// CSV from named columns of equal length.
std::string make_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& cols) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
  os << '\n';
  const std::size_t n = cols.empty() ? 0 : cols.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      os << (j ? "," : "");
      if (std::isnan(cols[j][i]))
        os << "nan";
      else
        os << cols[j][i];
    }
    os << '\n';
  }
  return os.str();
}

void add_check(ExperimentResult& res, const std::string& name, double value, const std::string& rel, double bound) {
  bool pass = false;
  if (rel == "<=") pass = value <= bound;
  if (rel == ">=") pass = value >= bound;
  if (rel == "<") pass = value < bound;
  if (rel == ">") pass = value > bound;
  if (rel == "==") pass = value == bound;
  res.checks.push_back({name, value, bound, rel, pass});
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

CouplingParams params_of(const ExperimentConfig& c) { return derive_params(c.d, c.a); }

RadialField make_data(const ExperimentConfig& cfg, const PlanPtr& plan) {
  const auto& d = cfg.data;
  if (d.profile == "bump") return gaussian_bump(plan, d.amplitude, d.width);
  if (d.profile == "ground-state") return truncated_ground_state(plan, d.amplitude);
  std::mt19937_64 rng(cfg.seed);
  return std::complex<double>(d.amplitude) * random_regular_field(plan, rng);
}

EvolutionConfig evolution_of(const ExperimentConfig& cfg) {
  EvolutionConfig e = cfg.evolution;
  e.mu = cfg.mu;
  return e;
}

double virial_radius(const ExperimentConfig& cfg) {
  return cfg.options.virial_radius > 0.0 ? cfg.options.virial_radius : 0.25 * cfg.R;
}

double relative_drift(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v - x.front()));
  return x.front() != 0.0 ? m / std::abs(x.front()) : m;
}

void trajectory_summary(ExperimentResult& res, const Trajectory& tr) {
  res.results["termination"] = to_string(tr.reason);
  res.results["final_time"] = tr.final_time;
  res.results["steps"] = tr.steps.size();
  res.results["accepted_steps"] = tr.accepted_steps().size();
  res.results["samples"] = tr.times.size();
}

// --- experiments -----------------------------------------------------------

void run_ground_state(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto p = params_of(cfg);
  const auto plan = make_plan(p, cfg.R, cfg.N);
  const auto gs = eval_ground_state(p, plan);
  const auto rr = pde_residual(gs);
  const auto poh = pohozaev_report(p);
  double inv = 0.0;
  for (int i = 0; i < 30; ++i) {
    const double r = std::pow(10.0, -3.0 + 6.0 * i / 29.0);
    const double y = std::pow(r, p.half()) * ground_state_value(p, r);
    inv = std::max(inv, std::abs(first_order_invariant(p, r)) / (p.nu * p.nu * y * y));
  }
  res.results["residual"] = rr.residual;
  res.results["residual_window"] = rr.window;
  res.results["spectral_tail"] = rr.spectral_tail;
  res.results["resolution_warning"] = rr.resolution_warning;
  res.results["q_kinetic"] = poh.q_kinetic;
  res.results["q_l6"] = poh.q_l6;
  res.results["closed_form"] = poh.closed_form;
  res.results["printed_form"] = poh.printed_form;
  res.results["printed_form_discrepancy"] = poh.printed_form_discrepancy;
  res.results["first_order_invariant"] = inv;
  add_check(res, "pde_residual", rr.residual, "<=", 1e-4);
  add_check(res, "pohozaev_kinetic_vs_l6", poh.kinetic_l6_gap, "<=", 1e-6);
  add_check(res, "pohozaev_vs_closed_form", poh.closed_form_gap, "<=", 1e-5);
  add_check(res, "first_order_invariant", inv, "<=", 1e-10);
  std::vector<double> r(plan->nodes().data(), plan->nodes().data() + plan->size()), w;
  for (int k = 0; k < plan->size(); ++k) w.push_back(gs.field.values(k).real());
  res.csv = make_csv({"r", "W"}, {r, w});
}

void run_sharp_constant(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto p = params_of(cfg);
  const auto b = make_log_basis(p, cfg.options.log_step);
  const auto rep = maximize_quotient(gaussian_bump(b, 1.0, cfg.data.width));
  res.results["best_quotient"] = rep.best_quotient;
  res.results["reference_constant"] = rep.reference_constant;
  res.results["gap"] = rep.gap;
  res.results["dilation"] = rep.dilation;
  res.results["alignment_error"] = rep.alignment_error;
  res.results["iterations"] = rep.iterations;
  res.results["converged"] = rep.converged;
  res.results["stop_reason"] = rep.stop_reason;
  if (cfg.a <= 0.0) {
    add_check(res, "converged", rep.converged ? 1.0 : 0.0, "==", 1.0);
    add_check(res, "gap_to_sharp_constant", std::abs(rep.gap), "<=", 1e-3);
    add_check(res, "alignment_with_soliton", rep.alignment_error, "<=", 1e-3);
  } else {
    add_check(res, "strictly_below_free_constant", rep.best_quotient, "<", rep.reference_constant);
  }
  std::vector<double> it, q;
  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    it.push_back(static_cast<double>(i + 1));
    q.push_back(rep.trace[i]);
  }
  res.csv = make_csv({"iteration", "quotient"}, {it, q});
}

void run_shifted_bubble(const ExperimentConfig& cfg, ExperimentResult& res) {
  const double c0 = std::pow(ground_state_constant(derive_params(3, 0.0)), -1.0 / 3.0);
  std::vector<double> shifts = cfg.options.shifts, q(shifts.size()), gap(shifts.size());
  std::sort(shifts.begin(), shifts.end());
  parallel_for(shifts.size(), [&](std::size_t i) { q[i] = shifted_bubble_quotient(cfg.a, shifts[i]); });
  double max_q = -1.0, min_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size(); ++i) {
    gap[i] = 1.0 - q[i] / c0;
    max_q = std::max(max_q, q[i]);
    if (i) min_step = std::min(min_step, q[i] - q[i - 1]);
  }
  res.results["free_constant"] = c0;
  res.results["quotients"] = q;
  res.results["relative_gaps"] = gap;
  if (cfg.a > 0.0) {
    add_check(res, "below_free_constant", max_q, "<", c0);
    if (q.size() > 1) add_check(res, "increasing_in_shift", min_step, ">", 0.0);
  }
  res.csv = make_csv({"shift", "quotient", "relative_gap"}, {shifts, q, gap});
}

void run_evolve(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto plan = make_plan(params_of(cfg), cfg.R, cfg.N);
  const auto tr = evolve(plan, make_data(cfg, plan), evolution_of(cfg));
  trajectory_summary(res, tr);
  const auto s = diagnostics_series(tr, virial_radius(cfg), cfg.mu);
  const double dm = relative_drift(s.mass), de = relative_drift(s.energy);
  res.results["mass_drift"] = dm;
  res.results["energy_drift"] = de;
  res.results["spacetime_L10"] = s.l10_accum.back();
  add_check(res, "completed", tr.reason == Termination::Completed ? 1.0 : 0.0, "==", 1.0);
  add_check(res, "mass_drift", dm, "<=", 1e-6);
  add_check(res, "energy_drift", de, "<=", 1e-6);
  std::ostringstream os;
  write_csv(os, s);
  res.csv = os.str();
}

void run_virial(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto plan = make_plan(params_of(cfg), cfg.R, cfg.N);
  const auto u0 = make_data(cfg, plan);
  auto ev = evolution_of(cfg);
  if (ev.sample_every == 0 && ev.sample_times.empty())
    for (double t = cfg.options.sample_dt; t < ev.t_end * (1.0 - 1e-12); t += cfg.options.sample_dt)
      ev.sample_times.push_back(t);
  const auto tr = evolve(plan, u0, ev);
  trajectory_summary(res, tr);
  const auto v = virial_report(tr, virial_radius(cfg), cfg.mu);
  std::vector<double> functional;
  for (const auto& f : tr.fields) functional.push_back(virial_functional(f));
  res.results["mismatch"] = v.mismatch;
  res.results["rate_mismatch"] = v.rate_mismatch;
  res.results["virial_radius"] = virial_radius(cfg);
  add_check(res, "formula_vs_difference", v.mismatch, "<=", 1e-3);
  if (cfg.mu > 0.0) {
    add_check(res, "defocusing_convexity", *std::min_element(v.d2V_formula.begin(), v.d2V_formula.end()), ">", 0.0);
  } else {
    const auto cls = classify_initial_data(u0);
    res.results["trap_label"] = to_string(cls.label);
    const double K = ground_state_constant(negative_part(params_of(cfg)));
    if (cls.label == TrapLabel::TrappedBelow) {
      double c = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < functional.size(); ++i) c = std::min(c, functional[i] / kinetic(tr.fields[i]));
      res.results["coercivity_constant"] = c;
      add_check(res, "trapped_functional_lower_bound", c, ">", 0.0);
    } else if (cls.label == TrapLabel::BlowupRegion) {
      double c = std::numeric_limits<double>::infinity();
      for (double f : functional) c = std::min(c, -f / K);
      res.results["coercivity_constant"] = c;
      add_check(res, "blowup_functional_upper_bound", c, ">", 0.0);
    }
  }
  res.csv = make_csv({"t", "V_R", "dV_R", "dV_R_fd", "d2V_R_formula", "d2V_R_fd", "virial_functional"},
                     {v.times, v.V, v.dV, v.dV_fd, v.d2V_formula, v.d2V_fd, functional});
}

void run_blowup(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto plan = make_plan(params_of(cfg), cfg.R, cfg.N);
  const auto u0 = make_data(cfg, plan);
  const auto cls = classify_initial_data(u0);
  const auto tr = evolve(plan, u0, evolution_of(cfg));
  trajectory_summary(res, tr);
  res.results["trap_label"] = to_string(cls.label);
  res.results["energy_ratio"] = cls.energy_ratio;
  res.results["kinetic_ratio"] = cls.kinetic_ratio;
  res.results["h1_initial"] = tr.h1_norms.front();
  res.results["h1_final"] = tr.h1_norms.back();
  res.results["h1_max"] = *std::max_element(tr.h1_norms.begin(), tr.h1_norms.end());
  add_check(res, "blowup_detected", tr.reason == Termination::BlowupDetected ? 1.0 : 0.0, "==", 1.0);
  add_check(res, "monotone_last_decade", monotone_last_decade(tr.h1_norms) ? 1.0 : 0.0, "==", 1.0);
  res.csv = make_csv({"t", "h1_norm"}, {tr.h1_times, tr.h1_norms});
}

void run_scattering(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto plan = make_plan(params_of(cfg), cfg.R, cfg.N);
  const auto u0 = make_data(cfg, plan);
  auto ev = evolution_of(cfg);
  ev.sample_times = dyadic_times(ev.t_end);
  const auto tr = evolve(plan, u0, ev);
  trajectory_summary(res, tr);
  add_check(res, "completed", tr.reason == Termination::Completed ? 1.0 : 0.0, "==", 1.0);
  if (tr.reason != Termination::Completed) return;
  const auto sc = extract_scattering_state(plan, tr);
  const double m0 = std::sqrt(mass(u0)), mp = std::sqrt(mass(sc.u_plus));
  res.results["cauchy_defects"] = sc.cauchy_defects;
  res.results["l2_u0"] = m0;
  res.results["l2_u_plus"] = mp;
  add_check(res, "defects_decreasing", sc.decreasing ? 1.0 : 0.0, "==", 1.0);
  add_check(res, "final_defect", sc.cauchy_defects.back(), "<=", 1e-2);
  add_check(res, "l2_match", std::abs(mp - m0) / m0, "<=", 1e-6);
  std::vector<double> t(sc.times.begin() + 1, sc.times.end());
  res.csv = make_csv({"t", "cauchy_defect"}, {t, sc.cauchy_defects});
}

// Random data on a plan and its refinement; returns per-sample values.
template <class F>
std::pair<std::vector<double>, std::vector<double>> refinement_sweep(const ExperimentConfig& cfg, F value) {
  const auto p = params_of(cfg);
  const auto coarse = make_plan(p, cfg.R, cfg.N);
  const auto fine = make_plan(p, cfg.R, 2 * cfg.N);
  const int n = cfg.options.samples;
  std::vector<double> vc(n), vf(n);
  parallel_for(static_cast<std::size_t>(2 * n), [&](std::size_t job) {
    const int i = static_cast<int>(job / 2);
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(i));
    const auto& plan = job % 2 ? fine : coarse;
    const auto u = random_regular_field(plan, rng);
    (job % 2 ? vf : vc)[i] = value(plan, u);
  });
  return {vc, vf};
}

void stability_checks(ExperimentResult& res, const std::string& what, const std::vector<double>& vc,
                      const std::vector<double>& vf) {
  const double cc = *std::max_element(vc.begin(), vc.end());
  const double cf = *std::max_element(vf.begin(), vf.end());
  res.results[what + "_constant_coarse"] = cc;
  res.results[what + "_constant_fine"] = cf;
  add_check(res, what + "_constant_finite", std::isfinite(cc) && std::isfinite(cf) ? 1.0 : 0.0, "==", 1.0);
  add_check(res, what + "_constant_stability", std::abs(cf - cc) / cc, "<=", 0.2);
}

void run_strichartz(const ExperimentConfig& cfg, ExperimentResult& res) {
  const double q = cfg.options.q, d = cfg.d;
  const double r = std::isinf(q) ? 2.0 : d / (0.5 * d - 2.0 / q);
  auto [vc, vf] = refinement_sweep(
      cfg, [&](const PlanPtr& plan, const RadialField& u) { return strichartz_ratio(plan, u, q, r, cfg.options.T); });
  res.results["q"] = number(q);
  res.results["r"] = r;
  stability_checks(res, "strichartz", vc, vf);
  std::vector<double> idx;
  for (std::size_t i = 0; i < vc.size(); ++i) idx.push_back(static_cast<double>(i));
  res.csv = make_csv({"sample", "ratio_N", "ratio_2N"}, {idx, vc, vf});
}

void run_local_smoothing(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto& radii = cfg.options.radii;
  auto [vc, vf] = refinement_sweep(cfg, [&](const PlanPtr& plan, const RadialField& u) {
    double m = 0.0;
    for (double R : radii) m = std::max(m, local_smoothing_ratio(plan, u, R).ratio);
    return m;
  });
  res.results["radii"] = radii;
  stability_checks(res, "local_smoothing", vc, vf);
  std::vector<double> idx;
  for (std::size_t i = 0; i < vc.size(); ++i) idx.push_back(static_cast<double>(i));
  res.csv = make_csv({"sample", "max_ratio_N", "max_ratio_2N"}, {idx, vc, vf});
}

void run_sobolev_equiv(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto free_p = derive_params(cfg.d, 0.0);
  const auto fc = make_plan(free_p, cfg.R, cfg.N), ff = make_plan(free_p, cfg.R, 2 * cfg.N);
  auto [vc, vf] = refinement_sweep(cfg, [&](const PlanPtr& plan, const RadialField& u) {
    const auto ratios = sobolev_equiv_ratio(plan, u, cfg.options.s, cfg.options.p, plan->size() == cfg.N ? fc : ff);
    return std::max(ratios.first, ratios.second);
  });
  res.results["s"] = cfg.options.s;
  res.results["p"] = cfg.options.p;
  stability_checks(res, "sobolev_equivalence", vc, vf);
  std::vector<double> idx;
  for (std::size_t i = 0; i < vc.size(); ++i) idx.push_back(static_cast<double>(i));
  res.csv = make_csv({"sample", "max_ratio_N", "max_ratio_2N"}, {idx, vc, vf});
}

void run_heat_check(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto p = params_of(cfg);
  const auto plan = make_plan(p, cfg.R, cfg.N);
  const auto u = make_data(cfg, plan);
  const double n0 = std::sqrt(mass(u));
  double unitarity = 0.0;
  for (double t = 1e-4; t < 1e3; t *= 10.0)
    unitarity =
        std::max(unitarity, std::abs(std::sqrt(mass(apply_multiplier(plan, u, MultiplierSpec::propagator(t)))) - n0) / n0);
  const auto h1 = apply_multiplier(plan, apply_multiplier(plan, u, MultiplierSpec::heat(0.3)), MultiplierSpec::heat(0.5));
  const auto h2 = apply_multiplier(plan, u, MultiplierSpec::heat(0.8));
  const double semigroup = (plan->analyze_values(h1.values) - plan->analyze_values(h2.values)).norm() /
                           plan->analyze_values(u.values).norm();
  const auto fit = fit_heat_envelope(p, 12);
  res.results["unitarity_drift"] = unitarity;
  res.results["semigroup_defect"] = semigroup;
  res.results["envelope_c"] = fit.c;
  res.results["envelope_C_coarse"] = fit.C_coarse;
  res.results["envelope_C_fine"] = fit.C_fine;
  add_check(res, "unitarity_drift", unitarity, "<=", 1e-12);
  add_check(res, "semigroup_defect", semigroup, "<=", 1e-12);
  add_check(res, "envelope_stability", std::abs(fit.C_fine - fit.C_coarse) / fit.C_coarse, "<=", 0.2);
}

void run_picard(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto plan = make_plan(params_of(cfg), cfg.R, cfg.N);
  const auto u0 = make_data(cfg, plan);
  const double T = cfg.options.T;
  const auto pr = picard_short_time(plan, u0, T, cfg.options.iterations, cfg.mu, 20, cfg.evolution.nonlinear);
  auto ev = evolution_of(cfg);
  ev.t_end = T;
  ev.sample_times.clear();
  const auto tr = evolve(plan, u0, ev);
  const double dist = std::sqrt(plan->form(pr.u.values - tr.final_field().values));
  res.results["distance"] = dist;
  res.results["increments"] = pr.increments;
  res.results["contracting"] = pr.contracting;
  add_check(res, "contracting", pr.contracting ? 1.0 : 0.0, "==", 1.0);
  add_check(res, "picard_vs_evolve", dist, "<=", 1e-6);
  std::vector<double> it;
  for (std::size_t i = 0; i < pr.increments.size(); ++i) it.push_back(static_cast<double>(i + 1));
  res.csv = make_csv({"iteration", "increment"}, {it, pr.increments});
}

void run_acceptance_suite(const ExperimentConfig&, ExperimentResult& res) {
  const auto all = run_acceptance();
  std::vector<double> id, pass, secs;
  json list = json::array();
  for (const auto& c : all) {
    add_check(res, "criterion_" + std::to_string(c.id) + "_" + c.name, c.pass ? 1.0 : 0.0, "==", 1.0);
    list.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    id.push_back(c.id);
    pass.push_back(c.pass ? 1.0 : 0.0);
  }
  res.results["criteria"] = list;
  res.csv = make_csv({"criterion", "pass"}, {id, pass});
}

using Runner = std::function<void(const ExperimentConfig&, ExperimentResult&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m{
      {"ground-state", run_ground_state},   {"sharp-constant", run_sharp_constant},
      {"shifted-bubble", run_shifted_bubble}, {"evolve", run_evolve},
      {"virial", run_virial},               {"blowup", run_blowup},
      {"scattering", run_scattering},       {"heat-check", run_heat_check},
      {"strichartz", run_strichartz},       {"local-smoothing", run_local_smoothing},
      {"sobolev-equiv", run_sobolev_equiv}, {"picard-crosscheck", run_picard},
      {"acceptance-suite", run_acceptance_suite},
  };
  return m;
}

const ExperimentInfo& info_for(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return e;
  config_error("experiment: unknown experiment '" + name + "' (see `invsq-nls list`)");
}

void parse_options(const json& o, ExperimentConfig& cfg) {
  const std::string path = "options";
  reject_unknown(o, path, info_for(cfg.experiment).options);
  auto& op = cfg.options;
  op.shifts = get_numbers(o, "shifts", path, op.shifts);
  for (double t : op.shifts) require(t >= 0.0, "options.shifts", "shifts must be non-negative");
  require(!op.shifts.empty(), "options.shifts", "at least one shift");
  if (o.contains("q") && o.at("q").is_string()) {
    require(o.at("q").get<std::string>() == "inf", "options.q", "a number or \"inf\"");
    op.q = std::numeric_limits<double>::infinity();
  } else {
    op.q = get_number(o, "q", path, op.q);
  }
  require(op.q > 2.0, "options.q", "must exceed 2");
  op.T = get_number(o, "T", path, op.T);
  require(op.T > 0.0, "options.T", "must be positive");
  op.samples = static_cast<int>(get_integer(o, "samples", path, op.samples));
  require(op.samples >= 1 && op.samples <= 10000, "options.samples", "must be in [1, 10000]");
  op.radii = get_numbers(o, "radii", path, op.radii);
  require(!op.radii.empty(), "options.radii", "at least one radius");
  for (double r : op.radii) require(r > 0.0, "options.radii", "radii must be positive");
  op.s = get_number(o, "s", path, op.s);
  op.p = get_number(o, "p", path, op.p);
  op.iterations = static_cast<int>(get_integer(o, "iterations", path, op.iterations));
  require(op.iterations >= 1 && op.iterations <= 1000, "options.iterations", "must be in [1, 1000]");
  op.sample_dt = get_number(o, "sample_dt", path, op.sample_dt);
  require(op.sample_dt > 0.0, "options.sample_dt", "must be positive");
  op.virial_radius = get_number(o, "virial_radius", path, op.virial_radius);
  require(op.virial_radius >= 0.0, "options.virial_radius", "must be non-negative");
  op.log_step = get_number(o, "log_step", path, op.log_step);
  require(op.log_step > 0.0 && op.log_step <= 0.5, "options.log_step", "must be in (0, 0.5]");
}

void parse_evolution(const json& e, EvolutionConfig& ev) {
  const std::string path = "evolution";
  reject_unknown(e, path,
                 {"t_end", "dt_init", "local_error_tol", "blowup_factor", "wall_guard", "wall_fraction", "sample_every",
                  "sample_times", "dt_min", "max_steps", "nonlinear"});
  ev.t_end = get_number(e, "t_end", path, ev.t_end);
  ev.dt_init = get_number(e, "dt_init", path, ev.dt_init);
  ev.local_error_tol = get_number(e, "local_error_tol", path, ev.local_error_tol);
  ev.blowup_factor = get_number(e, "blowup_factor", path, ev.blowup_factor);
  ev.wall_guard = get_number(e, "wall_guard", path, ev.wall_guard);
  ev.wall_fraction = get_number(e, "wall_fraction", path, ev.wall_fraction);
  const long long every = get_integer(e, "sample_every", path, ev.sample_every);
  require(every >= 0, "evolution.sample_every", "must be non-negative");
  ev.sample_every = static_cast<int>(every);
  ev.sample_times = get_numbers(e, "sample_times", path, ev.sample_times);
  ev.dt_min = get_number(e, "dt_min", path, ev.dt_min);
  const long long steps = get_integer(e, "max_steps", path, static_cast<long long>(ev.max_steps));
  require(steps > 0, "evolution.max_steps", "must be positive");
  ev.max_steps = static_cast<decltype(ev.max_steps)>(steps);
  ev.nonlinear = get_bool(e, "nonlinear", path, ev.nonlinear);
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> reg{
      {"ground-state", "soliton residual on the Bessel grid, Pohozaev values, first-order invariant", {}},
      {"sharp-constant", "maximize the Sobolev quotient on the log grid (data.width sets the start)", {"log_step"}},
      {"shifted-bubble", "quotient of translated free bubbles, d = 3", {"shifts"}},
      {"evolve", "adaptive Strang run with the diagnostics series", {"virial_radius"}},
      {"virial", "virial formula vs finite differences; defocusing sign or trap sign", {"sample_dt", "virial_radius"}},
      {"blowup", "focusing run expected to end in blowup_detected", {}},
      {"scattering", "defocusing run with Cauchy defects of the scattering state at dyadic times", {}},
      {"heat-check", "propagator unitarity, heat semigroup, heat-kernel envelope fit", {}},
      {"strichartz", "Strichartz ratios over random data at N and 2N", {"q", "T", "samples"}},
      {"local-smoothing", "local smoothing ratios over random data and radii at N and 2N", {"radii", "samples"}},
      {"sobolev-equiv", "Sobolev equivalence ratios over random data at N and 2N", {"s", "p", "samples"}},
      {"picard-crosscheck", "Picard iteration of the Duhamel formula against the Strang integrator",
       {"T", "iterations"}},
      {"acceptance-suite", "every acceptance criterion with its verdict", {}},
  };
  return reg;
}

ExperimentConfig parse_config(const std::string& text, bool override_admissibility) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string msg = e.what();
    if (const auto pos = msg.find(": syntax error"); pos != std::string::npos) msg = msg.substr(pos + 2);
    config_error("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
  reject_unknown(doc, "", {"experiment", "params", "grid", "evolution", "data", "options", "output", "seed"});
  ExperimentConfig cfg;
  cfg.source = doc;
  require(doc.contains("experiment"), "experiment", "required");
  cfg.experiment = get_string(doc, "experiment", "", "");
  info_for(cfg.experiment);

  const json empty = json::object();
  const json& params = doc.contains("params") ? doc.at("params") : empty;
  reject_unknown(params, "params", {"d", "a", "mu"});
  cfg.d = static_cast<int>(get_integer(params, "d", "params", cfg.d));
  cfg.a = get_number(params, "a", "params", cfg.a);
  cfg.mu = get_number(params, "mu", "params", cfg.mu);
  require(cfg.d >= 3 && cfg.d <= 9, "params.d", "must be in [3, 9]");
  require(cfg.mu == 1.0 || cfg.mu == -1.0, "params.mu", "must be +1 (defocusing) or -1 (focusing)");
  CouplingParams p;
  try {
    p = derive_params(cfg.d, cfg.a);
  } catch (const Error& e) {
    config_error(std::string("params.a: ") + e.what());
  }

  const json& grid = doc.contains("grid") ? doc.at("grid") : empty;
  reject_unknown(grid, "grid", {"R", "N"});
  cfg.R = get_number(grid, "R", "grid", cfg.R);
  cfg.N = static_cast<int>(get_integer(grid, "N", "grid", cfg.N));
  require(cfg.R > 0.0, "grid.R", "must be positive");
  require(cfg.N >= 8 && cfg.N <= 8192, "grid.N", "must be in [8, 8192]");

  if (doc.contains("evolution")) parse_evolution(doc.at("evolution"), cfg.evolution);
  cfg.evolution.mu = cfg.mu;
  cfg.evolution.override_admissibility = override_admissibility;
  try {
    cfg.evolution.validate();
  } catch (const Error& e) {
    config_error(std::string("evolution: ") + e.what());
  }

  const json& data = doc.contains("data") ? doc.at("data") : empty;
  reject_unknown(data, "data", {"profile", "amplitude", "width"});
  cfg.data.profile = get_string(data, "profile", "data", cfg.data.profile);
  require(cfg.data.profile == "bump" || cfg.data.profile == "ground-state" || cfg.data.profile == "random",
          "data.profile", "one of bump, ground-state, random");
  cfg.data.amplitude = get_number(data, "amplitude", "data", cfg.data.amplitude);
  cfg.data.width = get_number(data, "width", "data", cfg.data.width);
  require(cfg.data.width > 0.0, "data.width", "must be positive");

  if (doc.contains("options")) parse_options(doc.at("options"), cfg);
  cfg.output = get_string(doc, "output", "", cfg.output);
  require(!cfg.output.empty(), "output", "must not be empty");
  const long long seed = get_integer(doc, "seed", "", 0);
  require(seed >= 0, "seed", "must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);

  const auto& name = cfg.experiment;
  if (is_evolution(name)) {
    require(cfg.d == 3 || override_admissibility, "params.d", "evolution is gated to d = 3 without --override-admissibility");
    require(p.evolution_admissible || override_admissibility, "params.a",
            "outside the admissible window for evolution; pass --override-admissibility to run anyway");
  }
  if (name == "blowup") require(cfg.mu == -1.0, "params.mu", "blowup runs are focusing (mu = -1)");
  if (name == "scattering") require(cfg.mu == 1.0, "params.mu", "scattering runs are defocusing (mu = +1)");
  if (name == "shifted-bubble") require(cfg.d == 3, "params.d", "shifted-bubble is implemented for d = 3");
  if (name == "virial" || name == "evolve") {
    const double rv = cfg.options.virial_radius > 0.0 ? cfg.options.virial_radius : 0.25 * cfg.R;
    require(std::sqrt(2.0) * rv < cfg.R, "options.virial_radius", "sqrt(2) times the radius must stay inside the grid");
  }
  if (name == "sobolev-equiv") {
    require(cfg.options.s > 0.0 && cfg.options.s < 2.0, "options.s", "must be in (0, 2)");
    require(riesz_window(p, cfg.options.s, cfg.options.p), "options.p", "outside the Sobolev equivalence window");
  }
  if (name == "strichartz" || name == "local-smoothing" || name == "sobolev-equiv")
    require(2 * cfg.N <= 8192, "grid.N", "the refinement 2N must not exceed 8192");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, bool override_admissibility) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), override_admissibility);
}

nlohmann::json resolved_config(const ExperimentConfig& c) {
  const auto& e = c.evolution;
  const auto& o = c.options;
  json j;
  j["experiment"] = c.experiment;
  j["params"] = {{"d", c.d}, {"a", c.a}, {"mu", c.mu}};
  j["grid"] = {{"R", c.R}, {"N", c.N}};
  j["evolution"] = {{"t_end", e.t_end},
                    {"dt_init", e.dt_init},
                    {"local_error_tol", e.local_error_tol},
                    {"blowup_factor", e.blowup_factor},
                    {"wall_guard", e.wall_guard},
                    {"wall_fraction", e.wall_fraction},
                    {"sample_every", e.sample_every},
                    {"sample_times", e.sample_times},
                    {"dt_min", e.dt_min},
                    {"max_steps", e.max_steps},
                    {"nonlinear", e.nonlinear}};
  j["data"] = {{"profile", c.data.profile}, {"amplitude", c.data.amplitude}, {"width", c.data.width}};
  json opts = json::object();
  for (const auto& key : info_for(c.experiment).options) {
    if (key == "shifts") opts[key] = o.shifts;
    if (key == "q") opts[key] = std::isinf(o.q) ? json("inf") : json(o.q);
    if (key == "T") opts[key] = o.T;
    if (key == "samples") opts[key] = o.samples;
    if (key == "radii") opts[key] = o.radii;
    if (key == "s") opts[key] = o.s;
    if (key == "p") opts[key] = o.p;
    if (key == "iterations") opts[key] = o.iterations;
    if (key == "sample_dt") opts[key] = o.sample_dt;
    if (key == "virial_radius") opts[key] = o.virial_radius;
    if (key == "log_step") opts[key] = o.log_step;
  }
  j["options"] = opts;
  j["output"] = c.output;
  j["seed"] = c.seed;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = resolved_config(cfg);
  j.erase("output");
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

bool ExperimentResult::pass() const {
  if (!error.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.experiment = cfg.experiment;
  try {
    runners().at(cfg.experiment)(cfg, res);
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

std::vector<std::filesystem::path> write_results(const ExperimentConfig& cfg, const ExperimentResult& res,
                                                 const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string stem = cfg.experiment + "-" + config_hash(cfg);
  std::vector<fs::path> written;
  auto atomic_write = [&](const fs::path& target, const std::string& content) {
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw Error(ErrorKind::Config, "cannot write " + tmp.string());
      out << content;
      if (!out.flush()) throw Error(ErrorKind::Config, "write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
    written.push_back(target);
  };

  std::vector<std::string> files;
  if (!res.csv.empty()) files.push_back(stem + ".csv");
  const auto p = params_of(cfg);
  json m;
  m["experiment"] = cfg.experiment;
  m["config"] = resolved_config(cfg);
  m["config_hash"] = config_hash(cfg);
  m["override_admissibility"] = cfg.evolution.override_admissibility;
  m["params"] = {{"d", p.d},       {"a", p.a},   {"sigma", p.sigma},
                 {"beta", p.beta}, {"nu", p.nu}, {"evolution_admissible", p.evolution_admissible}};
  m["versions"] = {{"invsq", INVSQ_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"boost", BOOST_LIB_VERSION},
                   {"fftw", std::string(fftw_version)}};
  m["tolerances"] = {{"local_error_tol", cfg.evolution.local_error_tol}, {"wall_guard", cfg.evolution.wall_guard}};
  m["results"] = res.results;
  json checks = json::array();
  for (const auto& c : res.checks)
    checks.push_back(
        {{"name", c.name}, {"value", number(c.value)}, {"relation", c.relation}, {"bound", c.bound}, {"pass", c.pass}});
  m["checks"] = checks;
  if (!res.error.empty()) m["error"] = res.error;
  m["verdict"] = res.pass() ? "pass" : "fail";
  m["data_files"] = files;
  m["timestamp"] = utc_timestamp();
  if (!res.csv.empty()) atomic_write(dir / (stem + ".csv"), res.csv);
  atomic_write(dir / (stem + ".json"), m.dump(2) + "\n");
  return written;
}

}  // namespace invsq
