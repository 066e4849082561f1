#include "invsq/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "invsq/data.hpp"
#include "invsq/diagnostics.hpp"
#include "invsq/ground_state.hpp"
#include "invsq/log_basis.hpp"
#include "invsq/operator_la.hpp"
#include "invsq/parallel.hpp"
#include "invsq/variational.hpp"

namespace invsq {

namespace {

using std::numbers::pi;
using cplx = std::complex<double>;

// Collects named sub-checks into a verdict and a one-line detail string.
class Verdict {
 public:
  void le(const std::string& name, double value, double bound) { add(name, value, "<=", bound, value <= bound); }
  void lt(const std::string& name, double value, double bound) { add(name, value, "<", bound, value < bound); }
  void gt(const std::string& name, double value, double bound) { add(name, value, ">", bound, value > bound); }
  void flag(const std::string& name, bool ok) {
    parts_.push_back(name + (ok ? " yes" : " NO"));
    pass_ = pass_ && ok;
  }
  void note(const std::string& text) { parts_.push_back(text); }
  bool pass() const { return pass_; }
  std::string detail() const {
    std::string s;
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "; " : "") + parts_[i];
    return s;
  }

 private:
  void add(const std::string& name, double value, const char* rel, double bound, bool ok) {
    std::ostringstream os;
    os << std::setprecision(4) << name << " " << value << " " << rel << " " << bound << (ok ? "" : " FAILED");
    parts_.push_back(os.str());
    pass_ = pass_ && ok;
  }
  bool pass_ = true;
  std::vector<std::string> parts_;
};

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

double h1_dist(const PlanPtr& plan, const RadialField& a, const RadialField& b) {
  return std::sqrt(plan->form(a.values - b.values));
}

double rel_drift(double x, double x0) { return std::abs(x - x0) / std::abs(x0); }

void transform_correctness(Verdict& v) {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  double roundtrip = 0.0;
  for (double nu : {0.3, 0.5, 1.0}) {
    const auto plan = make_plan(derive_params(3, nu * nu - 0.25), 15.0, 256);
    Eigen::VectorXcd c(256);
    for (int k = 0; k < 256; ++k) c(k) = cplx(g(rng), g(rng)) / (1.0 + 0.1 * k);
    const RadialField u = synthesize(plan, SpectralField{plan, c});
    roundtrip = std::max(roundtrip, (analyze(plan, u).coeffs - c).norm() / c.norm());
  }
  v.le("round trip", roundtrip, 1e-10);
  const auto plan = make_plan(derive_params(3, 0.0), 20.0, 512);
  const auto u = RadialField::from_function(plan, [](double r) { return std::exp(-r * r / 2); });
  const Eigen::VectorXcd prof = spectral_profile(analyze(plan, u));
  double err = 0.0;
  for (int k = 0; k < 512; ++k) {
    const double rho = plan->grid().spectral_nodes(k);
    err = std::max(err, std::abs(prof(k) - std::exp(-rho * rho / 2)));
  }
  v.le("Gaussian pair", err, 1e-6);
}

void spectral_calculus(Verdict& v) {
  const auto plan = make_plan(derive_params(3, -3.0 / 16.0), 20.0, 256);
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  Eigen::VectorXcd c(plan->size());
  for (int k = 0; k < plan->size(); ++k) c(k) = cplx(g(rng), g(rng)) * std::exp(-std::pow(k / 60.0, 2));
  const RadialField u(plan, plan->synthesize_values(c));
  const double n0 = std::sqrt(mass(u));
  double unitarity = 0.0;
  for (double t = 1e-4; t < 1e3; t *= 10.0)
    unitarity = std::max(
        unitarity, std::abs(std::sqrt(mass(apply_multiplier(plan, u, MultiplierSpec::propagator(t)))) - n0) / n0);
  v.le("unitarity drift", unitarity, 1e-12);
  const auto h1 =
      apply_multiplier(plan, apply_multiplier(plan, u, MultiplierSpec::heat(0.3)), MultiplierSpec::heat(0.5));
  const auto h2 = apply_multiplier(plan, u, MultiplierSpec::heat(0.8));
  v.le("semigroup", (plan->analyze_values(h1.values) - plan->analyze_values(h2.values)).norm() / c.norm(), 1e-12);

  double kernel = 0.0;
  bool stable = true;
  std::string consts;
  for (double a : {-3.0 / 16.0, 0.0, 0.75}) {
    const auto p = derive_params(3, a);
    const auto big = make_plan(p, 30.0, 1024);
    const auto b = RadialField::from_function(big, [](double r) { return std::exp(-std::pow((r - 4.0) / 0.8, 2)); });
    const double t = 0.5;
    const auto hv = apply_multiplier(big, b, MultiplierSpec::heat(t));
    const auto& r = big->nodes();
    const auto& w = big->weights();
    double err = 0.0, scale = 0.0;
    for (int m = 0; m < big->size() && r(m) <= 12.0; m += 37) {
      double acc = 0.0;
      for (int k = 0; k < big->size(); ++k) acc += w(k) * heat_kernel_radial(p, t, r(m), r(k)) * b.values(k).real();
      err = std::max(err, std::abs(acc - hv.values(m).real()));
      scale = std::max(scale, std::abs(acc));
    }
    kernel = std::max(kernel, err / scale);
    const auto fit = fit_heat_envelope(p, 12);
    stable = stable && fit.stable && std::isfinite(fit.C_fine);
    consts += (consts.empty() ? "" : ", ") + fmt(fit.C_coarse, 3) + "/" + fmt(fit.C_fine, 3);
  }
  v.le("kernel vs spectral", kernel, 1e-6);
  v.flag("envelope stable (C " + consts + ")", stable);
}

void ground_state_criterion(Verdict& v) {
  for (double a : {-3.0 / 16.0, 0.0, 0.75}) {
    const auto p = derive_params(3, a);
    const std::string tag = "a=" + fmt(a);
    v.le(tag + " residual N=1024", pde_residual(eval_ground_state(p, make_plan(p, 60.0, 1024))).residual, 1e-4);
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    for (int N : {128, 256, 512}) {
      const double res = pde_residual(eval_ground_state(p, make_plan(p, 60.0, N))).residual;
      decreasing = decreasing && res < prev;
      prev = res;
    }
    v.flag(tag + " decreasing", decreasing);
    double inv = 0.0;
    for (int i = 0; i < 30; ++i) {
      const double r = std::pow(10.0, -3.0 + 6.0 * i / 29.0);
      const double y = std::pow(r, p.half()) * ground_state_value(p, r);
      inv = std::max(inv, std::abs(first_order_invariant(p, r)) / (p.nu * p.nu * y * y));
    }
    v.le(tag + " invariant", inv, 1e-10);
  }
}

void pohozaev_criterion(Verdict& v) {
  for (auto [a, ref] : {std::pair{0.0, 12.82100}, std::pair{-3.0 / 16.0, 3.205250}}) {
    const auto p = derive_params(3, a);
    const auto rep = pohozaev_report(p);
    const std::string tag = "a=" + fmt(a);
    v.le(tag + " kinetic vs l6", rep.kinetic_l6_gap, 1e-6);
    const double closed = p.beta * p.beta * std::pow(3.0, 1.5) * pi * pi / 4.0;
    v.le(tag + " vs closed form", std::abs(rep.q_l6 - closed) / closed, 1e-5);
    v.le(tag + " vs " + fmt(ref, 7), std::abs(rep.q_l6 - ref) / ref, 1e-5);
    v.flag(tag + " printed form flagged (" + fmt(rep.printed_form, 6) + ")", rep.printed_form_discrepancy);
  }
}

void sharp_constants(Verdict& v) {
  const auto gauss = [](const BasisPtr& b, double w) {
    return RadialField::from_function(b, [=](double r) { return std::exp(-r * r / (w * w)); });
  };
  for (auto [a, ref] : {std::pair{0.0, 0.427240}, std::pair{-3.0 / 16.0, 0.67821}}) {
    const auto b = make_log_basis(derive_params(3, a));
    const auto rep = maximize_quotient(gauss(b, 1.0));
    const std::string tag = "a=" + fmt(a);
    v.le(tag + " |best - " + fmt(ref, 6) + "|", std::abs(rep.best_quotient - ref), 1e-3);
    v.le(tag + " alignment", rep.alignment_error, 1e-3);
  }
  const auto b = make_log_basis(derive_params(3, 0.5));
  double best = 0.0;
  for (double w : {0.3, 1.0, 5.0}) best = std::max(best, maximize_quotient(gauss(b, w)).best_quotient);
  v.lt("a=0.5 radial best", best, 0.427240);
  const double q20 = shifted_bubble_quotient(0.5, 20.0);
  v.le("shifted bubble t=20 gap", 1.0 - q20 / 0.427240, 0.02);
}

void conservation(Verdict& v) {
  const auto plan = make_plan(derive_params(3, 0.0), 20.0, 256);
  const auto u0 = gaussian_bump(plan, 1.0);
  EvolutionConfig c;
  c.t_end = 1.0;
  const auto tr = evolve(plan, u0, c);
  v.flag("completed", tr.reason == Termination::Completed);
  const auto& u = tr.final_field();
  v.le("mass drift", rel_drift(mass(u), mass(u0)), 1e-6);
  v.le("energy drift", rel_drift(energy(u, 1.0), energy(u0, 1.0)), 1e-6);
  const auto back = replay(plan, u, tr.accepted_steps(), 1.0, true);
  v.le("time reversal", h1_dist(plan, back, u0) / std::sqrt(kinetic(u0)), 1e-6);

  const auto pm = derive_params(3, -3.0 / 16.0);
  const auto sp = make_plan(pm, 20.0, 192);
  const auto w = gaussian_bump(sp, 1.2);
  const double T = 0.2;
  const auto ref = strang_steps(sp, w, T / 8192, 8192, 1.0);
  std::vector<double> errs;
  for (int n : {64, 128, 256, 512}) errs.push_back(h1_dist(sp, strang_steps(sp, w, T / n, n, 1.0), ref));
  double worst = 0.0;
  std::string slopes;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double s = std::log2(errs[i - 1] / errs[i]);
    worst = std::max(worst, std::abs(s - 2.0));
    slopes += (i > 1 ? "," : "") + fmt(s, 4);
  }
  v.le("Strang slopes " + slopes + " |s-2|", worst, 0.1);
}

void oracle_agreement(Verdict& v) {
  const auto plan = make_plan(derive_params(3, 0.0), 20.0, 256);
  const auto u0 = gaussian_bump(plan, 0.5);
  const auto pr = picard_short_time(plan, u0, 0.05, 10, 1.0);
  EvolutionConfig c;
  c.t_end = 0.05;
  const auto tr = evolve(plan, u0, c);
  v.flag("contracting", pr.contracting);
  v.le("Picard vs evolve", h1_dist(plan, pr.u, tr.final_field()), 1e-6);
}

void static_soliton(Verdict& v) {
  const auto plan = make_plan(derive_params(3, -3.0 / 16.0), 40.0, 1024);
  const auto u0 = truncated_ground_state(plan, 1.0);
  const double norm = std::sqrt(kinetic(u0));
  double worst = 0.0;
  EvolutionConfig c;
  c.mu = -1.0;
  c.t_end = 0.25;
  c.wall_guard = 1e-4;
  c.observer = [&](double, const RadialField& u) { worst = std::max(worst, h1_dist(plan, u, u0) / norm); };
  const auto tr = evolve(plan, u0, c);
  v.flag("completed", tr.reason == Termination::Completed);
  v.le("max relative distance to W", worst, 1e-3);
}

void virial_criterion(Verdict& v) {
  double mismatch = 0.0, min_d2 = std::numeric_limits<double>::infinity();
  for (double a : {-3.0 / 16.0, 0.0}) {
    const auto plan = make_plan(derive_params(3, a), 40.0, 512);
    EvolutionConfig c;
    c.t_end = 1.0;
    c.wall_guard = 1e-4;
    for (int i = 1; i < 100; ++i) c.sample_times.push_back(0.01 * i);
    const auto tr = evolve(plan, gaussian_bump(plan, 1.0), c);
    v.flag("defocusing a=" + fmt(a) + " completed", tr.reason == Termination::Completed);
    const auto rep = virial_report(tr, 5.0, 1.0);
    mismatch = std::max(mismatch, rep.mismatch);
    for (double x : rep.d2V_formula) min_d2 = std::min(min_d2, x);
  }
  v.le("formula vs difference", mismatch, 1e-3);
  v.gt("defocusing min d2V", min_d2, 0.0);

  const auto p = derive_params(3, -3.0 / 16.0);
  const auto plan = make_plan(p, 40.0, 512);
  const double K = ground_state_constant(negative_part(p));
  EvolutionConfig c;
  c.mu = -1.0;
  c.t_end = 0.5;
  c.wall_guard = 1e-4;
  for (int i = 1; i < 50; ++i) c.sample_times.push_back(0.01 * i);

  const auto trapped = gaussian_bump(plan, 0.5);
  v.flag("A=0.5 trapped-below", classify_initial_data(trapped).label == TrapLabel::TrappedBelow);
  const auto tt = evolve(plan, trapped, c);
  v.flag("trapped run completed", tt.reason == Termination::Completed);
  double c_trap = std::numeric_limits<double>::infinity();
  for (const auto& f : tt.fields) c_trap = std::min(c_trap, virial_functional(f) / kinetic(f));

  const auto blow = gaussian_bump(plan, 3.0);
  v.flag("A=3 blowup-region", classify_initial_data(blow).label == TrapLabel::BlowupRegion);
  const auto tb = evolve(plan, blow, c);
  double c_blow = std::numeric_limits<double>::infinity();
  for (const auto& f : tb.fields) c_blow = std::min(c_blow, -virial_functional(f) / K);
  v.note("blowup run " + to_string(tb.reason) + " at t=" + fmt(tb.final_time));
  v.gt("recorded c = min(" + fmt(c_trap) + ", " + fmt(c_blow) + ")", std::min(c_trap, c_blow), 0.0);
}

void blowup_criterion(Verdict& v) {
  const auto plan = make_plan(derive_params(3, -3.0 / 16.0), 40.0, 512);
  const auto u0 = truncated_ground_state(plan, 1.2);
  const auto cls = classify_initial_data(u0);
  v.note("datum " + to_string(cls.label) + ", E/E* " + fmt(cls.energy_ratio) + ", Q/Q* " + fmt(cls.kinetic_ratio));
  EvolutionConfig c;
  c.mu = -1.0;
  c.t_end = 1.0;
  c.wall_guard = 1e-4;
  const auto tr = evolve(plan, u0, c);
  v.flag("blowup detected (" + to_string(tr.reason) + " at t=" + fmt(tr.final_time) + ")",
         tr.reason == Termination::BlowupDetected);
  v.flag("monotone last decade", tr.reason == Termination::BlowupDetected && monotone_last_decade(tr.h1_norms));
}

void scattering_criterion(Verdict& v) {
  const auto plan = make_plan(derive_params(3, 0.0), 80.0, 384);
  const auto u0 = gaussian_bump(plan, 0.5, 2.0);
  EvolutionConfig c;
  c.t_end = 8.0;
  c.sample_times = dyadic_times(8.0);
  const auto tr = evolve(plan, u0, c);
  v.flag("completed", tr.reason == Termination::Completed);
  if (tr.reason != Termination::Completed) return;
  const auto sc = extract_scattering_state(plan, tr);
  v.flag("defects decreasing", sc.decreasing);
  v.le("final defect", sc.cauchy_defects.back(), 1e-2);
  v.le("L2 match", rel_drift(std::sqrt(mass(sc.u_plus)), std::sqrt(mass(u0))), 1e-6);
}

// Max over random regular fields of value(plan, u) on N and 2N.
template <class F>
std::pair<double, double> sweep(double a, double R, int N, int samples, std::uint64_t seed, F value) {
  const auto p = derive_params(3, a);
  const PlanPtr plans[2] = {make_plan(p, R, N), make_plan(p, R, 2 * N)};
  std::vector<double> out(2 * samples);
  parallel_for(out.size(), [&](std::size_t job) {
    std::mt19937_64 rng(seed + job / 2);
    const auto& plan = plans[job % 2];
    out[job] = value(plan, random_regular_field(plan, rng));
  });
  double m[2] = {0.0, 0.0};
  for (std::size_t j = 0; j < out.size(); ++j) m[j % 2] = std::max(m[j % 2], out[j]);
  return {m[0], m[1]};
}

void inequality_sweeps(Verdict& v) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> amp(0.05, 1.5), width(0.2, 5.0), cen(0.0, 4.0);
  double slack = std::numeric_limits<double>::infinity();
  for (double a : {-3.0 / 16.0, 0.0, 0.5}) {
    const auto p = derive_params(3, a);
    const auto b = make_log_basis(p);
    const double K = ground_state_constant(negative_part(p));
    for (int trial = 0; trial < 50; ++trial) {
      const double A = amp(rng), w = width(rng), c = cen(rng);
      const auto u = RadialField::from_function(
          b, [=](double r) { return A * (std::exp(-r * r / (w * w)) + 0.3 * std::exp(-std::pow((r - c) / w, 2))); });
      const double y = kinetic(u) / K;
      slack = std::min(slack, 2.0 * energy(u, -1.0) / K - (y - y * y * y / 3.0));
    }
  }
  v.gt("energy-trapping slack", slack, -1e-6);

  const double s = 10.0 / 3.0;
  const auto [sc, sf] = sweep(-3.0 / 16.0, 40.0, 256, 20, 100, [&](const PlanPtr& plan, const RadialField& u) {
    return strichartz_ratio(plan, u, s, s, 4.0);
  });
  v.le("Strichartz C " + fmt(sc) + "/" + fmt(sf) + " change", std::abs(sf - sc) / sc, 0.2);
  const auto [lc, lf] = sweep(-3.0 / 16.0, 20.0, 256, 10, 200, [](const PlanPtr& plan, const RadialField& u) {
    double m = 0.0;
    for (double R : {1.0, 2.0, 4.0, 8.0}) m = std::max(m, local_smoothing_ratio(plan, u, R).ratio);
    return m;
  });
  v.le("local smoothing C " + fmt(lc) + "/" + fmt(lf) + " change", std::abs(lf - lc) / lc, 0.2);
}

struct Criterion {
  int id;
  const char* name;
  void (*run)(Verdict&);
};

const Criterion kCriteria[] = {
    {1, "transform correctness", transform_correctness},
    {2, "spectral calculus", spectral_calculus},
    {3, "ground state", ground_state_criterion},
    {4, "Pohozaev", pohozaev_criterion},
    {5, "sharp constants", sharp_constants},
    {6, "conservation", conservation},
    {7, "oracle agreement", oracle_agreement},
    {8, "static soliton", static_soliton},
    {9, "virial", virial_criterion},
    {10, "blowup", blowup_criterion},
    {11, "scattering", scattering_criterion},
    {12, "inequality sweeps", inequality_sweeps},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result,
                                            const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  for (const auto& c : kCriteria) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    CriterionResult r{c.id, c.name, false, "", 0.0};
    try {
      c.run(v);
      r.pass = v.pass();
      r.detail = v.detail();
    } catch (const std::exception& e) {
      r.detail = v.detail() + (v.detail().empty() ? "" : "; ") + "error: " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    out.push_back(r);
  }
  return out;
}

}  // namespace invsq
