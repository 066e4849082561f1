#include "invsq/evolution.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <limits>

#include "invsq/error.hpp"

namespace invsq {

namespace {

using cplx = std::complex<double>;
const cplx I(0.0, 1.0);

double nonlinear_power(const CouplingParams& p) { return 4.0 / (p.d - 2); }

void nonlinear_phase(Eigen::VectorXcd& u, double dt, double mu, double power) {
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double m = std::abs(u(k));
    if (m == 0.0) continue;
    u(k) *= std::exp(-I * (mu * std::pow(m, power) * dt));
  }
}

Eigen::VectorXcd nonlinearity(const Eigen::VectorXcd& u, double power) {
  Eigen::VectorXcd out(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) out(k) = std::pow(std::abs(u(k)), power) * u(k);
  return out;
}

Eigen::VectorXcd phases(const HankelPlan& plan, double t) {
  const auto& lam = plan.eigenvalues();
  Eigen::VectorXcd e(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) e(k) = std::exp(-I * (lam(k) * t));
  return e;
}

// ||u||_{H^1_a} from Bessel coefficients.
double h1_coeffs(const HankelPlan& plan, const Eigen::VectorXcd& c) {
  return std::sqrt(plan.params().omega() * plan.eigenvalues().dot(c.cwiseAbs2()));
}

double h1(const HankelPlan& plan, const Eigen::VectorXcd& u) { return std::sqrt(plan.form(u)); }

double l2_distance(const HankelPlan& plan, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return std::sqrt(space_integral(plan, (a - b).cwiseAbs2()));
}

void require_plan(const PlanPtr& plan, const RadialField& u) {
  if (!plan) throw Error(ErrorKind::InvalidParameter, "null plan");
  require_basis(u, *plan);
}

Eigen::VectorXcd steps_values(const HankelPlan& plan, const Eigen::VectorXcd& u, double dt, int n, double mu,
                              bool nonlinear) {
  const double power = nonlinear_power(plan.params());
  if (!nonlinear) return plan.apply_spectral(u, phases(plan, dt * n));
  const Eigen::VectorXcd half = phases(plan, 0.5 * dt);
  const Eigen::VectorXcd full = phases(plan, dt);
  Eigen::VectorXcd c = plan.analyze_values(u).cwiseProduct(half);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXcd v = plan.synthesize_values(c);
    nonlinear_phase(v, dt, mu, power);
    c = plan.analyze_values(v).cwiseProduct(i + 1 < n ? full : half);
  }
  return plan.synthesize_values(c);
}

Eigen::VectorXcd conjugate_steps_values(const HankelPlan& plan, const Eigen::VectorXcd& u, double dt, int n,
                                        double mu, bool nonlinear) {
  return steps_values(plan, u.conjugate(), dt, n, mu, nonlinear).conjugate();
}

bool all_finite(const Eigen::VectorXcd& u) {
  for (Eigen::Index k = 0; k < u.size(); ++k)
    if (!std::isfinite(u(k).real()) || !std::isfinite(u(k).imag())) return false;
  return true;
}

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
};

GaussRule gauss_legendre(int n) {
  GaussRule g;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    if (z == 0.0) {
      g.x.push_back(0.0), g.w.push_back(w);
    } else {
      g.x.push_back(-z), g.w.push_back(w);
      g.x.push_back(z), g.w.push_back(w);
    }
  }
  std::vector<std::size_t> idx(g.x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return g.x[a] < g.x[b]; });
  GaussRule sorted;
  for (auto i : idx) sorted.x.push_back(g.x[i]), sorted.w.push_back(g.w[i]);
  return sorted;
}

// Lagrange basis on the nodes s, evaluated at x.
std::vector<double> lagrange(const std::vector<double>& s, double x) {
  const std::size_t m = s.size();
  std::vector<double> l(m, 1.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) l[j] *= (x - s[i]) / (s[j] - s[i]);
  return l;
}

}  // namespace

void EvolutionConfig::validate() const {
  if (mu != 1.0 && mu != -1.0) throw Error(ErrorKind::InvalidParameter, "mu must be +1 or -1");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(ErrorKind::InvalidParameter, "t_end must be positive");
  if (!(dt_init > 0.0)) throw Error(ErrorKind::InvalidParameter, "dt_init must be positive");
  if (!(local_error_tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "local_error_tol must be positive");
  if (!(blowup_factor > 1.0)) throw Error(ErrorKind::InvalidParameter, "blowup_factor must exceed 1");
  if (!(wall_guard > 0.0)) throw Error(ErrorKind::InvalidParameter, "wall_guard must be positive");
  if (!(wall_fraction > 0.0 && wall_fraction < 1.0))
    throw Error(ErrorKind::InvalidParameter, "wall_fraction must lie in (0, 1)");
  if (sample_every < 0) throw Error(ErrorKind::InvalidParameter, "sample_every must be >= 0");
  if (!(dt_min > 0.0) || max_steps < 1) throw Error(ErrorKind::InvalidParameter, "bad step limits");
  for (double s : sample_times)
    if (!(s > 0.0 && s <= t_end)) throw Error(ErrorKind::InvalidParameter, "sample times must lie in (0, t_end]");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::BlowupDetected: return "blowup_detected";
    case Termination::WallContamination: return "wall_contamination";
    case Termination::StepUnderflow: return "step_underflow";
  }
  return "unknown";
}

std::vector<double> Trajectory::accepted_steps() const {
  std::vector<double> out;
  for (const auto& s : steps)
    if (s.accepted) out.push_back(s.dt);
  return out;
}

const RadialField& Trajectory::at(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return fields[i];
  throw Error(ErrorKind::InsufficientSampling, "no sample stored at t = " + std::to_string(t));
}

RadialField strang_step(const PlanPtr& plan, const RadialField& u, double dt, double mu, bool nonlinear) {
  return strang_steps(plan, u, dt, 1, mu, nonlinear);
}

RadialField strang_steps(const PlanPtr& plan, const RadialField& u, double dt, int n, double mu, bool nonlinear) {
  require_plan(plan, u);
  if (!(dt > 0.0) || n < 1) throw Error(ErrorKind::InvalidParameter, "strang step needs dt > 0 and n >= 1");
  return RadialField(plan, steps_values(*plan, u.values, dt, n, mu, nonlinear));
}

RadialField conjugate_step(const PlanPtr& plan, const RadialField& u, double dt, double mu, bool nonlinear) {
  require_plan(plan, u);
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParameter, "strang step needs dt > 0");
  return RadialField(plan, conjugate_steps_values(*plan, u.values, dt, 1, mu, nonlinear));
}

Trajectory evolve(const PlanPtr& plan, const RadialField& u0, const EvolutionConfig& config) {
  require_plan(plan, u0);
  config.validate();
  const auto& params = plan->params();
  if (!params.evolution_admissible && !config.override_admissibility)
    throw Error(ErrorKind::InvalidParameter, "coupling outside the admissible evolution range (override required)");
  if (!all_finite(u0.values)) throw Error(ErrorKind::InvalidParameter, "initial data not finite");

  const HankelPlan& P = *plan;
  const double tol = config.local_error_tol;
  const double R = plan->radius();
  std::vector<Eigen::Index> wall_nodes;
  for (Eigen::Index k = 0; k < plan->size(); ++k)
    if (plan->nodes()(k) >= config.wall_fraction * R) wall_nodes.push_back(k);

  std::vector<double> targets = config.sample_times;
  targets.push_back(config.t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Trajectory traj;
  traj.mu = config.mu;
  traj.times.push_back(0.0);
  traj.fields.push_back(u0);
  const double h1_0 = h1(P, u0.values);
  traj.h1_norms.push_back(h1_0);
  traj.h1_times.push_back(0.0);

  Eigen::VectorXcd u = u0.values;
  double t = 0.0, dt = config.dt_init;
  std::size_t next = 0;
  long accepted = 0;
  auto store = [&](double time) {
    if (time > traj.times.back()) {
      traj.times.push_back(time);
      traj.fields.emplace_back(plan, u);
    }
  };

  while (next < targets.size()) {
    if (static_cast<long>(traj.steps.size()) >= config.max_steps) {
      traj.reason = Termination::StepUnderflow;
      break;
    }
    const double gap = targets[next] - t;
    const bool clipped = dt >= gap;
    const double h = clipped ? gap : dt;
    const Eigen::VectorXcd coarse = steps_values(P, u, h, 1, config.mu, config.nonlinear);
    Eigen::VectorXcd fine = steps_values(P, u, 0.5 * h, 2, config.mu, config.nonlinear);
    const double err = l2_distance(P, coarse, fine);
    const double factor = err > 0.0 ? 0.9 * std::cbrt(tol / err) : 2.0;
    const bool ok = err <= tol && all_finite(fine);
    traj.steps.push_back({t, h, err, ok});
    if (!ok) {
      dt = h * std::clamp(std::isfinite(factor) ? factor : 0.2, 0.2, 0.9);
      if (dt < config.dt_min) {
        traj.reason = Termination::StepUnderflow;
        break;
      }
      continue;
    }
    u = std::move(fine);
    ++accepted;
    if (clipped) {
      t = targets[next];
      ++next;
      dt = std::max(dt, h * std::min(2.0, factor));
    } else {
      t += h;
      dt = h * std::min(2.0, factor);
    }
    const double norm = h1(P, u);
    traj.h1_norms.push_back(norm);
    traj.h1_times.push_back(t);
    if (config.observer) config.observer(t, RadialField(plan, u));
    if (clipped || (config.sample_every > 0 && accepted % config.sample_every == 0)) store(t);

    if (norm > config.blowup_factor * h1_0) {
      traj.reason = Termination::BlowupDetected;
      break;
    }
    double wall = 0.0;
    for (auto k : wall_nodes) wall = std::max(wall, std::abs(u(k)));
    if (wall > config.wall_guard) {
      traj.reason = Termination::WallContamination;
      break;
    }
  }
  store(t);
  traj.final_time = t;
  return traj;
}

RadialField replay(const PlanPtr& plan, const RadialField& u, const std::vector<double>& steps, double mu,
                   bool backward, bool nonlinear, const std::function<void(int, const RadialField&)>& observer) {
  require_plan(plan, u);
  Eigen::VectorXcd v = u.values;
  const int n = static_cast<int>(steps.size());
  for (int i = 0; i < n; ++i) {
    const double h = steps[backward ? n - 1 - i : i];
    v = backward ? conjugate_steps_values(*plan, v, 0.5 * h, 2, mu, nonlinear)
                 : steps_values(*plan, v, 0.5 * h, 2, mu, nonlinear);
    if (observer) observer(i, RadialField(plan, v));
  }
  return RadialField(plan, v);
}

PicardReport picard_short_time(const PlanPtr& plan, const RadialField& u0, double T, int iters, double mu,
                               int nodes, bool nonlinear) {
  require_plan(plan, u0);
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidParameter, "T must be positive");
  if (iters < 1) throw Error(ErrorKind::InvalidParameter, "iters must be >= 1");
  if (nodes < 2 || nodes > 60) throw Error(ErrorKind::InvalidParameter, "nodes must lie in [2, 60]");
  const HankelPlan& P = *plan;
  const double power = nonlinear_power(P.params());
  const auto& lam = P.eigenvalues();
  const int N = P.size();
  const int M = nodes;

  const GaussRule gl = gauss_legendre(M);
  std::vector<double> s(M);
  for (int j = 0; j < M; ++j) s[j] = 0.5 * T * (1.0 + gl.x[j]);

  // W[i](k, j) = int_0^{s_i} e^{i s lambda_k} l_j(s) ds for i < M, and over
  // [0, T] for i = M. Panels are sized to the mode's oscillation.
  std::vector<double> breaks{0.0};
  for (double x : s) breaks.push_back(x);
  breaks.push_back(T);
  const GaussRule sub = gauss_legendre(16);
  std::vector<Eigen::MatrixXcd> W(M + 1, Eigen::MatrixXcd::Zero(N, M));
  for (int k = 0; k < N; ++k) {
    std::vector<cplx> acc(M, 0.0);
    for (int b = 0; b + 1 < static_cast<int>(breaks.size()); ++b) {
      const double lo = breaks[b], hi = breaks[b + 1];
      const int panels = std::max(1, static_cast<int>(std::ceil(lam(k) * (hi - lo) / 3.0)));
      const double width = (hi - lo) / panels;
      for (int q = 0; q < panels; ++q) {
        const double a = lo + q * width;
        for (std::size_t m = 0; m < sub.x.size(); ++m) {
          const double x = a + 0.5 * width * (1.0 + sub.x[m]);
          const cplx e = std::exp(I * (lam(k) * x)) * (0.5 * width * sub.w[m]);
          const auto l = lagrange(s, x);
          for (int j = 0; j < M; ++j) acc[j] += e * l[j];
        }
      }
      for (int j = 0; j < M; ++j) W[b](k, j) = acc[j];
    }
  }

  const Eigen::VectorXcd c0 = P.analyze_values(u0.values);
  std::vector<Eigen::VectorXcd> U(M);  // coefficients of u(s_j)
  for (int j = 0; j < M; ++j) U[j] = c0.cwiseProduct(phases(P, s[j]));

  PicardReport rep;
  Eigen::MatrixXcd G(N, M);
  auto assemble = [&](int i) {
    Eigen::VectorXcd v = c0 - I * mu * W[i].cwiseProduct(G).rowwise().sum();
    return v;
  };
  for (int it = 0; it < iters; ++it) {
    for (int j = 0; j < M; ++j)
      G.col(j) = nonlinear ? P.analyze_values(nonlinearity(P.synthesize_values(U[j]), power))
                           : Eigen::VectorXcd::Zero(N);
    double inc = 0.0;
    std::vector<Eigen::VectorXcd> next(M);
    for (int i = 0; i < M; ++i) {
      next[i] = assemble(i).cwiseProduct(phases(P, s[i]));
      inc = std::max(inc, h1_coeffs(P, next[i] - U[i]));
    }
    if (!std::isfinite(inc)) {
      // Diverged: keep the last finite iterate.
      rep.contracting = false;
      rep.increments.push_back(std::numeric_limits<double>::infinity());
      break;
    }
    U = std::move(next);
    rep.increments.push_back(inc);
    rep.iterations = it + 1;
  }
  // Final sweep at T with the last nonlinear samples.
  for (int j = 0; j < M; ++j)
    G.col(j) = nonlinear ? P.analyze_values(nonlinearity(P.synthesize_values(U[j]), power))
                         : Eigen::VectorXcd::Zero(N);
  Eigen::VectorXcd uT = P.synthesize_values(assemble(M).cwiseProduct(phases(P, T)));
  if (!all_finite(uT)) {
    rep.contracting = false;
    uT = P.synthesize_values(U[M - 1]);
  }
  rep.u = RadialField(plan, uT);

  const double scale = std::max(h1_coeffs(P, c0), std::numeric_limits<double>::min());
  for (std::size_t k = 1; k < rep.increments.size(); ++k)
    if (rep.increments[k] > rep.increments[k - 1] && rep.increments[k] > 1e-12 * scale) rep.contracting = false;
  return rep;
}

std::vector<double> dyadic_times(double t_end, double first) {
  if (!(first > 0.0) || !(t_end >= first)) throw Error(ErrorKind::InvalidParameter, "need 0 < first <= t_end");
  std::vector<double> out;
  for (double t = first; t <= t_end * (1.0 + 1e-12); t *= 2.0) out.push_back(t);
  if (t_end > out.back() * (1.0 + 1e-12)) out.push_back(t_end);
  return out;
}

ScatteringReport extract_scattering_state(const PlanPtr& plan, const Trajectory& traj) {
  if (traj.reason != Termination::Completed)
    throw Error(ErrorKind::InvalidParameter, "scattering needs a completed trajectory");
  const HankelPlan& P = *plan;
  ScatteringReport rep;
  const double t_end = traj.final_time;
  rep.times = dyadic_times(t_end, std::min(0.5, t_end));
  std::vector<Eigen::VectorXcd> w;
  for (double t : rep.times) {
    const RadialField& u = traj.at(t);
    require_plan(plan, u);
    w.push_back(P.analyze_values(u.values).cwiseProduct(phases(P, -t)));
  }
  for (std::size_t k = 1; k < w.size(); ++k) rep.cauchy_defects.push_back(h1_coeffs(P, w[k] - w[k - 1]));
  rep.u_plus = RadialField(plan, P.synthesize_values(w.back()));
  rep.decreasing = true;
  for (std::size_t k = 1; k < rep.cauchy_defects.size(); ++k)
    if (!(rep.cauchy_defects[k] < rep.cauchy_defects[k - 1])) rep.decreasing = false;
  return rep;
}

std::vector<StabilityReport> stability_compare(const PlanPtr& plan, const RadialField& u0, const RadialField& delta,
                                               const std::vector<double>& epsilons, const EvolutionConfig& config) {
  require_plan(plan, u0);
  require_plan(plan, delta);
  const double dn = h1(*plan, delta.values);
  if (!(dn > 0.0)) throw Error(ErrorKind::ZeroField, "perturbation direction is zero");
  const Trajectory ref = evolve(plan, u0, config);
  const auto steps = ref.accepted_steps();
  std::vector<Eigen::VectorXcd> base{u0.values};
  replay(plan, u0, steps, config.mu, false, config.nonlinear,
         [&](int, const RadialField& v) { base.push_back(v.values); });

  std::vector<StabilityReport> out;
  for (double eps : epsilons) {
    if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidParameter, "epsilon must be >= 0");
    const RadialField start(plan, u0.values + (eps / dn) * delta.values);
    double sup = h1(*plan, start.values - base[0]);
    replay(plan, start, steps, config.mu, false, config.nonlinear,
           [&](int i, const RadialField& v) { sup = std::max(sup, h1(*plan, v.values - base[i + 1])); });
    out.push_back({eps, eps > 0.0 ? sup / eps : sup});
  }
  return out;
}

}  // namespace invsq
