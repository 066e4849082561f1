#include "invsq/ground_state.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "invsq/cutoff.hpp"
#include "invsq/error.hpp"
#include "invsq/log_basis.hpp"
#include "invsq/special_functions.hpp"

namespace invsq {

namespace {

// r^{beta-1} / (1 + r^{2 beta}) without overflow at either end.
double profile_base(double beta, double r) {
  if (r <= 1.0) return std::pow(r, beta - 1.0) / (1.0 + std::pow(r, 2.0 * beta));
  return std::pow(r, -beta - 1.0) / (1.0 + std::pow(r, -2.0 * beta));
}

// r^{2 beta} / (1 + r^{2 beta}).
double profile_fraction(double beta, double r) {
  if (r <= 1.0) {
    const double x = std::pow(r, 2.0 * beta);
    return x / (1.0 + x);
  }
  return 1.0 / (1.0 + std::pow(r, -2.0 * beta));
}

}  // namespace

double ground_state_amplitude(const CouplingParams& params) {
  const double d = params.d;
  return std::pow(d * (d - 2.0) * params.beta * params.beta, 0.25 * (d - 2.0));
}

double ground_state_value(const CouplingParams& params, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::Domain, "ground state is evaluated at r > 0");
  return ground_state_amplitude(params) * std::pow(profile_base(params.beta, r), params.half());
}

double ground_state_derivative(const CouplingParams& params, double r) {
  const double b = params.beta;
  return ground_state_value(params, r) * params.half() * ((b - 1.0) - 2.0 * b * profile_fraction(b, r)) / r;
}

double ground_state_constant(const CouplingParams& params) {
  const double d = params.d;
  return std::pow(std::numbers::pi * d * (d - 2.0) / 4.0, 0.5 * d) * 2.0 * std::sqrt(std::numbers::pi) *
         std::pow(params.beta, d - 1.0) / gamma(0.5 * (d + 1.0));
}

double ground_state_constant_printed(const CouplingParams& params) {
  const double d = params.d;
  const double inner = 2.0 * std::sqrt(std::numbers::pi) * std::pow(params.beta, d - 1.0) / gamma(0.5 * (d + 1.0));
  return std::numbers::pi * d * (d - 2.0) / 4.0 * std::pow(inner, 2.0 / d);
}

double ground_state_l6_tail(const CouplingParams& params, double R) {
  // With x = r^{2 beta} and t = x/(1+x) the integrand becomes the beta
  // density t^{d/2-1} (1-t)^{d/2-1} / (2 beta).
  const double d = params.d;
  const double h = 0.5 * d;
  const double t = profile_fraction(params.beta, R);
  const double amp = std::pow(ground_state_amplitude(params), params.critical_exponent());
  return params.omega() * amp / (2.0 * params.beta) * boost::math::beta(h, h) * boost::math::ibetac(h, h, t);
}

GroundState eval_ground_state(const CouplingParams& params, const BasisPtr& basis) {
  const auto& bp = basis->params();
  if (bp.d != params.d || bp.a != params.a)
    throw Error(ErrorKind::GridMismatch, "basis order does not match the ground-state parameters");
  return GroundState{params, RadialField::from_function(basis, [&](double r) { return ground_state_value(params, r); })};
}

ResidualReport pde_residual(const RadialField& w) {
  const auto plan = std::dynamic_pointer_cast<const HankelPlan>(w.basis);
  if (!plan) throw Error(ErrorKind::GridMismatch, "pde_residual needs a field on a Bessel plan");
  const auto& p = plan->params();
  const double R = plan->radius();
  const auto& r = plan->nodes();
  const auto& wt = plan->weights();
  const double power = 4.0 / (p.d - 2.0);

  Eigen::VectorXcd v(plan->size());
  for (int k = 0; k < plan->size(); ++k) v(k) = wall_cutoff(r(k), 0.5 * R, 0.9 * R) * w.values(k);
  const Eigen::VectorXcd lv = plan->apply_operator(v);

  ResidualReport rep;
  rep.window = 0.5 * R;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < plan->size() && r(k) <= rep.window; ++k) {
    const std::complex<double> nl = std::pow(std::abs(v(k)), power) * v(k);
    num += wt(k) * std::norm(lv(k) - nl);
    den += wt(k) * std::norm(nl);
  }
  rep.residual = std::sqrt(num / den);

  const Eigen::VectorXcd c = plan->analyze_values(v);
  const int n = plan->size();
  const int top = std::max(1, n / 20);
  rep.spectral_tail = c.tail(top).cwiseAbs().maxCoeff() / c.cwiseAbs().maxCoeff();
  rep.resolution_warning = rep.spectral_tail > 1e-3;
  return rep;
}

ResidualReport pde_residual(const GroundState& ws) { return pde_residual(ws.field); }

PohozaevReport pohozaev_report(const CouplingParams& params, const BasisPtr& basis) {
  const auto& bp = basis->params();
  if (bp.d != params.d || bp.a != params.a)
    throw Error(ErrorKind::GridMismatch, "basis order does not match the ground-state parameters");
  const double omega = params.omega();
  const double pexp = params.critical_exponent();
  const auto& r = basis->nodes();
  const auto& w = basis->weights();

  PohozaevReport rep;
  rep.closed_form = ground_state_constant(params);
  rep.printed_form = ground_state_constant_printed(params);

  // The kinetic side is integrated in completed-square form |W' + sigma W/r|^2,
  // whose integrand stays in the class the Bessel rule integrates
  // spectrally; on [0, R] it differs from |W'|^2 + a W^2/r^2 by the
  // boundary term sigma R^{d-2} W(R)^2.
  double l6 = 0.0, kin = 0.0;
  for (int k = 0; k < basis->size(); ++k) {
    const double W = ground_state_value(params, r(k));
    const double g = ground_state_derivative(params, r(k)) + params.sigma * W / r(k);
    l6 += w(k) * std::pow(W, pexp);
    kin += w(k) * g * g;
  }
  if (const auto plan = std::dynamic_pointer_cast<const HankelPlan>(basis)) {
    // The Bessel rule stops half a cell short of the wall; add that half
    // cell and the exterior in closed form. Outside R, integration by parts
    // against the static equation turns the kinetic tail into
    // -R^{d-1} W W'(R) plus the L^p tail.
    const double R = plan->radius();
    const double jN = plan->grid().zeros(plan->size());
    const double half_cell = 0.5 * std::numbers::pi * R / jN;
    const double WR = ground_state_value(params, R), dWR = ground_state_derivative(params, R);
    const double gR = dWR + params.sigma * WR / R;
    const double Rd = std::pow(R, params.d - 1);
    l6 += half_cell * std::pow(WR, pexp) * Rd;
    kin += half_cell * gR * gR * Rd - params.sigma * std::pow(R, params.d - 2) * WR * WR;
    const double tail = ground_state_l6_tail(params, R);
    rep.q_l6 = omega * l6 + tail;
    rep.q_kinetic = omega * (kin - Rd * WR * dWR) + tail;
  } else if (std::dynamic_pointer_cast<const LogRadialBasis>(basis)) {
    rep.q_l6 = omega * l6;
    rep.q_kinetic = basis->form(eval_ground_state(params, basis).field.values);
  } else {
    rep.q_l6 = omega * l6;
    rep.q_kinetic = omega * kin;
  }
  rep.kinetic_l6_gap = std::abs(rep.q_kinetic - rep.q_l6) / rep.q_l6;
  rep.closed_form_gap = std::abs(rep.q_l6 - rep.closed_form) / rep.closed_form;
  rep.printed_form_discrepancy = std::abs(rep.printed_form - rep.closed_form) > 1e-6 * rep.closed_form;
  return rep;
}

PohozaevReport pohozaev_report(const CouplingParams& params) {
  return pohozaev_report(params, make_log_basis(params));
}

double first_order_invariant(const CouplingParams& params, double r, double amp) {
  if (!(r > 0.0)) throw Error(ErrorKind::Domain, "first_order_invariant needs r > 0");
  const double h = params.half();
  const double y = amp * std::pow(r, h) * ground_state_value(params, r);
  const double dy = amp * (h * std::pow(r, h - 1.0) * ground_state_value(params, r) +
                           std::pow(r, h) * ground_state_derivative(params, r));
  return -r * r * dy * dy + (h * h + params.a) * y * y - (params.d - 2.0) / params.d * std::pow(y, params.critical_exponent());
}

ThresholdReport thresholds(const CouplingParams& params) {
  ThresholdReport rep;
  rep.params = negative_part(params);
  const auto poho = pohozaev_report(rep.params);
  rep.kinetic_threshold = poho.q_kinetic;
  rep.energy_threshold = poho.q_kinetic / rep.params.d;
  rep.kinetic_closed_form = poho.closed_form;
  rep.discrepancy = std::abs(poho.q_kinetic - poho.closed_form) / poho.closed_form;
  return rep;
}

}  // namespace invsq
