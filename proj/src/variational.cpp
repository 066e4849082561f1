#include "invsq/variational.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "invsq/error.hpp"
#include "invsq/ground_state.hpp"

namespace invsq {

namespace {

using cplx = std::complex<double>;

double power_integral(const RadialField& u, double p) {
  return space_integral(*u.basis, u.values.cwiseAbs().array().pow(p).matrix());
}

Eigen::VectorXcd nonlinearity(const Eigen::VectorXcd& u, double p) {
  Eigen::VectorXcd out(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) out(k) = std::pow(std::abs(u(k)), p - 2.0) * u(k);
  return out;
}

}  // namespace

double sobolev_quotient(const RadialField& u) {
  const double q = kinetic(u);
  if (!(q > 0.0)) throw Error(ErrorKind::ZeroField, "quotient of the zero field");
  return lebesgue_norm(u, u.params().critical_exponent()) / std::sqrt(q);
}

DilationFit fit_dilation(const RadialField& u) {
  const auto& p = u.params();
  const double pexp = p.critical_exponent();
  const double K = ground_state_constant(p);
  const double qu = kinetic(u);
  if (!(qu > 0.0)) throw Error(ErrorKind::ZeroField, "dilation fit of the zero field");
  const auto& r = u.nodes();
  const auto& w = u.basis->weights();
  // Since L_a W_l = W_l^{p-1} for every dilate W_l, the H^1_a inner product
  // with u reduces to int conj(u) W_l^{p-1}, with ||W_l||^2 = K.
  auto overlap = [&](double log_lambda) {
    const double lam = std::exp(log_lambda);
    const double s = std::pow(lam, p.half());
    cplx acc = 0.0;
    for (int k = 0; k < u.size(); ++k)
      acc += w(k) * std::conj(u.values(k)) * std::pow(s * ground_state_value(p, lam * r(k)), pexp - 1.0);
    return std::abs(p.omega() * acc) / std::sqrt(K * qu);
  };
  const double span = std::log(r(u.size() - 1) / r(0));
  const double lo = -0.5 * span, hi = 0.5 * span;
  double best = lo, best_val = -1.0;
  for (double x = lo; x <= hi; x += 0.25) {
    const double v = overlap(x);
    if (v > best_val) best_val = v, best = x;
  }
  double a = best - 0.25, b = best + 0.25;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = overlap(c), fd = overlap(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = overlap(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = overlap(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {std::exp(x), std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap(x)))};
}

VariationalReport maximize_quotient(const RadialField& init, const QuotientOptions& opts) {
  const RadialBasis& basis = *init.basis;
  const auto& p = init.params();
  const double pexp = p.critical_exponent();
  const double q0 = kinetic(init);
  if (!(q0 > 0.0)) throw Error(ErrorKind::ZeroField, "maximize_quotient needs a nonzero start");

  VariationalReport rep;
  RadialField u = (1.0 / std::sqrt(q0)) * init;
  double G = power_integral(u, pexp);
  double quotient = std::pow(G, 1.0 / pexp);
  rep.trace.push_back(quotient);
  double tau = opts.step0;
  rep.stop_reason = "iteration cap";
  for (int it = 1; it <= opts.max_iter; ++it) {
    rep.iterations = it;
    const Eigen::VectorXcd g = basis.solve_operator(nonlinearity(u.values, pexp));
    const Eigen::VectorXcd dir = g / G - u.values;
    bool accepted = false;
    double Gc = G;
    RadialField cand;
    while (tau >= 1e-12) {
      Eigen::VectorXcd v = u.values + tau * dir;
      const double qv = basis.form(v);
      cand = RadialField(init.basis, v / std::sqrt(qv));
      Gc = power_integral(cand, pexp);
      if (Gc > G) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      rep.converged = true;
      rep.stop_reason = "no ascent direction at roundoff level";
      break;
    }
    const double next = std::pow(Gc, 1.0 / pexp);
    const double change = (next - quotient) / quotient;
    u = cand;
    G = Gc;
    quotient = next;
    rep.trace.push_back(quotient);
    tau = std::min(opts.step0, 2.0 * tau);
    if (change < opts.tol) {
      rep.converged = true;
      rep.stop_reason = "relative change below tolerance";
      break;
    }
  }
  rep.best_quotient = quotient;
  rep.final_field = u;
  rep.reference_constant = std::pow(ground_state_constant(negative_part(p)), -1.0 / p.d);
  rep.gap = rep.reference_constant - rep.best_quotient;
  const auto fit = fit_dilation(u);
  rep.dilation = fit.lambda;
  rep.alignment_error = fit.error;
  return rep;
}

double shifted_bubble_quotient(double a, double shift) {
  if (!(shift >= 0.0) || !std::isfinite(shift)) throw Error(ErrorKind::InvalidParameter, "shift must be >= 0");
  if (!(a > -0.25)) throw Error(ErrorKind::HardyViolation, "a must exceed -1/4");
  using std::numbers::pi;
  const double t = shift;
  const double s3 = std::sqrt(3.0);
  // W0 = 3^{1/4} (1 + r^2)^{-1/2}, centred at t e_1.
  auto w2 = [&](double y2) { return s3 / (1.0 + y2); };

  // Polar (r, theta) in the meridian plane: dx = 2 pi r^2 sin(theta) dr dtheta.
  std::vector<double> rb{0.0};
  for (double off : {-16.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0})
    if (t + off > rb.back()) rb.push_back(t + off);
  const double rmax = 1e7;
  while (rb.back() < rmax) rb.push_back(std::min(rmax, std::max(2.0 * rb.back(), rb.back() + 1.0)));
  std::vector<double> tb{0.0};
  for (int k = 40; k >= 0; --k) tb.push_back(pi * std::ldexp(1.0, -k));

  struct Sums {
    double grad = 0.0, l6 = 0.0, hardy = 0.0;
  };
  auto integrate = [&](auto rule) {
    Sums s;
    for (std::size_t i = 0; i + 1 < rb.size(); ++i)
      for (std::size_t j = 0; j + 1 < tb.size(); ++j) {
        const double r0 = rb[i], r1 = rb[i + 1], t0 = tb[j], t1 = tb[j + 1];
        const double hr = 0.5 * (r1 - r0), ht = 0.5 * (t1 - t0);
        for (std::size_t m = 0; m < rule.abscissa().size(); ++m)
          for (int sm : {-1, 1}) {
            const double xr = rule.abscissa()[m] * sm;
            if (m == 0 && sm == -1 && rule.abscissa()[0] == 0.0) continue;
            const double r = r0 + hr * (1.0 + xr);
            const double wr = hr * rule.weights()[m];
            for (std::size_t n = 0; n < rule.abscissa().size(); ++n)
              for (int sn : {-1, 1}) {
                const double xt = rule.abscissa()[n] * sn;
                if (n == 0 && sn == -1 && rule.abscissa()[0] == 0.0) continue;
                const double th = t0 + ht * (1.0 + xt);
                const double wt = ht * rule.weights()[n];
                const double y2 = r * r + t * t - 2.0 * r * t * std::cos(th);
                const double f2 = w2(y2);
                const double area = 2.0 * pi * std::sin(th) * wr * wt;
                // |grad W0|^2 = sqrt(3) y^2 / (1 + y^2)^3.
                s.grad += area * r * r * s3 * y2 / std::pow(1.0 + y2, 3);
                s.l6 += area * r * r * f2 * f2 * f2;
                s.hardy += area * f2;
              }
          }
      }
    // Exterior r > rmax: W0 ~ 3^{1/4}/r, so the three integrands decay like
    // r^{-4}, r^{-6}, r^{-2} against r^2 dr.
    s.grad += 4.0 * pi * s3 / rmax;
    s.l6 += 4.0 * pi * 3.0 * s3 / (3.0 * std::pow(rmax, 3));
    s.hardy += 4.0 * pi * s3 / rmax;
    return s;
  };
  const Sums lo = integrate(boost::math::quadrature::gauss<double, 20>());
  const Sums hi = integrate(boost::math::quadrature::gauss<double, 30>());
  const double K0 = ground_state_constant(derive_params(3, 0.0));
  const double tol = 1e-6;
  if (std::abs(hi.hardy - lo.hardy) > tol * hi.hardy || std::abs(hi.grad - K0) > tol * K0 ||
      std::abs(hi.l6 - K0) > tol * K0)
    throw Error(ErrorKind::Convergence, "shifted bubble quadrature did not converge");
  return std::pow(hi.l6, 1.0 / 6.0) / std::sqrt(hi.grad + a * hi.hardy);
}

double energy(const RadialField& u, double mu) {
  const auto& p = u.params();
  const double pexp = p.critical_exponent();
  return 0.5 * kinetic(u) + mu * (p.d - 2.0) / (2.0 * p.d) * power_integral(u, pexp);
}

double virial_functional(const RadialField& u) {
  return kinetic(u) - power_integral(u, u.params().critical_exponent());
}

std::string to_string(TrapLabel label) {
  switch (label) {
    case TrapLabel::TrappedBelow: return "trapped-below";
    case TrapLabel::BlowupRegion: return "blowup-region";
    case TrapLabel::AboveThresholdEnergy: return "above-threshold-energy";
    case TrapLabel::Degenerate: return "degenerate";
  }
  return "unknown";
}

TrapClass classify_initial_data(const RadialField& u0, double delta0) {
  if (!(delta0 >= 0.0 && delta0 < 1.0)) throw Error(ErrorKind::InvalidParameter, "delta0 must lie in [0, 1)");
  const auto& p = u0.params();
  const double K = ground_state_constant(negative_part(p));
  const double E_star = K / p.d;
  TrapClass out;
  out.delta0 = delta0;
  out.energy_ratio = energy(u0, -1.0) / E_star;
  out.kinetic_ratio = kinetic(u0) / K;
  out.blowup_window = p.a > blowup_window_edge(p.d);
  const double tie = 1e-9;
  const double e_gap = out.energy_ratio - (1.0 - delta0);
  const double k_gap = out.kinetic_ratio - 1.0;
  if (std::abs(e_gap) <= tie || (e_gap < 0.0 && std::abs(k_gap) <= tie))
    out.label = TrapLabel::Degenerate;
  else if (e_gap > 0.0)
    out.label = TrapLabel::AboveThresholdEnergy;
  else
    out.label = k_gap < 0.0 ? TrapLabel::TrappedBelow : TrapLabel::BlowupRegion;
  return out;
}

}  // namespace invsq
