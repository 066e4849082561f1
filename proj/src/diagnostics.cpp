#include "invsq/diagnostics.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "invsq/cutoff.hpp"
#include "invsq/error.hpp"
#include "invsq/special_functions.hpp"
#include "invsq/variational.hpp"

namespace invsq {

namespace {

using cplx = std::complex<double>;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd abs_pow(const Eigen::VectorXcd& u, double p) { return u.cwiseAbs().array().pow(p).matrix(); }

double integral(const RadialBasis& b, const Eigen::VectorXd& f) { return space_integral(b, f); }

Eigen::VectorXcd free_flow(const HankelPlan& plan, const Eigen::VectorXcd& c, double t) {
  const auto& lam = plan.eigenvalues();
  Eigen::VectorXcd e(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) e(k) = c(k) * std::exp(cplx(0.0, -lam(k) * t));
  return plan.synthesize_values(e);
}

// Adaptive Gauss-Kronrod on [a, b].
template <class F>
double integrate(F f, double a, double b, double tol) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 25, tol, &err);
  if (!std::isfinite(v) || err > 10.0 * tol * std::max(std::abs(v), 1e-300))
    throw Error(ErrorKind::Convergence, "time quadrature did not converge");
  return v;
}

// Adaptive Gauss-Kronrod bisection to an absolute error target.
template <class F>
double integrate_abs(F f, double a, double b, double abs_tol, int depth = 30) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= abs_tol) return v;
  if (depth == 0) throw Error(ErrorKind::Convergence, "quadrature did not converge");
  const double m = 0.5 * (a + b);
  return integrate_abs(f, a, m, 0.5 * abs_tol, depth - 1) + integrate_abs(f, m, b, 0.5 * abs_tol, depth - 1);
}

// sqrt(<lambda>) time scale of the data: 1 / (Q / M).
double data_time_scale(const RadialField& u0) {
  const double m = mass(u0), q = kinetic(u0);
  if (!(m > 0.0) || !(q > 0.0)) throw Error(ErrorKind::ZeroField, "zero data");
  return m / q;
}

// Three-point derivative estimates on nonuniform samples.
std::pair<double, double> fd_derivatives(double t0, double t1, double t2, double f0, double f1, double f2) {
  const double h0 = t1 - t0, h1 = t2 - t1;
  const double d1 = (-h1 / (h0 * (h0 + h1))) * f0 + ((h1 - h0) / (h0 * h1)) * f1 + (h0 / (h1 * (h0 + h1))) * f2;
  const double d2 = 2.0 * (f0 / (h0 * (h0 + h1)) - f1 / (h0 * h1) + f2 / (h1 * (h0 + h1)));
  return {d1, d2};
}

// B(s) = int_0^inf x^{d-1} f'(x)^2 (1 + x^2/s^2)^{-3/2} dx with f = x^{-(d-2)/2} J_nu(x),
// so that int r^{d-1} |d_r psi_k|^2 / (R <r/R>^3) dr = B(kR) / R for the
// generalized eigenfunction psi_k = r^{-(d-2)/2} J_nu(k r).
double smoothing_kernel_direct(const CouplingParams& p, double s) {
  const BesselOrder order(p.nu);
  const double h = p.half();
  auto gx = [&](double x) {
    const double d = bessel_j_prime(order, x) - h * bessel_j(order, x) / x;
    return x * d * d / std::pow(1.0 + x * x / (s * s), 1.5);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  double v = ts.integrate(gx, 0.0, 1.0);
  const double X = 40.0 + 10.0 * s;
  const int panels = static_cast<int>(std::ceil((X - 1.0) / std::numbers::pi));
  const double w = (X - 1.0) / panels;
  for (int i = 0; i < panels; ++i)
    v += boost::math::quadrature::gauss<double, 30>::integrate(gx, 1.0 + i * w, 1.0 + (i + 1) * w);
  // Past X the integrand is (1 - cos 2 theta) / pi times the weight, theta = x - nu pi/2 - pi/4.
  const double u = X / s;
  const double theta = X - 0.5 * p.nu * std::numbers::pi - 0.25 * std::numbers::pi;
  v += s / std::numbers::pi * (1.0 - u / std::sqrt(1.0 + u * u));
  v += std::sin(2.0 * theta) / (2.0 * std::numbers::pi * std::pow(1.0 + u * u, 1.5));
  return v;
}

// log B on a uniform grid in log s, per order, grown on demand.
struct KernelTable {
  double lo = std::log(1e-3), step = std::log(10.0) / 64.0, hi = 0.0;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline;
};

double smoothing_kernel(const CouplingParams& p, double s) {
  if (s <= 1e-3) return smoothing_kernel_direct(p, s);
  static std::mutex mu;
  static std::map<std::pair<int, double>, KernelTable> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto& t = tables[{p.d, p.nu}];
  const double ls = std::log(s);
  if (!t.spline || ls > t.hi) {
    const double hi = std::max(std::log(64.0), std::ceil(ls / std::log(2.0)) * std::log(2.0));
    const int count = static_cast<int>(std::ceil((hi - t.lo) / t.step)) + 1;
    std::vector<double> y(count);
    for (int i = 0; i < count; ++i) y[i] = std::log(smoothing_kernel_direct(p, std::exp(t.lo + i * t.step)));
    t.hi = t.lo + (count - 1) * t.step;
    t.spline = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(y.begin(), y.end(), t.lo,
                                                                                            t.step);
  }
  return std::exp((*t.spline)(ls));
}

double scattering_exponent(const CouplingParams& p) { return 2.0 * (p.d + 2.0) / (p.d - 2.0); }

}  // namespace

ConservedQuantities conserved_quantities(const RadialField& u, double mu) {
  ConservedQuantities c;
  c.mass = mass(u);
  c.kinetic = kinetic(u);
  c.energy = energy(u, mu);
  return c;
}

VirialWeights virial_weights(const RadialBasis& basis, double R) {
  if (!(R > 0.0)) throw Error(ErrorKind::InvalidParameter, "virial radius must be positive");
  const auto& r = basis.nodes();
  const int n = basis.size();
  const double d = basis.params().d;
  const double R2 = R * R;
  VirialWeights w;
  w.R = R;
  for (auto* v : {&w.psi, &w.psi_r, &w.psi_rr, &w.psi_rrr, &w.psi_rrrr, &w.laplacian, &w.bilaplacian, &w.phi_prime})
    v->resize(n);
  for (int k = 0; k < n; ++k) {
    const double x = r(k), s = x * x / R2;
    const auto f = virial_phi(s);
    w.psi(k) = R2 * f[0];
    w.psi_r(k) = 2.0 * x * f[1];
    w.psi_rr(k) = 2.0 * f[1] + 4.0 * s * f[2];
    w.psi_rrr(k) = 12.0 * x * f[2] / R2 + 8.0 * x * x * x * f[3] / (R2 * R2);
    w.psi_rrrr(k) = 12.0 * f[2] / R2 + 48.0 * x * x * f[3] / (R2 * R2) + 16.0 * s * s * f[4] / R2;
    // In s = r^2/R^2: Delta f(s) = (4 s f'' + 2 d f') / R^2.
    const double h = 4.0 * s * f[2] + 2.0 * d * f[1];
    const double h1 = (4.0 + 2.0 * d) * f[2] + 4.0 * s * f[3];
    const double h2 = (8.0 + 2.0 * d) * f[3] + 4.0 * s * f[4];
    w.laplacian(k) = h;
    w.bilaplacian(k) = (4.0 * s * h2 + 2.0 * d * h1) / R2;
    w.phi_prime(k) = f[1];
  }
  return w;
}

double virial_value(const RadialField& u, const VirialWeights& w) {
  return integral(*u.basis, w.psi.cwiseProduct(u.values.cwiseAbs2()));
}

double virial_rate(const RadialField& u, const VirialWeights& w) {
  const Eigen::VectorXcd ur = u.basis->derivative(u.values);
  const auto& r = u.nodes();
  Eigen::VectorXd f(u.size());
  for (int k = 0; k < u.size(); ++k) f(k) = w.phi_prime(k) * r(k) * (std::conj(u.values(k)) * ur(k)).imag();
  return 4.0 * integral(*u.basis, f);
}

double virial_acceleration(const RadialField& u, const VirialWeights& w, double mu) {
  const auto& p = u.params();
  const auto& r = u.nodes();
  const Eigen::VectorXcd ur = u.basis->derivative(u.values);
  const Eigen::VectorXd m2 = u.values.cwiseAbs2();
  const Eigen::VectorXd mp = abs_pow(u.values, p.critical_exponent());
  // Inside r <= R the kinetic and potential terms are exactly 8 Q(u); only
  // their corrections, which vanish near the origin, go through quadrature.
  Eigen::VectorXd f(u.size());
  for (int k = 0; k < u.size(); ++k) {
    const double r2 = r(k) * r(k);
    f(k) = 4.0 * (w.psi_rr(k) - 2.0) * std::norm(ur(k)) + 8.0 * p.a * (w.phi_prime(k) - 1.0) * m2(k) / r2 -
           w.bilaplacian(k) * m2(k) + (4.0 / p.d) * mu * w.laplacian(k) * mp(k);
  }
  return 8.0 * kinetic(u) + integral(*u.basis, f);
}

VirialSeries virial_report(const Trajectory& traj, double R, double mu) {
  const std::size_t n = traj.times.size();
  if (n < 3) throw Error(ErrorKind::InsufficientSampling, "virial report needs at least three samples");
  const auto& basis = *traj.fields.front().basis;
  if (std::sqrt(2.0) * R >= basis.nodes()(basis.size() - 1))
    throw Error(ErrorKind::InvalidParameter, "virial radius too large for the domain");
  const VirialWeights w = virial_weights(basis, R);
  VirialSeries s;
  s.times = traj.times;
  for (const auto& u : traj.fields) {
    s.V.push_back(virial_value(u, w));
    s.dV.push_back(virial_rate(u, w));
    s.d2V_formula.push_back(virial_acceleration(u, w, mu));
  }
  s.d2V_fd.assign(n, kNaN);
  s.dV_fd.assign(n, kNaN);
  double scale2 = 0.0, scale1 = 0.0, err2 = 0.0, err1 = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto [d1, d2] =
        fd_derivatives(s.times[i - 1], s.times[i], s.times[i + 1], s.V[i - 1], s.V[i], s.V[i + 1]);
    s.dV_fd[i] = d1;
    s.d2V_fd[i] = d2;
    scale2 = std::max(scale2, std::abs(s.d2V_formula[i]));
    scale1 = std::max(scale1, std::abs(s.dV[i]));
    err2 = std::max(err2, std::abs(d2 - s.d2V_formula[i]));
    err1 = std::max(err1, std::abs(d1 - s.dV[i]));
  }
  s.mismatch = scale2 > 0.0 ? err2 / scale2 : err2;
  s.rate_mismatch = scale1 > 0.0 ? err1 / scale1 : err1;
  return s;
}

double truncated_mass(const RadialField& u, double R) {
  if (!(R > 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  const auto& r = u.nodes();
  Eigen::VectorXd f(u.size());
  for (int k = 0; k < u.size(); ++k) f(k) = mass_phi(r(k) / R) * std::norm(u.values(k));
  return integral(*u.basis, f);
}

double truncated_mass_rate(const RadialField& u, double R) {
  if (!(R > 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  const Eigen::VectorXcd ur = u.basis->derivative(u.values);
  const auto& r = u.nodes();
  Eigen::VectorXd f(u.size());
  for (int k = 0; k < u.size(); ++k) {
    const double dphi = -smoothstep7(r(k) / R - 1.0)[1];
    f(k) = dphi * (std::conj(u.values(k)) * ur(k)).imag();
  }
  return 2.0 / R * integral(*u.basis, f);
}

double hardy_integral(const RadialField& u) {
  const auto& r = u.nodes();
  return integral(*u.basis, u.values.cwiseAbs2().cwiseQuotient(r.cwiseProduct(r)));
}

double strichartz_ratio(const PlanPtr& plan, const RadialField& u0, double q, double r, double T) {
  require_basis(u0, *plan);
  const double d = plan->params().d;
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidParameter, "T must be positive");
  const bool q_inf = std::isinf(q);
  if (!(q > 2.0) || !(r >= 2.0) || std::abs((q_inf ? 0.0 : 2.0 / q) + d / r - 0.5 * d) > 1e-12)
    throw Error(ErrorKind::InadmissiblePair, "need 2/q + d/r = d/2 with q > 2");
  const double m0 = std::sqrt(mass(u0));
  if (!(m0 > 0.0)) throw Error(ErrorKind::ZeroField, "Strichartz ratio of zero data");
  const Eigen::VectorXcd c = plan->analyze_values(u0.values);
  auto lr = [&](double t) {
    return std::pow(integral(*plan, abs_pow(free_flow(*plan, c, t), r)), 1.0 / r);
  };
  if (q_inf) {
    // Sup over a grid fine on the data's time scale.
    const int n = std::clamp(static_cast<int>(std::ceil(8.0 * T / data_time_scale(u0))), 16, 4096);
    double sup = 0.0;
    for (int i = 0; i <= n; ++i) sup = std::max(sup, lr(T * i / n));
    return sup / m0;
  }
  const double v = integrate([&](double t) { return std::pow(lr(t), q); }, 0.0, T, 1e-9);
  return std::pow(v, 1.0 / q) / m0;
}

LocalSmoothing local_smoothing_ratio(const PlanPtr& plan, const RadialField& u0, double R) {
  require_basis(u0, *plan);
  if (!(R > 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  const auto& p = plan->params();
  const auto& g = plan->grid();
  const double m = std::sqrt(mass(u0));
  if (!(m > 0.0)) throw Error(ErrorKind::ZeroField, "zero data");

  // u0 extended by zero past the wall has the order-nu transform
  // H(k) = sum_n c_n b_n int_0^Rw J_nu(rho_n r) J_nu(k r) r dr, with the
  // Lommel integral in closed form.
  const Eigen::VectorXcd c = plan->analyze_values(u0.values);
  const int n = plan->size();
  const double Rw = plan->radius();
  const BesselOrder order(p.nu), order1(p.nu + 1.0);
  Eigen::VectorXd rho(n), jn1(n), bn(n);
  for (int k = 0; k < n; ++k) {
    rho(k) = g.spectral_nodes(k);
    jn1(k) = bessel_j(order1, g.zeros(k));
    bn(k) = plan->basis_norm(k);
  }
  auto transform = [&](double k) {
    const double jk = bessel_j(order, k * Rw);
    cplx h = 0.0;
    for (int i = 0; i < n; ++i) {
      const double den = rho(i) * rho(i) - k * k;
      const double lommel = std::abs(rho(i) - k) * Rw < 1e-7 ? 0.5 * Rw * Rw * jn1(i) * jn1(i)
                                                             : Rw * rho(i) * jk * jn1(i) / den;
      h += c(i) * bn(i) * lommel;
    }
    return h;
  };

  const double kmax = rho(n - 1);
  const double hardy_kernel = 1.0 / (2.0 * p.nu);
  const double scale = p.omega() * std::numbers::pi / R;
  auto grad = [&](double k) { return std::norm(transform(k)) * k * smoothing_kernel(p, k * R); };
  auto hardy = [&](double k) { return std::norm(transform(k)) * k * hardy_kernel; };
  // Split at the midpoint of the band so that the upper half measures how
  // much the represented data still carries near the top of the spectrum.
  const double g_lo = integrate(grad, 0.0, 0.5 * kmax, 1e-10), h_lo = integrate(hardy, 0.0, 0.5 * kmax, 1e-10);
  const double g_hi = integrate_abs(grad, 0.5 * kmax, kmax, 1e-10 * g_lo);
  const double h_hi = integrate_abs(hardy, 0.5 * kmax, kmax, 1e-10 * h_lo);
  const double total = g_lo + g_hi + h_lo + h_hi;
  if (g_hi + h_hi > 0.01 * total)
    throw Error(ErrorKind::TailNotConverged, "local smoothing: data not resolved, upper half-band carries over 1%");

  LocalSmoothing out;
  out.gradient_part = scale * (g_lo + g_hi);
  out.hardy_part = scale * (h_lo + h_hi);
  out.numerator = out.gradient_part + out.hardy_part;
  out.denominator = m * std::sqrt(kinetic(u0)) + m * m / R;
  out.ratio = out.numerator / out.denominator;
  return out;
}

std::vector<double> spacetime_L10_accumulated(const Trajectory& traj) {
  const std::size_t n = traj.times.size();
  std::vector<double> f(n), acc(n, 0.0);
  if (n == 0) return acc;
  const double p = scattering_exponent(traj.fields.front().params());
  for (std::size_t i = 0; i < n; ++i) f[i] = integral(*traj.fields[i].basis, abs_pow(traj.fields[i].values, p));
  const auto& t = traj.times;
  std::size_t i = 0;
  while (i + 2 < n) {
    const double h0 = t[i + 1] - t[i], h1 = t[i + 2] - t[i + 1];
    acc[i + 1] = acc[i] + 0.5 * h0 * (f[i] + f[i + 1]);
    acc[i + 2] = acc[i] + (h0 + h1) / 6.0 *
                              ((2.0 - h1 / h0) * f[i] + (h0 + h1) * (h0 + h1) / (h0 * h1) * f[i + 1] +
                               (2.0 - h0 / h1) * f[i + 2]);
    i += 2;
  }
  if (i + 1 < n) acc[i + 1] = acc[i] + 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
  return acc;
}

double spacetime_L10(const Trajectory& traj) {
  const auto acc = spacetime_L10_accumulated(traj);
  return acc.empty() ? 0.0 : acc.back();
}

DiagnosticsSeries diagnostics_series(const Trajectory& traj, double R, double mu) {
  DiagnosticsSeries s;
  s.t = traj.times;
  for (const auto& u : traj.fields) {
    const auto c = conserved_quantities(u, mu);
    s.mass.push_back(c.mass);
    s.energy.push_back(c.energy);
    s.kinetic.push_back(c.kinetic);
    s.l6.push_back(lebesgue_norm(u, u.params().critical_exponent()));
    s.sup.push_back(u.values.cwiseAbs().maxCoeff());
    s.M_R.push_back(truncated_mass(u, R));
  }
  if (traj.times.size() >= 3) {
    const auto v = virial_report(traj, R, mu);
    s.V = v.V, s.dV = v.dV, s.d2V_formula = v.d2V_formula, s.d2V_fd = v.d2V_fd;
  } else {
    const auto w = virial_weights(*traj.fields.front().basis, R);
    for (const auto& u : traj.fields) {
      s.V.push_back(virial_value(u, w));
      s.dV.push_back(virial_rate(u, w));
      s.d2V_formula.push_back(virial_acceleration(u, w, mu));
      s.d2V_fd.push_back(kNaN);
    }
  }
  s.l10_accum = spacetime_L10_accumulated(traj);
  return s;
}

void write_csv(std::ostream& os, const DiagnosticsSeries& s) {
  os << "t,mass,energy,kinetic,L6,sup,V_R,dV_R,d2V_R_formula,d2V_R_fd,M_R,L10_accum\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    os << s.t[i] << ',' << s.mass[i] << ',' << s.energy[i] << ',' << s.kinetic[i] << ',' << s.l6[i] << ','
       << s.sup[i] << ',' << s.V[i] << ',' << s.dV[i] << ',' << s.d2V_formula[i] << ',';
    if (std::isnan(s.d2V_fd[i]))
      os << "nan";
    else
      os << s.d2V_fd[i];
    os << ',' << s.M_R[i] << ',' << s.l10_accum[i] << '\n';
  }
}

}  // namespace invsq

namespace invsq {

bool monotone_last_decade(const std::vector<double>& h) {
  if (h.empty()) return false;
  const double top = h.back();
  std::size_t start = 0;
  for (std::size_t i = h.size(); i-- > 0;)
    if (h[i] <= 0.1 * top) {
      start = i;
      break;
    }
  for (std::size_t i = start + 1; i < h.size(); ++i)
    if (h[i] < h[i - 1]) return false;
  return true;
}

}  // namespace invsq
