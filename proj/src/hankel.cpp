#include "invsq/hankel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "invsq/error.hpp"
#include "invsq/special_functions.hpp"

namespace invsq {

Eigen::VectorXcd real_matvec(const Eigen::MatrixXd& A, const Eigen::VectorXcd& x) {
  // Treat the complex vector as an interleaved 2 x n real matrix so the
  // product runs as one real gemm.
  const Eigen::Index n = x.size();
  Eigen::Map<const Eigen::MatrixXd> xr(reinterpret_cast<const double*>(x.data()), 2, n);
  Eigen::VectorXcd y(A.rows());
  Eigen::Map<Eigen::MatrixXd> yr(reinterpret_cast<double*>(y.data()), 2, A.rows());
  yr.noalias() = xr * A.transpose();
  return y;
}

RadialGrid make_grid(const CouplingParams& params, double R, int N) {
  if (N < 16) throw Error(ErrorKind::InvalidParameter, "grid needs N >= 16");
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorKind::InvalidParameter, "grid needs R > 0");
  RadialGrid g;
  g.d = params.d;
  g.nu = params.nu;
  g.R = R;
  g.N = N;
  const BesselOrder order(params.nu);
  const BesselOrder next(params.nu + 1.0);
  const auto z = bessel_zeros(order, N + 1);
  g.zeros = Eigen::Map<const Eigen::VectorXd>(z.data(), N + 1);
  const double jN1 = z[N];
  g.nodes.resize(N);
  g.spectral_nodes.resize(N);
  g.quad_weights.resize(N);
  for (int k = 0; k < N; ++k) {
    g.nodes(k) = z[k] * R / jN1;
    g.spectral_nodes(k) = z[k] / R;
    const double jp = bessel_j(next, z[k]);
    // Gauss-type rule for int_0^R g(r) r dr on the Bessel zeros, with the
    // extra r^{d-2} turning it into the d-dimensional radial measure.
    g.quad_weights(k) = 2.0 * R * R / (jN1 * jN1 * jp * jp) * std::pow(g.nodes(k), params.d - 2);
  }
  return g;
}

HankelPlan::HankelPlan(const CouplingParams& params, double R, int N)
    : HankelPlan(params, make_grid(params, R, N)) {}

HankelPlan::HankelPlan(const CouplingParams& params, RadialGrid grid)
    : RadialBasis(params, grid.nodes, grid.quad_weights), grid_(std::move(grid)) {
  const double R = grid_.R;
  const int N = grid_.N;
  const BesselOrder order(params.nu);
  const BesselOrder next(params.nu + 1.0);
  const double jN1 = grid_.zeros(N);
  lambda_ = grid_.spectral_nodes.array().square();
  norm_.resize(N);
  for (int k = 0; k < N; ++k) norm_(k) = std::sqrt(2.0) / (R * std::abs(bessel_j(next, grid_.zeros(k))));

  // J_nu(j_m j_k / j_{N+1}) is symmetric in (m, k).
  Eigen::MatrixXd J(N, N);
  for (int m = 0; m < N; ++m)
    for (int k = m; k < N; ++k) J(m, k) = J(k, m) = bessel_j(order, grid_.zeros(m) * grid_.zeros(k) / jN1);

  const double p = 1.0 - 0.5 * params.d;
  Eigen::VectorXd rpow = grid_.nodes.array().pow(p);
  synth_ = rpow.asDiagonal() * J * norm_.asDiagonal();
  analysis_ = synth_.partialPivLu().inverse();

  // Construction-time validation against analytic integrals.
  const auto& w = grid_.quad_weights;
  const Eigen::VectorXd b1 = synth_.col(0), b2 = synth_.col(1);
  validation_[0] = std::abs(w.dot(b1.cwiseProduct(b1)) - 1.0);
  validation_[1] = std::abs(w.dot(b1.cwiseProduct(b2)));
  const double s = R / 8.0;
  double q = 0.0;
  for (int k = 0; k < N; ++k) {
    const double r = grid_.nodes(k);
    q += w(k) * std::pow(r, -2.0 * params.sigma) * std::exp(-r * r / (s * s));
  }
  const double exact = 0.5 * std::pow(s, 2.0 * params.nu + 2.0) * gamma(params.nu + 1.0);
  validation_[2] = std::abs(q - exact) / exact;
  for (double e : validation_)
    if (!(e < 1e-3)) throw Error(ErrorKind::Convergence, "hankel plan failed its quadrature self-check");
}

const Eigen::MatrixXd& HankelPlan::differentiation() const {
  std::call_once(diff_once_, [this] {
    const int N = grid_.N;
    const double nu = params().nu;
    const int d = params().d;
    const BesselOrder order(nu), next(nu + 1.0);
    const double jN1 = grid_.zeros(N);
    Eigen::MatrixXd J(N, N), Jn(N, N);
    for (int m = 0; m < N; ++m)
      for (int k = m; k < N; ++k) {
        const double x = grid_.zeros(m) * grid_.zeros(k) / jN1;
        J(m, k) = J(k, m) = bessel_j(order, x);
        Jn(m, k) = Jn(k, m) = bessel_j(next, x);
      }
    Eigen::MatrixXd dsyn(N, N);
    for (int m = 0; m < N; ++m) {
      const double r = grid_.nodes(m);
      for (int k = 0; k < N; ++k) {
        const double rho = grid_.spectral_nodes(k);
        const double x = rho * r;
        // d/dr [r^{1-d/2} J_nu(rho r)], with J_nu' = (nu/x) J_nu - J_{nu+1}.
        const double jprime = nu / x * J(m, k) - Jn(m, k);
        dsyn(m, k) = norm_(k) * ((1.0 - 0.5 * d) * std::pow(r, -0.5 * d) * J(m, k) +
                                 std::pow(r, 1.0 - 0.5 * d) * rho * jprime);
      }
    }
    diff_ = dsyn * analysis_;
  });
  return diff_;
}

Eigen::VectorXcd HankelPlan::analyze_values(const Eigen::VectorXcd& u) const {
  return real_matvec(analysis_, u);
}

Eigen::VectorXcd HankelPlan::synthesize_values(const Eigen::VectorXcd& c) const {
  return real_matvec(synth_, c);
}

Eigen::VectorXcd HankelPlan::apply_spectral(const Eigen::VectorXcd& u, const Eigen::VectorXcd& m) const {
  return synthesize_values(m.cwiseProduct(analyze_values(u)));
}

std::complex<double> HankelPlan::evaluate(const Eigen::VectorXcd& c, double r) const {
  if (!(r > 0.0) || r > grid_.R * (1.0 + 1e-12))
    throw Error(ErrorKind::Domain, "evaluation radius outside (0, R]");
  const BesselOrder order(params().nu);
  const double p = std::pow(r, 1.0 - 0.5 * params().d);
  std::complex<double> s = 0.0;
  for (int k = 0; k < grid_.N; ++k) s += c(k) * norm_(k) * bessel_j(order, grid_.spectral_nodes(k) * r);
  return s * p;
}

std::complex<double> HankelPlan::origin_coefficient(const Eigen::VectorXcd& c) const {
  const double nu = params().nu;
  const double g = gamma(nu + 1.0);
  std::complex<double> s = 0.0;
  for (int k = 0; k < grid_.N; ++k) s += c(k) * norm_(k) * std::pow(0.5 * grid_.spectral_nodes(k), nu) / g;
  return s;
}

Eigen::VectorXcd HankelPlan::apply_operator(const Eigen::VectorXcd& u) const {
  return apply_spectral(u, lambda_.cast<std::complex<double>>());
}

Eigen::VectorXcd HankelPlan::solve_operator(const Eigen::VectorXcd& f) const {
  return apply_spectral(f, lambda_.cwiseInverse().cast<std::complex<double>>());
}

double HankelPlan::form(const Eigen::VectorXcd& u) const {
  const Eigen::VectorXcd c = analyze_values(u);
  return params().omega() * lambda_.dot(c.cwiseAbs2());
}

Eigen::VectorXcd HankelPlan::derivative(const Eigen::VectorXcd& u) const {
  return real_matvec(differentiation(), u);
}

std::string HankelPlan::describe() const {
  std::ostringstream os;
  os << "hankel(nu=" << params().nu << ", R=" << grid_.R << ", N=" << grid_.N << ")";
  return os.str();
}

PlanPtr make_plan(const CouplingParams& params, double R, int N) {
  return std::make_shared<const HankelPlan>(params, R, N);
}

SpectralField analyze(const PlanPtr& plan, const RadialField& u) {
  require_basis(u, *plan);
  return {plan, plan->analyze_values(u.values)};
}

RadialField synthesize(const PlanPtr& plan, const SpectralField& c) {
  if (c.plan.get() != plan.get()) throw Error(ErrorKind::GridMismatch, "coefficients belong to another plan");
  return RadialField(plan, plan->synthesize_values(c.coeffs));
}

std::complex<double> quad_integrate(const RadialGrid& grid, const Eigen::VectorXcd& samples, int weight_exponent) {
  if (samples.size() != grid.N) throw Error(ErrorKind::GridMismatch, "sample count differs from grid size");
  std::complex<double> s = 0.0;
  for (int k = 0; k < grid.N; ++k)
    s += grid.quad_weights(k) * samples(k) * std::pow(grid.nodes(k), double(weight_exponent - (grid.d - 1)));
  return s;
}

RadialField radial_derivative(const PlanPtr& plan, const RadialField& u) {
  require_basis(u, *plan);
  return RadialField(plan, plan->derivative(u.values));
}

Eigen::VectorXcd spectral_profile(const SpectralField& c) {
  const auto& g = c.plan->grid();
  const BesselOrder next(g.nu + 1.0);
  Eigen::VectorXcd out(g.N);
  for (int k = 0; k < g.N; ++k) {
    const double rho = g.spectral_nodes(k);
    out(k) = c.coeffs(k) * g.R * std::abs(bessel_j(next, g.zeros(k))) / std::sqrt(2.0) *
             std::pow(rho, -0.5 * (g.d - 2));
  }
  return out;
}

}  // namespace invsq
