#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <memory>
#include <mutex>

#include "invsq/radial_basis.hpp"

namespace invsq {

// Bessel-zero collocation grid on [0, R] for the order nu = params.nu.
struct RadialGrid {
  int d = 3;
  double nu = 0.5;
  double R = 1.0;
  int N = 0;
  Eigen::VectorXd nodes;           // r_k = j_k R / j_{N+1}
  Eigen::VectorXd spectral_nodes;  // rho_k = j_k / R
  Eigen::VectorXd quad_weights;    // int_0^R f r^{d-1} dr
  Eigen::VectorXd zeros;           // j_1 .. j_{N+1}
};

RadialGrid make_grid(const CouplingParams& params, double R, int N);

// Order-nu discrete Hankel transform with a Dirichlet wall at R. The
// coefficients c_k are those of v = r^{(d-1)/2} u in the orthonormal
// eigenbasis beta_k(r) = sqrt(2r) J_nu(rho_k r) / (R |J_{nu+1}(j_k)|), so
// sum |c_k|^2 = int_0^R |v|^2 dr and L_a acts as multiplication by rho_k^2.
class HankelPlan : public RadialBasis, public std::enable_shared_from_this<HankelPlan> {
 public:
  HankelPlan(const CouplingParams& params, double R, int N);

  const RadialGrid& grid() const { return grid_; }
  double radius() const { return grid_.R; }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& synthesis() const { return synth_; }
  const Eigen::MatrixXd& analysis() const { return analysis_; }
  const Eigen::MatrixXd& differentiation() const;

  Eigen::VectorXcd analyze_values(const Eigen::VectorXcd& u) const;
  Eigen::VectorXcd synthesize_values(const Eigen::VectorXcd& c) const;
  Eigen::VectorXcd apply_spectral(const Eigen::VectorXcd& u, const Eigen::VectorXcd& m) const;

  // u(r) from coefficients, at any 0 < r <= R.
  std::complex<double> evaluate(const Eigen::VectorXcd& c, double r) const;
  // lim_{r->0} r^sigma u(r) from coefficients.
  std::complex<double> origin_coefficient(const Eigen::VectorXcd& c) const;
  double basis_norm(int k) const { return norm_(k); }

  // Errors of the three analytic integrals checked at construction:
  // normalization of beta_1, orthogonality of beta_1 and beta_2, and a
  // Gaussian moment of the regular class.
  const std::array<double, 3>& validation() const { return validation_; }

  Eigen::VectorXcd apply_operator(const Eigen::VectorXcd& u) const override;
  Eigen::VectorXcd solve_operator(const Eigen::VectorXcd& f) const override;
  double form(const Eigen::VectorXcd& u) const override;
  Eigen::VectorXcd derivative(const Eigen::VectorXcd& u) const override;
  std::string describe() const override;

 private:
  HankelPlan(const CouplingParams& params, RadialGrid grid);

  RadialGrid grid_;
  Eigen::VectorXd lambda_;
  Eigen::VectorXd norm_;   // sqrt(2) / (R |J_{nu+1}(j_k)|)
  Eigen::MatrixXd synth_;  // B_{mk} = beta_k(r_m) / r_m^{(d-1)/2}
  Eigen::MatrixXd analysis_;
  mutable Eigen::MatrixXd diff_;
  mutable std::once_flag diff_once_;
  std::array<double, 3> validation_{};
};

using PlanPtr = std::shared_ptr<const HankelPlan>;

PlanPtr make_plan(const CouplingParams& params, double R, int N);

struct SpectralField {
  PlanPtr plan;
  Eigen::VectorXcd coeffs;
};

SpectralField analyze(const PlanPtr& plan, const RadialField& u);
RadialField synthesize(const PlanPtr& plan, const SpectralField& c);

// sum_k w_k s_k r_k^{e-(d-1)} ~ int_0^R f r^e dr.
std::complex<double> quad_integrate(const RadialGrid& grid, const Eigen::VectorXcd& samples, int weight_exponent);

RadialField radial_derivative(const PlanPtr& plan, const RadialField& u);

// The order-nu radial transform rho^{-(d-2)/2} int u(r) J_nu(rho r) r^{d/2} dr
// at rho_k, recovered from the coefficients. For a = 0 this is the
// d-dimensional unitary Fourier transform of a radial function.
Eigen::VectorXcd spectral_profile(const SpectralField& c);

// Product of a real matrix with a complex vector.
Eigen::VectorXcd real_matvec(const Eigen::MatrixXd& A, const Eigen::VectorXcd& x);

}  // namespace invsq
