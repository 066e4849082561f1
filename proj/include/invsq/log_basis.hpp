#pragma once

#include <memory>

#include "invsq/radial_basis.hpp"

namespace invsq {

// Uniform grid in rho = log r on [-L, L] with Dirichlet ends and a sine
// basis for w = r^{(d-2)/2} u. In these variables
//   Q(u) = omega int (w'^2 + nu^2 w^2) drho,  L_a u = r^{-(d+2)/2} (-w'' + nu^2 w),
// and dilations become translations, so profiles with power-law tails (the
// ground states) decay exponentially and are resolved to roundoff.
class LogRadialBasis : public RadialBasis {
 public:
  LogRadialBasis(const CouplingParams& params, double L, int M);
  ~LogRadialBasis() override;

  double half_width() const { return L_; }
  double spacing() const { return h_; }

  // Sine coefficients s_k of w; sum |s_k|^2 = int |w|^2 drho.
  Eigen::VectorXd sine_coefficients(const Eigen::VectorXd& w) const;
  Eigen::VectorXd sine_synthesis(const Eigen::VectorXd& s) const;
  // kappa_k^2 + nu^2, the form multiplier.
  const Eigen::VectorXd& symbol() const { return symbol_; }

  Eigen::VectorXcd apply_operator(const Eigen::VectorXcd& u) const override;
  Eigen::VectorXcd solve_operator(const Eigen::VectorXcd& f) const override;
  double form(const Eigen::VectorXcd& u) const override;
  Eigen::VectorXcd derivative(const Eigen::VectorXcd& u) const override;
  std::string describe() const override;

 private:
  Eigen::VectorXcd apply_symbol(const Eigen::VectorXcd& w, const Eigen::VectorXd& m) const;

  double L_;
  double h_;
  Eigen::VectorXd symbol_;
  Eigen::VectorXd kappa_;
  Eigen::VectorXd r_half_;  // r^{(d-2)/2}
  struct Fftw;
  std::unique_ptr<Fftw> fftw_;
};

// Half-width chosen so that a profile decaying like exp(-beta |rho| (d-2)/2)
// drops below 1e-13 of its peak; spacing h.
std::shared_ptr<const LogRadialBasis> make_log_basis(const CouplingParams& params, double h = 0.05);

}  // namespace invsq
