#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>

#include "invsq/params.hpp"

namespace invsq {

// A discretization of radial functions on which L_a acts exactly in some
// orthonormal basis. Two live here: the Bessel-zero Dirichlet plan used for
// time stepping, and a logarithmic sine basis used for the scale-degenerate
// static problems.
class RadialBasis {
 public:
  virtual ~RadialBasis() = default;

  const CouplingParams& params() const { return params_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  // sum_k w_k f(r_k) approximates int_0^Rmax f(r) r^{d-1} dr.
  const Eigen::VectorXd& weights() const { return weights_; }

  // L_a u at the nodes.
  virtual Eigen::VectorXcd apply_operator(const Eigen::VectorXcd& u) const = 0;
  // L_a^{-1} f at the nodes.
  virtual Eigen::VectorXcd solve_operator(const Eigen::VectorXcd& f) const = 0;
  // Q(u) = ||u||^2 in the homogeneous energy space, full R^d integral.
  virtual double form(const Eigen::VectorXcd& u) const = 0;
  virtual Eigen::VectorXcd derivative(const Eigen::VectorXcd& u) const = 0;
  virtual std::string describe() const = 0;

 protected:
  RadialBasis(const CouplingParams& params, Eigen::VectorXd nodes, Eigen::VectorXd weights)
      : params_(params), nodes_(std::move(nodes)), weights_(std::move(weights)) {}

 private:
  CouplingParams params_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

using BasisPtr = std::shared_ptr<const RadialBasis>;

// Complex samples u(r_k) of a radial function on a basis.
struct RadialField {
  BasisPtr basis;
  Eigen::VectorXcd values;

  RadialField() = default;
  RadialField(BasisPtr b, Eigen::VectorXcd v);
  static RadialField zero(BasisPtr b);
  static RadialField from_function(BasisPtr b, const std::function<std::complex<double>(double)>& f);

  int size() const { return static_cast<int>(values.size()); }
  const Eigen::VectorXd& nodes() const { return basis->nodes(); }
  const CouplingParams& params() const { return basis->params(); }
};

RadialField operator+(const RadialField& a, const RadialField& b);
RadialField operator-(const RadialField& a, const RadialField& b);
RadialField operator*(std::complex<double> s, const RadialField& a);

// Throws GridMismatch unless both fields live on the same basis object.
void require_same_basis(const RadialField& a, const RadialField& b);
void require_basis(const RadialField& u, const RadialBasis& basis);

// int_{R^d} f(|x|) dx for radial f sampled at the nodes.
double space_integral(const RadialBasis& basis, const Eigen::VectorXd& f);
// ||u||_{L^p(R^d)}.
double lebesgue_norm(const RadialField& u, double p);
// ||u||_{L^2}^2.
double mass(const RadialField& u);
// Q(u) through the basis.
double kinetic(const RadialField& u);

}  // namespace invsq
