#include "invsq/radial_basis.hpp"

#include <cmath>

#include "invsq/error.hpp"

namespace invsq {

RadialField::RadialField(BasisPtr b, Eigen::VectorXcd v) : basis(std::move(b)), values(std::move(v)) {
  if (!basis) throw Error(ErrorKind::InvalidParameter, "field without a basis");
  if (values.size() != basis->size()) throw Error(ErrorKind::GridMismatch, "field length differs from basis size");
  if (!values.allFinite()) throw Error(ErrorKind::Domain, "field has non-finite entries");
}

RadialField RadialField::zero(BasisPtr b) {
  const int n = b->size();
  return RadialField(std::move(b), Eigen::VectorXcd::Zero(n));
}

RadialField RadialField::from_function(BasisPtr b, const std::function<std::complex<double>(double)>& f) {
  Eigen::VectorXcd v(b->size());
  for (int k = 0; k < b->size(); ++k) v(k) = f(b->nodes()(k));
  return RadialField(std::move(b), std::move(v));
}

void require_same_basis(const RadialField& a, const RadialField& b) {
  if (a.basis.get() != b.basis.get()) throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

void require_basis(const RadialField& u, const RadialBasis& basis) {
  if (u.basis.get() != &basis) throw Error(ErrorKind::GridMismatch, "field is not on this plan's grid");
}

RadialField operator+(const RadialField& a, const RadialField& b) {
  require_same_basis(a, b);
  return RadialField(a.basis, a.values + b.values);
}

RadialField operator-(const RadialField& a, const RadialField& b) {
  require_same_basis(a, b);
  return RadialField(a.basis, a.values - b.values);
}

RadialField operator*(std::complex<double> s, const RadialField& a) { return RadialField(a.basis, s * a.values); }

double space_integral(const RadialBasis& basis, const Eigen::VectorXd& f) {
  return basis.params().omega() * basis.weights().dot(f);
}

double lebesgue_norm(const RadialField& u, double p) {
  if (std::isinf(p)) return u.values.cwiseAbs().maxCoeff();
  if (!(p >= 1.0)) throw Error(ErrorKind::Domain, "Lebesgue exponent must be at least 1");
  const Eigen::VectorXd f = u.values.cwiseAbs().array().pow(p);
  return std::pow(space_integral(*u.basis, f), 1.0 / p);
}

double mass(const RadialField& u) { return space_integral(*u.basis, u.values.cwiseAbs2()); }

double kinetic(const RadialField& u) { return u.basis->form(u.values); }

}  // namespace invsq
