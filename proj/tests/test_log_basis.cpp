#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "invsq/error.hpp"
#include "invsq/log_basis.hpp"

using namespace invsq;
using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

// Closed-form ground state in d = 3 and its r-derivative, written out here
// independently of the ground_state module.
double W3(double beta, double r) {
  return std::pow(3.0 * beta * beta, 0.25) * std::sqrt(std::pow(r, beta - 1.0) / (1.0 + std::pow(r, 2.0 * beta)));
}
double dW3(double beta, double r) {
  const double rb = std::pow(r, 2.0 * beta);
  return W3(beta, r) * 0.5 * ((beta - 1.0) / r - 2.0 * beta * rb / (r * (1.0 + rb)));
}

}  // namespace

TEST_CASE("log basis: geometry and Parseval") {
  const LogRadialBasis b(derive_params(3, 0.0), 10.0, 399);
  CHECK(std::abs(b.spacing() - 20.0 / 400.0) < 1e-15);
  CHECK(std::abs(std::log(b.nodes()(0)) + 10.0 - b.spacing()) < 1e-12);
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXd w(399);
  for (auto& x : w) x = g(rng);
  const Eigen::VectorXd s = b.sine_coefficients(w);
  CHECK(std::abs(s.squaredNorm() - b.spacing() * w.squaredNorm()) < 1e-12 * s.squaredNorm());
  CHECK((b.sine_synthesis(s) - w).norm() < 1e-12 * w.norm());
  CHECK_THROWS_AS(LogRadialBasis(derive_params(3, 0.0), 10.0, 8), Error);
}

TEST_CASE("log basis: ground-state integrals to roundoff") {
  const double K0 = std::pow(3.0, 1.5) * pi * pi / 4.0;
  for (double a : {-0.1875, 0.0, 0.75}) {
    const auto p = derive_params(3, a);
    const auto b = make_log_basis(p);
    const auto W = RadialField::from_function(b, [&](double r) { return W3(p.beta, r); });
    const double K = p.beta * p.beta * K0;
    CHECK(std::abs(kinetic(W) - K) < 1e-10 * K);
    CHECK(std::abs(std::pow(lebesgue_norm(W, 6.0), 6.0) - K) < 1e-10 * K);
  }
}

TEST_CASE("log basis: operator, inverse and derivative on the ground state") {
  for (double a : {-0.1875, 0.0, 0.75}) {
    const auto p = derive_params(3, a);
    const auto b = make_log_basis(p);
    const auto W = RadialField::from_function(b, [&](double r) { return W3(p.beta, r); });
    const Eigen::VectorXcd LW = b->apply_operator(W.values);
    // L_a W = W^5; compare in the scale-invariant weight r^{5/2}.
    double err = 0.0, ref = 0.0;
    for (int j = 0; j < b->size(); ++j) {
      const double r = b->nodes()(j), sc = std::pow(r, 2.5);
      err = std::max(err, sc * std::abs(LW(j) - std::pow(W.values(j).real(), 5)));
      ref = std::max(ref, sc * std::pow(W.values(j).real(), 5));
    }
    CHECK(err < 1e-10 * ref);
    const Eigen::VectorXcd back = b->solve_operator(LW);
    CHECK(((back - W.values).array() * b->nodes().array().pow(0.5)).abs().maxCoeff() < 1e-10);
    const Eigen::VectorXcd dW = b->derivative(W.values);
    double derr = 0.0;
    for (int j = 0; j < b->size(); ++j) {
      const double r = b->nodes()(j);
      derr = std::max(derr, std::pow(r, 1.5) * std::abs(dW(j) - dW3(p.beta, r)));
    }
    CHECK(derr < 1e-10);
  }
}
