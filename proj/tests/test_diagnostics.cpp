#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "invsq/diagnostics.hpp"
#include "invsq/error.hpp"
#include "invsq/ground_state.hpp"
#include "invsq/log_basis.hpp"
#include "invsq/variational.hpp"

using namespace invsq;
using std::numbers::pi;

namespace {

RadialField gaussian(const BasisPtr& b, double amp, double width = 1.0) {
  return RadialField::from_function(
      b, [=](double r) { return std::complex<double>(amp * std::exp(-r * r / (2.0 * width * width))); });
}

// Three-point derivative on the node array.
Eigen::VectorXd nodal_derivative(const Eigen::VectorXd& r, const Eigen::VectorXd& f) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(f.size());
  for (Eigen::Index k = 1; k + 1 < f.size(); ++k) {
    const double h0 = r(k) - r(k - 1), h1 = r(k + 1) - r(k);
    d(k) = -h1 / (h0 * (h0 + h1)) * f(k - 1) + (h1 - h0) / (h0 * h1) * f(k) + h0 / (h1 * (h0 + h1)) * f(k + 1);
  }
  return d;
}

}  // namespace

TEST_CASE("conserved quantities") {
  const auto p = derive_params(3, 0.0);
  const auto plan = make_plan(p, 20.0, 256);
  const auto z = conserved_quantities(RadialField::zero(plan), 1.0);
  CHECK(z.mass == 0.0);
  CHECK(z.energy == 0.0);
  CHECK(z.kinetic == 0.0);
  const auto g = conserved_quantities(gaussian(plan, 1.0), 1.0);
  CHECK(std::abs(g.mass - std::pow(pi, 1.5)) < 1e-8);
  CHECK(std::abs(g.kinetic - 1.5 * std::pow(pi, 1.5)) < 1e-8);

  for (double a : {-3.0 / 16.0, 0.0, 0.75}) {
    const auto pa = derive_params(3, a);
    const auto gs = eval_ground_state(pa, make_log_basis(pa));
    const double K = ground_state_constant(pa);
    CHECK(std::abs(conserved_quantities(gs.field, -1.0).energy - K / 3.0) < 1e-8 * K);
  }
}

TEST_CASE("virial weights") {
  const auto p = derive_params(3, 0.0);
  const auto plan = make_plan(p, 6.0, 512);
  const double R = 2.0;
  const auto w = virial_weights(*plan, R);
  const auto& r = plan->nodes();
  for (int k = 0; k < plan->size(); ++k) {
    if (r(k) <= R) {
      CHECK(w.psi(k) == doctest::Approx(r(k) * r(k)).epsilon(1e-14));
      CHECK(w.laplacian(k) == doctest::Approx(6.0));
      CHECK(w.bilaplacian(k) == 0.0);
    }
    if (r(k) >= std::sqrt(2.0) * R) {
      CHECK(w.psi(k) == doctest::Approx(1.5 * R * R));
      CHECK(w.psi_r(k) == 0.0);
      CHECK(w.bilaplacian(k) == 0.0);
    }
  }
  // Each stored derivative against differences of the previous one; the
  // difference error must fall on refinement.
  auto errors = [&](int N) {
    const auto pl = make_plan(p, 6.0, N);
    const auto v = virial_weights(*pl, R);
    const auto& x = pl->nodes();
    const Eigen::VectorXd dl = nodal_derivative(x, v.laplacian);
    const std::array<Eigen::VectorXd, 5> fd{nodal_derivative(x, v.psi), nodal_derivative(x, v.psi_r),
                                            nodal_derivative(x, v.psi_rr), nodal_derivative(x, v.psi_rrr),
                                            nodal_derivative(x, dl)};
    const std::array<const Eigen::VectorXd*, 5> exact{&v.psi_r, &v.psi_rr, &v.psi_rrr, &v.psi_rrrr, &v.bilaplacian};
    std::array<double, 5> e{};
    for (int k = 2; k + 2 < N; ++k) {
      CHECK(std::abs(v.laplacian(k) - (v.psi_rr(k) + 2.0 * v.psi_r(k) / x(k))) < 1e-12);
      // The fifth derivative of phi jumps at r = R and sqrt(2) R.
      const double gap = 3.0 * (x(k + 1) - x(k));
      if (std::abs(x(k) - R) < gap || std::abs(x(k) - std::sqrt(2.0) * R) < gap) continue;
      for (int j = 0; j < 5; ++j) {
        const double ref = j == 4 ? (*exact[j])(k) - 2.0 * dl(k) / x(k) : (*exact[j])(k);
        e[j] = std::max(e[j], std::abs(fd[j](k) - ref));
      }
    }
    return e;
  };
  const auto e1 = errors(256), e2 = errors(512);
  for (int j = 0; j < 5; ++j) {
    INFO("derivative " << j + 1 << ": " << e1[j] << " -> " << e2[j]);
    CHECK(e2[j] < 0.5 * e1[j]);
  }
}

TEST_CASE("virial at a single time") {
  const auto p = derive_params(3, 0.0);
  const auto plan = make_plan(p, 20.0, 256);
  const auto u = gaussian(plan, 1.0);
  const auto w = virial_weights(*plan, 8.0);
  // psi = r^2 wherever the Gaussian lives.
  CHECK(std::abs(virial_value(u, w) - 1.5 * std::pow(pi, 1.5)) < 1e-9);
  CHECK(std::abs(virial_rate(u, w)) < 1e-12);
  const double l6 = std::pow(pi / 3.0, 1.5);
  for (double mu : {1.0, -1.0})
    CHECK(std::abs(virial_acceleration(u, w, mu) - (12.0 * std::pow(pi, 1.5) + 8.0 * mu * l6)) < 1e-8);
  // A phase e^{i b r^2} gives dV = 4 Im int conj(u) r u_r = 8 b int r^2 |u|^2.
  const auto chirp = RadialField::from_function(
      plan, [](double r) { return std::exp(std::complex<double>(-r * r / 2.0, 0.3 * r * r)); });
  CHECK(std::abs(virial_rate(chirp, w) - 8.0 * 0.3 * 1.5 * std::pow(pi, 1.5)) < 1e-8);

  // For the soliton the kinetic and potential parts cancel exactly, and the
  // cutoff terms cancel to leading order; the annulus needs a fine log grid.
  const auto lb = make_log_basis(p, 0.0025);
  const auto gs = eval_ground_state(p, lb);
  const double scale = 8.0 * kinetic(gs.field);
  for (double R : {10.0, 100.0, 1000.0})
    CHECK(std::abs(virial_acceleration(gs.field, virial_weights(*lb, R), -1.0)) <= 1e-3 * scale);
}

TEST_CASE("virial report along runs") {
  for (double a : {-3.0 / 16.0, 0.0}) {
    const auto p = derive_params(3, a);
    const auto plan = make_plan(p, 40.0, 512);
    const auto u0 = gaussian(plan, 1.0);
    EvolutionConfig c;
    c.t_end = 1.0;
    // For a < 0 the nonlinearity leaves the smooth class at the origin and
    // radiates a weak algebraic tail (about 1e-5 at the wall by t = 1).
    c.wall_guard = 1e-4;
    for (int i = 1; i < 100; ++i) c.sample_times.push_back(0.01 * i);
    const auto tr = evolve(plan, u0, c);
    REQUIRE(tr.reason == Termination::Completed);
    const auto v = virial_report(tr, 5.0, 1.0);
    INFO("a = " << a);
    CHECK(v.mismatch <= 1e-3);
    CHECK(v.rate_mismatch <= 1e-3);
    for (double x : v.d2V_formula) CHECK(x > 0.0);
    CHECK(std::isnan(v.d2V_fd.front()));
    CHECK(std::isnan(v.d2V_fd.back()));
  }
  const auto p = derive_params(3, 0.0);
  const auto plan = make_plan(p, 30.0, 128);
  EvolutionConfig c;
  c.t_end = 0.1;
  const auto tr = evolve(plan, gaussian(plan, 1.0), c);
  CHECK_THROWS_AS(virial_report(tr, 5.0, 1.0), Error);
  Trajectory t3 = tr;
  t3.times = {0.0, 0.05, 0.1};
  t3.fields = {tr.fields[0], tr.fields[0], tr.fields[1]};
  CHECK_THROWS_AS(virial_report(t3, 25.0, 1.0), Error);
}

TEST_CASE("truncated mass") {
  const auto p = derive_params(3, -3.0 / 16.0);
  const auto plan = make_plan(p, 30.0, 384);
  const auto u = gaussian(plan, 1.0);
  CHECK(truncated_mass(u, 100.0) == doctest::Approx(mass(u)).epsilon(1e-14));
  CHECK(std::abs(truncated_mass(u, 14.0) - mass(u)) < 1e-12 * mass(u));
  CHECK(truncated_mass(u, 1.0) < mass(u));
  CHECK_THROWS_AS(truncated_mass(u, 0.0), Error);

  // Along a run: the rate formula matches differences and obeys the
  // Cauchy-Schwarz-type bound sqrt(Q) sqrt(int |u|^2/|x|^2) / R.
  EvolutionConfig c;
  c.t_end = 0.5;
  const double h = 1e-3;
  for (int i = 1; i < 5; ++i)
    for (double off : {-h, 0.0, h}) c.sample_times.push_back(0.1 * i + off);
  const auto tr = evolve(plan, gaussian(plan, 1.0), c);
  const double R = 1.5;
  for (std::size_t i = 2; i + 1 < tr.times.size(); i += 3) {
    const double fd = (truncated_mass(tr.fields[i + 1], R) - truncated_mass(tr.fields[i - 1], R)) / (2.0 * h);
    const double rate = truncated_mass_rate(tr.fields[i], R);
    CHECK(std::abs(fd - rate) < 1e-4 * std::abs(rate));
    const double bound = std::sqrt(kinetic(tr.fields[i])) * std::sqrt(hardy_integral(tr.fields[i]));
    CHECK(std::abs(rate) <= bound);
  }
}

TEST_CASE("Strichartz ratios") {
  const auto p = derive_params(3, -3.0 / 16.0);
  const auto plan = make_plan(p, 40.0, 256);
  const auto u0 = gaussian(plan, 1.0);
  CHECK(std::abs(strichartz_ratio(plan, u0, std::numeric_limits<double>::infinity(), 2.0, 1.0) - 1.0) < 1e-12);
  CHECK_THROWS_AS(strichartz_ratio(plan, u0, 4.0, 4.0, 1.0), Error);
  CHECK_THROWS_AS(strichartz_ratio(plan, u0, 2.0, 6.0, 1.0), Error);

  // Dilation: u0(2x) on a half-size plan over a quarter of the window.
  const double s = 10.0 / 3.0;
  const double base = strichartz_ratio(plan, u0, s, s, 1.0);
  const auto half = make_plan(p, 20.0, 256);
  const auto u2 = gaussian(half, 1.0, 0.5);
  CHECK(std::abs(strichartz_ratio(half, u2, s, s, 0.25) - base) < 1e-6 * base);

  // Stable under refinement.
  const auto fine = make_plan(p, 40.0, 512);
  CHECK(std::abs(strichartz_ratio(fine, gaussian(fine, 1.0), s, s, 1.0) - base) < 1e-3 * base);
  CHECK(base > 0.0);
  CHECK(base < 2.0);
}

TEST_CASE("local smoothing") {
  // Free Gaussian for a = 0: u(t) = (1+2it)^{-3/2} exp(-r^2/(2(1+2it))), so
  // the space-time integral reduces to a double quadrature.
  const auto p0 = derive_params(3, 0.0);
  const auto plan = make_plan(p0, 20.0, 256);
  const auto u0 = gaussian(plan, 1.0);
  for (double R : {1.0, 4.0}) {
    using boost::math::quadrature::gauss_kronrod;
    const double inf = std::numeric_limits<double>::infinity();
    auto inner = [&](double t) {
      const double s = 1.0 + 4.0 * t * t;
      auto f = [&](double r) {
        return r * r * std::exp(-r * r / s) * (r * r / s / (R * std::pow(1.0 + r * r / (R * R), 1.5)) + 1.0 / (R * r * r));
      };
      return std::pow(s, -1.5) * gauss_kronrod<double, 61>::integrate(f, 0.0, inf, 15, 1e-11);
    };
    const double exact = 8.0 * pi * gauss_kronrod<double, 61>::integrate(inner, 0.0, inf, 15, 1e-11);
    const auto ls = local_smoothing_ratio(plan, u0, R);
    CHECK(std::abs(ls.numerator - exact) <= 1e-6 * exact);
    CHECK(ls.ratio > 0.0);
  }

  // Sharp Hardy smoothing: int_R int |u|^2/|x|^2 = pi ||u0||^2 / (2 nu) for every a.
  for (double a : {-3.0 / 16.0, 0.0, 0.75}) {
    const auto p = derive_params(3, a);
    const auto pl = make_plan(p, 20.0, 256);
    const auto u = gaussian(pl, 1.0);
    const auto ls = local_smoothing_ratio(pl, u, 2.0);
    CHECK(std::abs(ls.hardy_part - pi * mass(u) / (2.0 * p.nu * 2.0)) <= 1e-9 * ls.hardy_part);
  }

  // Simultaneous dilation of data, radius and domain.
  const auto big = make_plan(p0, 40.0, 256);
  const auto ls1 = local_smoothing_ratio(plan, u0, 2.0);
  const auto ls2 = local_smoothing_ratio(big, gaussian(big, 1.0, 2.0), 4.0);
  CHECK(std::abs(ls2.ratio - ls1.ratio) < 1e-6 * ls1.ratio);

  // A single low eigenmode of the box, extended by zero, is a finite-energy
  // whole-space datum.
  const auto small = make_plan(p0, 10.0, 64);
  Eigen::VectorXcd c1 = Eigen::VectorXcd::Zero(64);
  c1(0) = 1.0;
  const auto mode = local_smoothing_ratio(small, RadialField(small, small->synthesize_values(c1)), 1.0);
  CHECK(std::isfinite(mode.ratio));
  CHECK(mode.ratio > 0.0);

  // Data whose spectrum reaches the top of the band is refused.
  const auto coarse = make_plan(p0, 20.0, 32);
  CHECK_THROWS_AS(local_smoothing_ratio(coarse, gaussian(coarse, 1.0, 0.1), 1.0), Error);
  CHECK_THROWS_AS(local_smoothing_ratio(plan, u0, 0.0), Error);
}

TEST_CASE("space-time L10 and series") {
  const auto p = derive_params(3, 0.0);
  const auto plan = make_plan(p, 40.0, 256);
  EvolutionConfig c;
  c.t_end = 1.0;
  c.sample_every = 1;
  const auto tz = evolve(plan, RadialField::zero(plan), c);
  CHECK(spacetime_L10(tz) == 0.0);

  c.nonlinear = false;
  c.sample_every = 0;
  for (int i = 1; i < 40; ++i) c.sample_times.push_back(i / 40.0);
  const auto lin = evolve(plan, gaussian(plan, 1.0), c);
  const double l10 = spacetime_L10(lin);
  const auto fine = make_plan(p, 40.0, 512);
  const double l10f = spacetime_L10(evolve(fine, gaussian(fine, 1.0), c));
  CHECK(l10 > 0.0);
  CHECK(std::abs(l10 - l10f) < 1e-6 * l10);
  // Richardson: halving the sample spacing changes a fourth-order rule by 1/16.
  EvolutionConfig c2 = c;
  c2.sample_times.clear();
  for (int i = 1; i < 80; ++i) c2.sample_times.push_back(i / 80.0);
  EvolutionConfig c4 = c;
  c4.sample_times.clear();
  for (int i = 1; i < 160; ++i) c4.sample_times.push_back(i / 160.0);
  const double l2 = spacetime_L10(evolve(plan, gaussian(plan, 1.0), c2));
  const double l4 = spacetime_L10(evolve(plan, gaussian(plan, 1.0), c4));
  CHECK((l10 - l2) / (l2 - l4) == doctest::Approx(16.0).epsilon(0.1));

  c.nonlinear = true;
  c.mu = 1.0;
  const auto tr = evolve(plan, gaussian(plan, 1.0), c);
  const auto s = diagnostics_series(tr, 5.0, 1.0);
  CHECK(s.t.size() == tr.times.size());
  CHECK(s.l10_accum.size() == s.t.size());
  for (std::size_t i = 1; i < s.t.size(); ++i) CHECK(s.l10_accum[i] >= s.l10_accum[i - 1]);
  for (double e : s.energy) CHECK(e >= 0.0);
  std::ostringstream os;
  write_csv(os, s);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,mass,energy,kinetic,L6,sup,V_R,dV_R,d2V_R_formula,d2V_R_fd,M_R,L10_accum\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(s.t.size()) + 1);
}
