#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "invsq/data.hpp"
#include "invsq/diagnostics.hpp"
#include "invsq/experiments.hpp"
#include "invsq/ground_state.hpp"
#include "invsq/log_basis.hpp"
#include "invsq/operator_la.hpp"
#include "invsq/parallel.hpp"
#include "invsq/variational.hpp"

using namespace invsq;
using std::numbers::pi;

namespace {

// Couplings drawn from the admissible evolution window and beyond it for
// the static properties.
double random_coupling(std::mt19937_64& rng, double lo = -0.2, double hi = 1.5) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double h1_rel(const PlanPtr& plan, const RadialField& a, const RadialField& b) {
  return std::sqrt(plan->form(a.values - b.values) / plan->form(b.values));
}

}  // namespace

TEST_CASE("property: Parseval and round trip on random couplings") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const double a = random_coupling(rng, -0.24, 3.0);
    const auto plan = make_plan(derive_params(3, a), 20.0, 192);
    const auto u = random_regular_field(plan, rng);
    const Eigen::VectorXcd c = plan->analyze_values(u.values);
    INFO("a = " << a);
    CHECK(std::abs(plan->weights().dot(u.values.cwiseAbs2()) - c.squaredNorm()) <= 1e-10 * c.squaredNorm());
    CHECK((plan->synthesize_values(c) - u.values).norm() <= 1e-11 * u.values.norm());
  }
}

TEST_CASE("property: propagator group law and unitarity") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> time(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto plan = make_plan(derive_params(3, random_coupling(rng)), 20.0, 128);
    const auto u = random_regular_field(plan, rng);
    const double s = time(rng), t = time(rng);
    const auto two = apply_multiplier(plan, apply_multiplier(plan, u, MultiplierSpec::propagator(s)),
                                      MultiplierSpec::propagator(t));
    const auto one = apply_multiplier(plan, u, MultiplierSpec::propagator(s + t));
    CHECK((two.values - one.values).norm() <= 1e-11 * u.values.norm());
    CHECK(std::abs(mass(one) - mass(u)) <= 1e-12 * mass(u));
  }
}

TEST_CASE("property: Strang steps conserve mass and reverse exactly") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> step(1e-3, 0.1);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = random_coupling(rng, -3.0 / 16.0, 1.0);
    const auto plan = make_plan(derive_params(3, a), 20.0, 128);
    const auto u = random_regular_field(plan, rng);
    const double mu = trial % 2 ? 1.0 : -1.0, dt = step(rng);
    const auto v = strang_step(plan, u, dt, mu);
    INFO("a = " << a << " dt = " << dt << " mu = " << mu);
    CHECK(std::abs(mass(v) - mass(u)) <= 1e-12 * mass(u));
    const auto back = conjugate_step(plan, v, dt, mu);
    // The phase |u|^4 dt reaches tens of radians here, which scales the roundoff;
    // in the energy norm it is further weighted by lambda_max.
    CHECK((back.values - u.values).norm() <= 1e-11 * u.values.norm());
    CHECK(h1_rel(plan, back, u) <= 1e-10);
  }
}

TEST_CASE("property: energy and quotient symmetries") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi), scale(0.1, 10.0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto p = derive_params(3, random_coupling(rng));
    const auto b = make_log_basis(p);
    const auto u = random_regular_field(b, rng);
    const auto rot = std::polar(1.0, phase(rng)) * u;
    CHECK(std::abs(energy(rot, -1.0) - energy(u, -1.0)) <= 1e-12 * std::abs(energy(u, 1.0)));
    const double q = sobolev_quotient(u);
    CHECK(std::abs(sobolev_quotient(std::complex<double>(scale(rng)) * u) - q) <= 1e-12 * q);
    // The sharp constant bounds every field.
    CHECK(q <= std::pow(ground_state_constant(negative_part(p)), -1.0 / 3.0) * (1.0 + 1e-9));
  }
}

TEST_CASE("property: energy-trapping inequality on random fields") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> amp(0.05, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = derive_params(3, random_coupling(rng));
    const auto b = make_log_basis(p);
    const auto u = std::complex<double>(amp(rng)) * random_regular_field(b, rng);
    const double K = ground_state_constant(negative_part(p));
    const double y = kinetic(u) / K;
    INFO("a = " << p.a << " y = " << y);
    CHECK(2.0 * energy(u, -1.0) / K >= y - y * y * y / 3.0 - 1e-9);
  }
}

TEST_CASE("property: Hardy part of local smoothing is exact") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 6; ++trial) {
    const auto p = derive_params(3, random_coupling(rng, -3.0 / 16.0, 1.0));
    const auto plan = make_plan(p, 20.0, 256);
    const auto u = random_regular_field(plan, rng);
    const double R = std::uniform_real_distribution<double>(0.5, 8.0)(rng);
    const auto ls = local_smoothing_ratio(plan, u, R);
    CHECK(std::abs(ls.hardy_part - pi * mass(u) / (2.0 * p.nu * R)) <= 1e-9 * ls.hardy_part);
    CHECK(ls.gradient_part > 0.0);
    CHECK(ls.ratio == doctest::Approx(ls.numerator / ls.denominator));
  }
}

TEST_CASE("property: parallel_for is deterministic and propagates errors") {
  std::vector<double> serial(200), threaded(200);
  const auto body = [](std::vector<double>& out) {
    return [&out](std::size_t i) {
      std::mt19937_64 rng(i);
      out[i] = std::normal_distribution<double>()(rng);
    };
  };
  parallel_for(serial.size(), body(serial), 1);
  parallel_for(threaded.size(), body(threaded), 4);
  CHECK(serial == threaded);

  std::atomic<int> calls{0};
  parallel_for(0, [&](std::size_t) { ++calls; }, 3);
  CHECK(calls == 0);
  CHECK_THROWS_AS(parallel_for(
                      50,
                      [](std::size_t i) {
                        if (i == 17) throw std::runtime_error("boom");
                      },
                      3),
                  std::runtime_error);
  CHECK(sweep_threads() >= 1);
}

TEST_CASE("property: experiment results are reproducible from the seed") {
  const std::string text =
      R"({"experiment": "strichartz", "grid": {"R": 20, "N": 96}, "seed": 5, "options": {"samples": 3, "T": 1}})";
  const auto cfg = parse_config(text);
  const auto r1 = run_experiment(cfg), r2 = run_experiment(parse_config(text));
  CHECK(r1.error.empty());
  CHECK(r1.results.dump() == r2.results.dump());
  CHECK(r1.csv == r2.csv);
  // The resolved config parses back to the same hash.
  CHECK(config_hash(parse_config(resolved_config(cfg).dump())) == config_hash(cfg));
  auto other = cfg;
  other.seed = 6;
  CHECK(run_experiment(other).csv != r1.csv);
}

TEST_CASE("property: monotone last decade") {
  CHECK(monotone_last_decade({1.0, 0.5, 2.0, 3.0, 9.0, 20.0}));
  CHECK(monotone_last_decade({1.0, 2.0, 4.0}));
  CHECK_FALSE(monotone_last_decade({0.5, 3.0, 2.5, 20.0}));
  // A dip before the final decade does not count.
  CHECK(monotone_last_decade({3.0, 1.0, 0.9, 5.0, 9.5}));
  CHECK_FALSE(monotone_last_decade({}));
}
