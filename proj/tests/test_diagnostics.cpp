#include <doctest.h>

#include <cmath>

#include "ergo/diagnostics.hpp"
#include "ergo/models/langevin.hpp"
#include "ergo/models/neuronal.hpp"
#include "support/stats.hpp"

using namespace ergo;
using models::Drift;
using models::LangevinModel;

namespace {

Ensemble gaussian_cloud(std::size_t n, int dim, uint64_t seed, double mean = 0.0,
                        double sd = 1.0) {
  Ensemble e(n, dim);
  NoiseStream s(seed, 0, 0, 0);
  for (auto& v : e.data()) v = mean + sd * s.gaussian();
  return e;
}

}  // namespace

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("ou_invariant closed forms") {
  CHECK(ou_invariant(1.0, std::sqrt(2.0)).variance == doctest::Approx(1.0));
  CHECK(ou_invariant(2.0, 1.0).variance == doctest::Approx(0.25));
  CHECK_THROWS(ou_invariant(0.0, 1.0));
}

TEST_CASE("gaussian_w2_1d closed forms") {
  CHECK(gaussian_w2_1d(0.3, 0.7, 0.3, 0.7) == 0.0);
  CHECK(gaussian_w2_1d(0.0, 0.5, 3.0, 0.5) == doctest::Approx(3.0));
  CHECK_THROWS(gaussian_w2_1d(0.0, -1.0, 0.0, 1.0));
}

TEST_CASE("gaussian_w2_1d agrees with the empirical estimator at large N") {
  const std::size_t n = 1000000;
  Ensemble a(n, 1), b(n, 1);
  NoiseStream sa(60, 0, 0, 0), sb(61, 0, 0, 0);
  const double m2 = 0.4, sd2 = 1.3;
  for (auto& v : a.data()) v = sa.gaussian();
  for (auto& v : b.data()) v = m2 + sd2 * sb.gaussian();
  const double closed = gaussian_w2_1d(0.0, 1.0, m2, sd2 * sd2);
  const double emp = wp_exact_1d(a, b, {2.0});
  CHECK(std::abs(emp - closed) <= 2e-3);
}

TEST_CASE("empirical_invariant matches the OU AR(1) variance") {
  const double k = 1.0, sigma = 1.0, gamma = 5e-3;
  LangevinModel model({1, Drift::ou(k), sigma});
  auto mu0 = gaussian_cloud(20000, 1, 62);
  auto ref = empirical_invariant(model, gamma, 2000, 2000, 20000, 63, mu0);
  const double v_star = sigma * sigma * gamma / (1.0 - std::pow(1.0 - k * gamma, 2.0));
  const double se = v_star * std::sqrt(2.0 / 20000.0);
  CHECK(std::abs(ref.variance - v_star) <= 3.0 * se);
  CHECK(ref.kind == ReferenceMeasure::Kind::kEmpirical);
  CHECK(ref.sample.size() == 20000);

  // idempotence in distribution: restart from the output and run again
  auto again = empirical_invariant(model, gamma, 1, 2000, 20000, 64, ref.sample);
  CHECK(std::abs(again.mean - ref.mean) <=
        3.0 * (std::sqrt(ref.variance / 20000.0) * 2.0) + 1e-3);
  CHECK(std::abs(again.variance - ref.variance) <= 3.0 * 2.0 * se);
}

TEST_CASE("empirical_invariant: identity dynamics trivially stationary") {
  LangevinModel model({1, Drift::affine(0.0, 0.0), 0.0});
  auto mu0 = gaussian_cloud(1000, 1, 65, 2.0, 0.5);
  auto ref = empirical_invariant(model, 1e-2, 10, 100, 1000, 66, mu0);
  CHECK(ref.sample.data() == mu0.data());
}

TEST_CASE("empirical_invariant: neuronal renewal mean") {
  // constant rate lambda and constant drift c: spikes reset an age process,
  // the stationary age is Exp(lambda), so E[X] = c / lambda
  const double lambda = 2.0, c = 1.0;
  models::NeuronalSpec spec;
  spec.drift = {models::NeuronDrift::Kind::kConstant, c, 0.0};
  spec.rate = {models::SpikeRate::Kind::kConstant, lambda};
  spec.rate_cap = 5.0;
  models::NeuronalModel model(spec);
  Ensemble mu0(20000, 1, Constraint::kNonnegativeOrthant);
  auto ref = empirical_invariant(model, 0.05, 400, 400, 20000, 67, mu0);
  // stationary mean c/lambda, second moment 2c^2/lambda^2 -> sd = c/lambda
  const double mean_expected = c / lambda;
  const double sd = c / lambda;
  CHECK(std::abs(ref.mean - mean_expected) <= 3.0 * sd / std::sqrt(20000.0) + 1e-3);
}

TEST_CASE("fit_rate on exact and noisy power laws") {
  std::vector<std::size_t> ns{64, 128, 256, 512, 1024, 2048, 4096, 8192};
  std::vector<double> exact, noisy;
  NoiseStream s(68, 0, 0, 0);
  for (auto n : ns) {
    exact.push_back(1.0 / double(n));                    // W = n^-1, p=1
    noisy.push_back(3.0 * std::pow(double(n), -0.5) * (1.0 + 0.01 * (2.0 * s.uniform() - 1.0)));
  }
  auto r1 = fit_rate(ns, exact, 1.0, 1.0, 0.0);
  CHECK(r1.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(r1.pass);

  auto r2 = fit_rate(ns, noisy, 1.0, 0.5, 0.0);
  CHECK(r2.slope >= -0.55);
  CHECK(r2.slope <= -0.45);
  CHECK(r2.pass);

  // one-sided rule: faster decay passes, slower fails
  auto r3 = fit_rate(ns, exact, 1.0, 0.5, 0.0);
  CHECK(r3.pass);
  std::vector<double> slow;
  for (auto n : ns) slow.push_back(std::pow(double(n), -0.1));
  auto r4 = fit_rate(ns, slow, 1.0, 1.0, 0.0);
  CHECK(!r4.pass);
}

TEST_CASE("fit_rate log correction removes the ln factor") {
  std::vector<std::size_t> ns{64, 256, 1024, 4096, 16384};
  std::vector<double> w;
  for (auto n : ns) w.push_back(std::log1p(double(n)) / double(n));  // W^p with p=1
  auto r = fit_rate(ns, w, 1.0, 1.0, 0.0, true);
  CHECK(r.slope == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("fit_rate starves below the bias floor") {
  std::vector<std::size_t> ns{64, 128, 256, 512};
  std::vector<double> w{1e-3, 1e-3, 1e-3, 1e-3};
  CHECK_THROWS_AS(fit_rate(ns, w, 2.0, 1.0, /*floor=*/1e-3), BiasStarvation);
}

TEST_CASE("bias floor scales like N^{-1/2}") {
  ReferenceMeasure ref = ou_invariant(1.0, 1.0);
  std::vector<double> floors;
  for (std::size_t n : {1000ul, 10000ul, 100000ul}) {
    floors.push_back(bias_floor_gaussian(ref, n, 20, 69, /*moment_matched=*/false));
  }
  const double r1 = floors[1] / floors[0];
  const double r2 = floors[2] / floors[1];
  CHECK(r1 >= 0.25);
  CHECK(r1 <= 0.4);
  CHECK(r2 >= 0.25);
  CHECK(r2 <= 0.4);
}

TEST_CASE("theorem_verdict aggregation") {
  MonitorReport good_monitor;
  good_monitor.pass = true;
  RateReport good_rate;
  good_rate.pass = true;
  good_rate.slope = -1.1;
  good_rate.predicted = 1.0;
  CouplingEstimate good_coupling;
  good_coupling.b_star = 1.8;

  auto v = theorem_verdict("ou_w2", "b > 0", 1.0, good_monitor, good_coupling, good_rate);
  CHECK(v.overall == "PASS");
  REQUIRE(v.clauses.size() == 3);
  for (const auto& c : v.clauses) CHECK(c.pass);

  MonitorReport bad_monitor;
  bad_monitor.pass = false;
  bad_monitor.first_violation = 17;
  auto v2 = theorem_verdict("expanding", "b > 0", 1.0, bad_monitor, std::nullopt,
                            std::nullopt);
  CHECK(v2.overall == "FAIL");

  // regime violation: rate clause reported but not judged
  auto v3 = theorem_verdict("neuronal_w2", "b_bar - 2 C_f J > 0", -0.5, good_monitor,
                            std::nullopt, good_rate);
  CHECK(v3.overall == "REGIME_VIOLATED");
  CHECK(!v3.clauses.back().applicable);

  CHECK_THROWS(theorem_verdict("empty", "", 0.0, std::nullopt, std::nullopt, std::nullopt));

  // json serialization is stable and contains the verdict
  const auto js = verdict_to_json(v);
  CHECK(js.find("\"overall\": \"PASS\"") != std::string::npos);
}

TEST_SUITE_END();
