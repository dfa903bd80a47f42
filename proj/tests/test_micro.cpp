#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mima/micro.hpp"

using namespace mima;

namespace {

SdeModel frozen_model() {
  return {ConfigurationSpace::real_line(), [](double) { return 0.0; },
          [](double) { return 0.0; }, "frozen"};
}

SdeModel drift_only(double a) {
  return {ConfigurationSpace::real_line(), [a](double) { return a; },
          [](double) { return 0.0; }, "drift-only"};
}

}  // namespace

TEST_CASE("window splits exactly into K micro steps") {
  const auto cfg = MicroConfig::from_window(0.05, 20);
  CHECK(cfg.steps == 20);
  CHECK(cfg.dt_micro == doctest::Approx(0.0025));
  CHECK(cfg.window() == doctest::Approx(0.05).epsilon(1e-15));
  CHECK_THROWS(MicroConfig::from_window(-0.1, 10));
  CHECK_THROWS(MicroConfig::from_window(0.1, 0));
}

TEST_CASE("zero coefficients leave the ensemble fixed") {
  WeightedEnsemble ens({0.3, -1.2, 4.0}, ConfigurationSpace::real_line());
  const auto next = em_step(ens, frozen_model(), 0.1, NormalStream(1), 0);
  CHECK(next.positions() == ens.positions());
  CHECK(next.weights() == ens.weights());
}

TEST_CASE("pure drift moves deterministically") {
  WeightedEnsemble ens({0.0, 1.0}, ConfigurationSpace::real_line());
  const auto next = em_step(ens, drift_only(2.0), 0.25, NormalStream(1), 0);
  CHECK(next.positions()[0] == doctest::Approx(0.5));
  CHECK(next.positions()[1] == doctest::Approx(1.5));
}

TEST_CASE("weights pass through the burst untouched") {
  WeightedEnsemble ens({0.1, 0.4, 0.8}, {0.5, 0.3, 0.2},
                       ConfigurationSpace::torus());
  const auto model = models::pure_diffusion_torus();
  const auto burst =
      propagate(ens, model, MicroConfig::from_window(0.01, 5), NormalStream(3));
  for (const auto& state : burst) CHECK(state.weights() == ens.weights());
}

TEST_CASE("torus positions stay wrapped") {
  std::vector<double> x;
  for (int j = 0; j < 64; ++j) x.push_back(j / 64.0);
  WeightedEnsemble ens(std::move(x), ConfigurationSpace::torus());
  const auto model = models::pure_diffusion_torus();
  const auto burst = propagate(ens, model, MicroConfig::from_window(0.5, 10),
                               NormalStream(8));
  for (const auto& state : burst)
    for (double p : state.positions()) {
      CHECK(p >= 0.0);
      CHECK(p < 1.0);
    }
}

TEST_CASE("burst returns K+1 states starting from the input") {
  WeightedEnsemble ens({0.25, 0.5, 0.75}, ConfigurationSpace::torus());
  const auto model = models::pure_diffusion_torus();
  const auto cfg = MicroConfig::from_window(0.004, 4);
  const auto burst = propagate(ens, model, cfg, NormalStream(11), 100);
  REQUIRE(burst.size() == 5);
  CHECK(burst[0].positions() == ens.positions());
  // the same burst reassembled step by step from the global offsets
  WeightedEnsemble state = ens;
  for (int k = 0; k < 4; ++k) {
    state = em_step(state, model, cfg.dt_micro, NormalStream(11), 100 + k);
    CHECK(state.positions() == burst[k + 1].positions());
  }
}

TEST_CASE("one EM step reproduces the scheme moments") {
  // dX = -theta X dt + sigma dW from a point mass: after one step the
  // ensemble mean is x0(1 - theta dt) and the variance sigma^2 dt
  const double theta = 1.0, sigma = 0.7, x0 = 2.0, dt = 0.01;
  const auto model = models::ornstein_uhlenbeck(theta, sigma);
  const int J = 100000;
  WeightedEnsemble ens(std::vector<double>(J, x0),
                       ConfigurationSpace::real_line());
  const auto next = em_step(ens, model, dt, NormalStream(17), 0);
  const double mean = expectation(next, [](double x) { return x; });
  const double var =
      expectation(next, [mean](double x) { return (x - mean) * (x - mean); });
  CHECK(mean == doctest::Approx(x0 * (1.0 - theta * dt)).epsilon(2e-3));
  CHECK(var == doctest::Approx(sigma * sigma * dt).epsilon(2e-2));
}

TEST_CASE("identical seeds replay identical trajectories") {
  WeightedEnsemble ens({0.2, 0.4, 0.6, 0.8}, ConfigurationSpace::torus());
  const auto model = models::nonlinear_torus();
  const auto cfg = MicroConfig::from_window(0.01, 8);
  const auto a = propagate(ens, model, cfg, NormalStream(123), 50);
  const auto b = propagate(ens, model, cfg, NormalStream(123), 50);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].positions() == b[i].positions());
}
