#include "mima/space.hpp"

#include <numbers>
#include <stdexcept>

#include "mima/errors.hpp"

namespace mima {

namespace models {

SdeModel pure_diffusion_torus() {
  return {ConfigurationSpace::torus(),
          [](double) { return 0.0; },
          [](double) { return std::numbers::sqrt2; },
          "pure-diffusion"};
}

SdeModel ornstein_uhlenbeck(double theta, double sigma) {
  return {ConfigurationSpace::real_line(),
          [theta](double x) { return -theta * x; },
          [sigma](double) { return sigma; },
          "ou"};
}

SdeModel nonlinear_torus() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return {ConfigurationSpace::torus(),
          [=](double x) { return std::sin(two_pi * x); },
          [=](double x) { return std::sqrt(1.0 + 0.5 * std::cos(two_pi * x)); },
          "nonlinear-torus"};
}

SdeModel by_label(const std::string& label) {
  if (label == "pure-diffusion") return pure_diffusion_torus();
  if (label == "ou") return ornstein_uhlenbeck(1.0, std::numbers::sqrt2);
  if (label == "nonlinear-torus") return nonlinear_torus();
  throw ConfigError("unknown model label: " + label);
}

}  // namespace models

double widening_gaussian_density(double t, double x,
                                 const WideningGaussianRef& ref) {
  const double v = ref.variance(t);
  return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
}

double widening_gaussian_entropy(double sigma_t, double dt) {
  const double h = 2.0 * dt / sigma_t;
  // 0.5*(h - log1p(h)); log1p keeps full precision for small dt
  return 0.5 * (h - std::log1p(h));
}

MeanVariance ou_reference_moments(double theta, double sigma, double x0_mean,
                                  double x0_var, double t) {
  const double decay = std::exp(-theta * t);
  const double mean = x0_mean * decay;
  const double variance =
      x0_var * decay * decay +
      sigma * sigma * (1.0 - decay * decay) / (2.0 * theta);
  return {mean, variance};
}

}  // namespace mima
