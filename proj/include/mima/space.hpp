#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace mima {

enum class SpaceKind { Torus, RealLine };

// Configuration space of the dynamics: the flat torus [0,1)^d with periodic
// identification, or R^d.
class ConfigurationSpace {
 public:
  ConfigurationSpace(SpaceKind kind, int dim) : kind_(kind), dim_(dim) {}

  static ConfigurationSpace torus(int dim = 1) {
    return {SpaceKind::Torus, dim};
  }
  static ConfigurationSpace real_line(int dim = 1) {
    return {SpaceKind::RealLine, dim};
  }

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_torus() const { return kind_ == SpaceKind::Torus; }

  // Reduce a coordinate to the fundamental domain [0,1). Idempotent.
  double wrap(double x) const {
    if (kind_ == SpaceKind::RealLine) return x;
    double y = x - std::floor(x);
    if (y >= 1.0) y = 0.0;  // guard against floor rounding at the boundary
    return y;
  }

  // Distance between scalar coordinates; on the torus the minimum over
  // lattice shifts, e.g. distance(0.95, 0.05) = 0.1.
  double distance(double x, double y) const {
    if (kind_ == SpaceKind::RealLine) return std::abs(x - y);
    double d = std::abs(wrap(x) - wrap(y));
    return std::min(d, 1.0 - d);
  }

 private:
  SpaceKind kind_;
  int dim_;
};

// Scalar SDE dX = a(X) dt + b(X) dW. Coefficients are total on the space and
// bounded on the torus.
struct SdeModel {
  ConfigurationSpace space;
  std::function<double(double)> drift;
  std::function<double(double)> diffusion;
  std::string label;
};

// Built-in test models, selectable by label in the CLI config.
namespace models {

// dX = sqrt(2) dW on the torus; generator is the Laplacian.
SdeModel pure_diffusion_torus();

// Ornstein-Uhlenbeck dX = -theta X dt + sigma dW on the real line.
SdeModel ornstein_uhlenbeck(double theta, double sigma);

// dX = sin(2 pi x) dt + sqrt(1 + cos(2 pi x)/2) dW on the torus; smooth and
// uniformly elliptic.
SdeModel nonlinear_torus();

SdeModel by_label(const std::string& label);

}  // namespace models

// Heat-flow Gaussian reference: N(0, Sigma + 2t) solving d_t p = d_xx p.
struct WideningGaussianRef {
  double sigma0;  // initial variance, > 0

  double variance(double t) const { return sigma0 + 2.0 * t; }
};

double widening_gaussian_density(double t, double x,
                                 const WideningGaussianRef& ref);

// D(p(t+dt) || p(t)) for the widening Gaussian, exactly
// (1/2){h - ln(1+h)} with h = 2 dt / sigma_t.
double widening_gaussian_entropy(double sigma_t, double dt);

// Closed-form mean and variance of the OU process at time t.
struct MeanVariance {
  double mean;
  double variance;
};
MeanVariance ou_reference_moments(double theta, double sigma, double x0_mean,
                                  double x0_var, double t);

}  // namespace mima
