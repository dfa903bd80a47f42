#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mima/space.hpp"

namespace mima {

// Weights below this magnitude are treated as exact zeros, so underflow never
// produces a spurious infinite entropy.
inline constexpr double kWeightFloor = 1e-300;

// J weighted particles carrying a probability measure on the space.
// Weights are nonnegative and sum to one within 1e-12; positions lie in the
// fundamental domain. Value object, immutable by convention after
// construction.
class WeightedEnsemble {
 public:
  WeightedEnsemble(std::vector<double> positions, std::vector<double> weights,
                   ConfigurationSpace space, std::string seed_lineage = "");

  // Uniform weights.
  WeightedEnsemble(std::vector<double> positions, ConfigurationSpace space,
                   std::string seed_lineage = "");

  std::size_t size() const { return positions_.size(); }
  const std::vector<double>& positions() const { return positions_; }
  const std::vector<double>& weights() const { return weights_; }
  const ConfigurationSpace& space() const { return space_; }
  const std::string& seed_lineage() const { return seed_lineage_; }

  // Same particles, new weights (renormalized).
  WeightedEnsemble reweighted(std::vector<double> weights) const;

  // Same weights, new particle positions (wrapped into the domain).
  WeightedEnsemble moved(std::vector<double> positions,
                         std::string seed_lineage) const;

  // One row per particle: x,weight. Full precision.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> positions_;
  std::vector<double> weights_;
  ConfigurationSpace space_;
  std::string seed_lineage_;
};

// Weighted mean sum_j w_j f(x_j), accumulated in fixed index order.
double expectation(const WeightedEnsemble& ens,
                   const std::function<double(double)>& f);

// D(nu||mu) = sum_j nu_j ln(nu_j/mu_j) for ensembles sharing positions, with
// 0 ln(0/q) = 0. Throws AbsoluteContinuityViolated when nu_j > 0 with
// mu_j = 0 (the entropy is +infinity).
double discrete_relative_entropy(const WeightedEnsemble& nu,
                                 const WeightedEnsemble& mu);

// L1 distance sum_j |nu_j - mu_j| on shared positions; ranges over [0,2].
double total_variation(const WeightedEnsemble& nu, const WeightedEnsemble& mu);

}  // namespace mima
