#include "mima/ensemble.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "mima/errors.hpp"

namespace mima {

namespace {

std::vector<double> normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double& v : w) {
    if (v < 0.0) throw std::invalid_argument("negative ensemble weight");
    if (v < kWeightFloor) v = 0.0;
    sum += v;
  }
  if (sum <= 0.0) throw std::invalid_argument("ensemble weights sum to zero");
  for (double& v : w) v /= sum;
  return w;
}

std::vector<double> wrapped(std::vector<double> x,
                            const ConfigurationSpace& space) {
  for (double& v : x) v = space.wrap(v);
  return x;
}

}  // namespace

WeightedEnsemble::WeightedEnsemble(std::vector<double> positions,
                                   std::vector<double> weights,
                                   ConfigurationSpace space,
                                   std::string seed_lineage)
    : positions_(wrapped(std::move(positions), space)),
      weights_(normalized(std::move(weights))),
      space_(space),
      seed_lineage_(std::move(seed_lineage)) {
  if (positions_.size() != weights_.size())
    throw std::invalid_argument("positions/weights size mismatch");
  if (positions_.size() < 2)
    throw std::invalid_argument("ensemble needs at least two particles");
}

WeightedEnsemble::WeightedEnsemble(std::vector<double> positions,
                                   ConfigurationSpace space,
                                   std::string seed_lineage)
    : positions_(wrapped(std::move(positions), space)),
      weights_(positions_.size(), 1.0 / static_cast<double>(positions_.size())),
      space_(space),
      seed_lineage_(std::move(seed_lineage)) {
  if (positions_.size() < 2)
    throw std::invalid_argument("ensemble needs at least two particles");
}

WeightedEnsemble WeightedEnsemble::reweighted(
    std::vector<double> weights) const {
  return {positions_, std::move(weights), space_, seed_lineage_};
}

WeightedEnsemble WeightedEnsemble::moved(std::vector<double> positions,
                                         std::string seed_lineage) const {
  return {std::move(positions), weights_, space_, std::move(seed_lineage)};
}

void WeightedEnsemble::write_csv(std::ostream& os) const {
  os << "x_1,weight\n";
  os.precision(17);
  for (std::size_t j = 0; j < positions_.size(); ++j)
    os << positions_[j] << ',' << weights_[j] << '\n';
}

double expectation(const WeightedEnsemble& ens,
                   const std::function<double(double)>& f) {
  double acc = 0.0;
  const auto& x = ens.positions();
  const auto& w = ens.weights();
  for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * f(x[j]);
  return acc;
}

namespace {

void require_shared_support(const WeightedEnsemble& nu,
                            const WeightedEnsemble& mu) {
  if (nu.size() != mu.size())
    throw std::invalid_argument("ensembles do not share positions");
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (nu.positions()[j] != mu.positions()[j])
      throw std::invalid_argument("ensembles do not share positions");
}

}  // namespace

double discrete_relative_entropy(const WeightedEnsemble& nu,
                                 const WeightedEnsemble& mu) {
  require_shared_support(nu, mu);
  double acc = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const double n = nu.weights()[j];
    const double m = mu.weights()[j];
    if (n == 0.0) continue;
    if (m == 0.0)
      throw AbsoluteContinuityViolated(
          "nu is not absolutely continuous with respect to mu");
    acc += n * std::log(n / m);
  }
  return acc;
}

double total_variation(const WeightedEnsemble& nu,
                       const WeightedEnsemble& mu) {
  require_shared_support(nu, mu);
  double acc = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j)
    acc += std::abs(nu.weights()[j] - mu.weights()[j]);
  return acc;
}

}  // namespace mima
