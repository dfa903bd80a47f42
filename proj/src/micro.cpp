#include "mima/micro.hpp"

#include <cmath>
#include <stdexcept>

namespace mima {

MicroConfig MicroConfig::from_window(double window, int steps) {
  if (window <= 0.0 || steps < 1)
    throw std::invalid_argument("micro window and step count must be positive");
  return {window / steps, steps};
}

WeightedEnsemble em_step(const WeightedEnsemble& ens, const SdeModel& model,
                         double dt, const NormalStream& rng,
                         std::uint64_t step_index) {
  if (dt <= 0.0) throw std::invalid_argument("micro step must be positive");
  const double sqrt_dt = std::sqrt(dt);
  std::vector<double> x = ens.positions();
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xi = rng.normal(step_index, j);
    x[j] += model.drift(x[j]) * dt + model.diffusion(x[j]) * sqrt_dt * xi;
  }
  return ens.moved(std::move(x), ens.seed_lineage());
}

std::vector<WeightedEnsemble> propagate(const WeightedEnsemble& ens,
                                        const SdeModel& model,
                                        const MicroConfig& cfg,
                                        const NormalStream& rng,
                                        std::uint64_t step_offset) {
  std::vector<WeightedEnsemble> states;
  states.reserve(cfg.steps + 1);
  states.push_back(ens);
  for (int k = 0; k < cfg.steps; ++k)
    states.push_back(
        em_step(states.back(), model, cfg.dt_micro, rng, step_offset + k));
  return states;
}

}  // namespace mima
