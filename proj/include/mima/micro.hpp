#pragma once

#include <cstdint>
#include <vector>

#include "mima/ensemble.hpp"
#include "mima/rng.hpp"
#include "mima/space.hpp"

namespace mima {

// Inner Euler-Maruyama burst: K steps of size dt_micro covering the window
// Delta tau = K * dt_micro.
struct MicroConfig {
  double dt_micro;
  int steps;

  double window() const { return dt_micro * steps; }

  // Window split into K steps, dt derived so window = steps * dt exactly.
  static MicroConfig from_window(double window, int steps);
};

// One Euler-Maruyama step x <- x + a(x) dt + b(x) sqrt(dt) xi, with xi drawn
// per particle at the given stream step index. Weights are untouched; torus
// positions are re-wrapped.
WeightedEnsemble em_step(const WeightedEnsemble& ens, const SdeModel& model,
                         double dt, const NormalStream& rng,
                         std::uint64_t step_index);

// The K+1 states of the micro burst, element 0 being the input. Stream
// indices run from step_offset to step_offset + K - 1, so variates are
// consumed in (step, particle) lexicographic order across a whole run.
std::vector<WeightedEnsemble> propagate(const WeightedEnsemble& ens,
                                        const SdeModel& model,
                                        const MicroConfig& cfg,
                                        const NormalStream& rng,
                                        std::uint64_t step_offset = 0);

}  // namespace mima
