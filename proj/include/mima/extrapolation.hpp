#pragma once

#include "mima/matching.hpp"

namespace mima {

struct ExtrapolationPlan {
  double dt_macro;      // target Delta t
  double window;        // micro window Delta tau, 0 < window <= dt_macro
  bool adaptive = true; // halve Delta t on infeasible targets
  double min_dt = 0.0;  // floor for halving; defaults to the window
  int max_halvings = 30;

  double floor() const { return min_dt > 0.0 ? min_dt : window; }
};

// Coarse forward Euler: m0 + (dt/dtau) (m1 - m0), level-wise.
MacroState extrapolate(const MacroState& m0, const MacroState& m1, double dtau,
                       double dt);

struct ExtrapolateMatchResult {
  MatchOutcome outcome;
  double dt_used;
  int halvings;
};

// Match the burst-end prior with the extrapolated state, halving the macro
// step on infeasibility when the plan is adaptive. Throws StepCollapse when
// the step would fall below the floor; at dt = window the target is m1, the
// restriction of an actual ensemble, so collapse signals a broken prior.
ExtrapolateMatchResult extrapolate_and_match(const MacroState& m0,
                                             const MacroState& m1,
                                             const WeightedEnsemble& prior,
                                             const RestrictionSet& R,
                                             const ExtrapolationPlan& plan,
                                             const SolverOptions& opts = {});

}  // namespace mima
