#include "mima/extrapolation.hpp"

#include <stdexcept>

#include "mima/errors.hpp"

namespace mima {

MacroState extrapolate(const MacroState& m0, const MacroState& m1, double dtau,
                       double dt) {
  if (m0.level() != m1.level())
    throw std::invalid_argument("macro states of different level");
  if (dtau <= 0.0) throw std::invalid_argument("micro window must be positive");
  const double slope = dt / dtau;
  MacroState out = m0;
  for (int l = 0; l < out.level(); ++l)
    out.m[l] += slope * (m1.m[l] - m0.m[l]);
  return out;
}

ExtrapolateMatchResult extrapolate_and_match(const MacroState& m0,
                                             const MacroState& m1,
                                             const WeightedEnsemble& prior,
                                             const RestrictionSet& R,
                                             const ExtrapolationPlan& plan,
                                             const SolverOptions& opts) {
  if (plan.window <= 0.0 || plan.window > plan.dt_macro)
    throw std::invalid_argument("need 0 < window <= dt_macro");

  double dt = plan.dt_macro;
  int halvings = 0;
  while (true) {
    MatchOutcome outcome =
        match(extrapolate(m0, m1, plan.window, dt), prior, R, opts);
    if (outcome.status == MatchStatus::Converged || !plan.adaptive)
      return {std::move(outcome), dt, halvings};
    if (dt * 0.5 < plan.floor() || halvings >= plan.max_halvings)
      throw StepCollapse("extrapolated moments stay infeasible down to the "
                         "micro window",
                         -1);
    dt *= 0.5;
    ++halvings;
  }
}

}  // namespace mima
