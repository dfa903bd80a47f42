#include "mima/matching.hpp"

#include <cmath>
#include <stdexcept>

#include "mima/dual_solver.hpp"
#include "mima/errors.hpp"

namespace mima {

std::vector<double> evaluation_table(const RestrictionSet& R,
                                     const WeightedEnsemble& prior) {
  const int L = R.level();
  const auto& x = prior.positions();
  std::vector<double> phi(x.size() * L);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (int l = 0; l < L; ++l) phi[j * L + l] = R.eval(l, x[j]);
  return phi;
}

double log_partition(const std::vector<double>& lambda,
                     const std::vector<double>& weights,
                     const std::vector<double>& phi, int level) {
  double shift = -1e308;
  const std::size_t J = weights.size();
  std::vector<double> score(J);
  for (std::size_t j = 0; j < J; ++j) {
    if (weights[j] == 0.0) {
      score[j] = -1e308;
      continue;
    }
    double s = std::log(weights[j]);
    for (int l = 0; l < level; ++l) s += lambda[l] * phi[j * level + l];
    score[j] = s;
    if (s > shift) shift = s;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < J; ++j)
    if (weights[j] != 0.0) sum += std::exp(score[j] - shift);
  return shift + std::log(sum);
}

std::vector<double> dual_gradient(const std::vector<double>& lambda,
                                  const std::vector<double>& weights,
                                  const std::vector<double>& phi, int level) {
  const double a = log_partition(lambda, weights, phi, level);
  const std::size_t J = weights.size();
  std::vector<double> g(level, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    if (weights[j] == 0.0) continue;
    double s = std::log(weights[j]);
    for (int l = 0; l < level; ++l) s += lambda[l] * phi[j * level + l];
    const double tw = std::exp(s - a);
    for (int l = 0; l < level; ++l) g[l] += tw * phi[j * level + l];
  }
  return g;
}

std::vector<double> dual_hessian(const std::vector<double>& lambda,
                                 const std::vector<double>& weights,
                                 const std::vector<double>& phi, int level) {
  const double a = log_partition(lambda, weights, phi, level);
  const auto mom = dual_gradient(lambda, weights, phi, level);
  const std::size_t J = weights.size();
  std::vector<double> h(level * level, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    if (weights[j] == 0.0) continue;
    double s = std::log(weights[j]);
    for (int l = 0; l < level; ++l) s += lambda[l] * phi[j * level + l];
    const double tw = std::exp(s - a);
    for (int r = 0; r < level; ++r) {
      const double dr = phi[j * level + r] - mom[r];
      for (int c = 0; c < level; ++c)
        h[r * level + c] += tw * dr * (phi[j * level + c] - mom[c]);
    }
  }
  return h;
}

MatchOutcome match(const MacroState& m, const WeightedEnsemble& prior,
                   const RestrictionSet& R, const SolverOptions& opts) {
  if (m.level() != R.level())
    throw std::invalid_argument("macro state level does not match restriction");
  const auto phi = evaluation_table(R, prior);
  DualSolution sol = solve_dual(prior.weights(), phi, R.level(), m.m, opts);
  WeightedEnsemble matched =
      sol.status == MatchStatus::Converged
          ? prior.reweighted(std::move(sol.tilted))
          : prior;  // diagnostics only on failure
  return {{std::move(sol.lambda), sol.log_partition},
          std::move(matched),
          sol.entropy,
          sol.iterations,
          sol.residual,
          sol.status};
}

double pythagorean_residual(const WeightedEnsemble& nu,
                            const WeightedEnsemble& prior,
                            const MatchOutcome& outcome) {
  const double d_nu_prior = discrete_relative_entropy(nu, prior);
  const double d_nu_matched = discrete_relative_entropy(nu, outcome.matched);
  const double d_matched_prior =
      discrete_relative_entropy(outcome.matched, prior);
  return d_nu_prior - d_nu_matched - d_matched_prior;
}

double transitivity_check(const MacroState& m_ext,
                          const WeightedEnsemble& prior,
                          const RestrictionSet& R_ext,
                          const SolverOptions& opts) {
  const int L = R_ext.level() - 1;
  if (L < 1) throw std::invalid_argument("extended set needs level >= 2");

  // route (a): match the prior directly with all L+1 constraints
  const MatchOutcome direct = match(m_ext, prior, R_ext, opts);
  // route (b): through the L-level projection
  const MatchOutcome stage1 =
      match(m_ext.prefix(L), prior, R_ext.prefix(L), opts);
  if (direct.status != MatchStatus::Converged ||
      stage1.status != MatchStatus::Converged)
    throw std::runtime_error("transitivity check requires feasible moments");
  const MatchOutcome stage2 = match(m_ext, stage1.matched, R_ext, opts);
  if (stage2.status != MatchStatus::Converged)
    throw std::runtime_error("transitivity check requires feasible moments");

  double diff = 0.0;
  for (std::size_t j = 0; j < prior.size(); ++j)
    diff = std::max(diff, std::abs(direct.matched.weights()[j] -
                                   stage2.matched.weights()[j]));
  return diff;
}

double entropy_gain(const WeightedEnsemble& prior, const RestrictionSet& R,
                    const RestrictionSet& R_ext, const MacroState& m_ext,
                    const SolverOptions& opts) {
  if (R_ext.level() != R.level() + 1 || m_ext.level() != R_ext.level())
    throw std::invalid_argument("extension must add exactly one moment");
  const MatchOutcome base = match(m_ext.prefix(R.level()), prior, R, opts);
  const MatchOutcome ext = match(m_ext, prior, R_ext, opts);
  if (base.status != MatchStatus::Converged ||
      ext.status != MatchStatus::Converged)
    throw std::runtime_error("entropy gain requires feasible moments");

  double gain = base.multipliers.log_partition - ext.multipliers.log_partition;
  for (int l = 0; l < R_ext.level(); ++l)
    gain += ext.multipliers.lambda[l] * m_ext.m[l];
  for (int l = 0; l < R.level(); ++l)
    gain -= base.multipliers.lambda[l] * m_ext.m[l];
  return gain;
}

int greedy_select(const WeightedEnsemble& prior, const RestrictionSet& R,
                  const std::vector<RestrictionSet::Entry>& candidates,
                  const std::vector<double>& targets,
                  const SolverOptions& opts) {
  if (candidates.empty() || candidates.size() != targets.size())
    throw std::invalid_argument("candidate pool and targets must align");
  const MacroState base_m = restrict_ensemble(R, prior);

  int best = -1;
  double best_gain = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    MacroState m_ext = base_m;
    m_ext.m.push_back(targets[c]);
    double gain;
    try {
      gain = entropy_gain(prior, R, R.extended(candidates[c]), m_ext, opts);
    } catch (const std::runtime_error&) {
      continue;  // infeasible extension
    }
    if (best < 0 || gain > best_gain) {
      best = static_cast<int>(c);
      best_gain = gain;
    }
  }
  if (best < 0) throw AllInfeasible("every candidate extension is infeasible");
  return best;
}

}  // namespace mima
