#pragma once

#include <vector>

#include "mima/ensemble.hpp"
#include "mima/restriction.hpp"

namespace mima {

enum class MatchStatus { Converged, Infeasible, MaxIterations };

struct Multipliers {
  std::vector<double> lambda;
  double log_partition;  // A(lambda, prior), zero at lambda = 0
};

struct SolverOptions {
  double tol_moment = 1e-10;
  int max_iter = 100;
  double lambda_cap = 50.0;  // infeasibility sentinel on ||lambda||
  double armijo_c = 1e-4;
  double min_step = 1e-12;
};

struct MatchOutcome {
  Multipliers multipliers;
  WeightedEnsemble matched;
  double entropy;  // D(matched || prior) = lambda.m - A
  int iterations;
  double residual;  // ||grad A - m||_inf
  MatchStatus status;
};

// phi_l evaluated on the prior particles, row-major J x L.
std::vector<double> evaluation_table(const RestrictionSet& R,
                                     const WeightedEnsemble& prior);

// A(lambda, mu) = ln sum_j w_j exp(lambda . Phi_j), log-sum-exp stabilized.
double log_partition(const std::vector<double>& lambda,
                     const std::vector<double>& weights,
                     const std::vector<double>& phi, int level);

// grad_lambda A = E_{P(lambda,mu)}[phi], the moments of the tilted measure.
std::vector<double> dual_gradient(const std::vector<double>& lambda,
                                  const std::vector<double>& weights,
                                  const std::vector<double>& phi, int level);

// Hess_lambda A = Var_{P(lambda,mu)}(phi), symmetric positive semidefinite,
// row-major L x L.
std::vector<double> dual_hessian(const std::vector<double>& lambda,
                                 const std::vector<double>& weights,
                                 const std::vector<double>& phi, int level);

// Minimum-relative-entropy matching: damped Newton with Armijo backtracking
// on the convex dual g(lambda) = A(lambda, prior) - lambda.m. On success the
// matched weights are w_j exp(lambda . Phi_j - A), restriction of the result
// equals m within tol_moment, and the entropy equals lambda.m - A.
MatchOutcome match(const MacroState& m, const WeightedEnsemble& prior,
                   const RestrictionSet& R, const SolverOptions& opts = {});

// D(nu||mu) - D(nu||mu*) - D(mu*||mu) for nu meeting the moment constraints;
// vanishes by the Pythagorean identity of the entropy projection.
double pythagorean_residual(const WeightedEnsemble& nu,
                            const WeightedEnsemble& prior,
                            const MatchOutcome& outcome);

// Max-norm difference between matching in one shot with L+1 constraints and
// matching in two stages through the L-level projection. Zero in exact
// arithmetic by transitivity of the entropy projection.
double transitivity_check(const MacroState& m_ext,
                          const WeightedEnsemble& prior,
                          const RestrictionSet& R_ext,
                          const SolverOptions& opts = {});

// Entropy decrease D(mu*_{L+1} || mu*_L) gained by tracking one more moment:
// sum_{l<=L+1} tl_l m_l - sum_{l<=L} l_l m_l + A(l) - A(tl).
double entropy_gain(const WeightedEnsemble& prior, const RestrictionSet& R,
                    const RestrictionSet& R_ext, const MacroState& m_ext,
                    const SolverOptions& opts = {});

// Index of the candidate whose added moment yields the largest entropy gain;
// ties broken by lowest index. Throws AllInfeasible when no extension is
// feasible.
int greedy_select(const WeightedEnsemble& prior, const RestrictionSet& R,
                  const std::vector<RestrictionSet::Entry>& candidates,
                  const std::vector<double>& targets,
                  const SolverOptions& opts = {});

}  // namespace mima
