#pragma once

#include <vector>

#include "mima/matching.hpp"

namespace mima {

// Core damped-Newton solve of the dual first-order system
// grad A(lambda, mu) = m, shared by the ensemble matching and the grid
// oracle. `weights` is any nonnegative discrete base measure summing to one
// (particle weights, or cell masses p_i h), `phi` the row-major J x L
// evaluation table.
struct DualSolution {
  std::vector<double> lambda;
  double log_partition;
  std::vector<double> tilted;  // weights of the matched discrete measure
  double entropy;              // lambda.m - A
  int iterations;
  double residual;
  MatchStatus status;
};

DualSolution solve_dual(const std::vector<double>& weights,
                        const std::vector<double>& phi, int level,
                        const std::vector<double>& m,
                        const SolverOptions& opts);

}  // namespace mima
