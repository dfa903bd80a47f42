#pragma once

#include <vector>

#include "mima/matching.hpp"
#include "mima/restriction.hpp"
#include "mima/space.hpp"

namespace mima {

// Periodic density on a uniform midpoint grid x_i = (i + 1/2) h, h = len/M.
// The unit torus has len = 1; widening-Gaussian surrogates use a torus wide
// enough that wrap-around mass is negligible and R-line formulas apply.
class GridDensity {
 public:
  GridDensity(std::vector<double> values, double length = 1.0);

  // Discretize a density function (renormalized on the grid).
  static GridDensity from_function(const std::function<double(double)>& f,
                                   int cells, double length = 1.0);

  std::size_t cells() const { return values_.size(); }
  double length() const { return length_; }
  double h() const { return length_ / static_cast<double>(values_.size()); }
  double x(std::size_t i) const { return (i + 0.5) * h(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
  double length_;
};

// One explicit step of the Fokker-Planck equation
// d_t p = -d_x(a p) + (1/2) d_xx(b^2 p), second-order central differences
// with periodic wrap. Requires dt <= h^2 / (2 max b^2); mass drift before
// renormalization must stay below 1e-12.
GridDensity fp_step(const GridDensity& p, const SdeModel& model, double dt);

// Adjoint generator applied once through the same spatial stencil as fp_step.
std::vector<double> apply_adjoint_generator(const GridDensity& p,
                                            const SdeModel& model);

// Evolve by total time using uniform CFL-safe internal steps.
GridDensity fp_evolve(const GridDensity& p, const SdeModel& model,
                      double time, double cfl_safety = 0.8);

// Quadrature relative entropy sum_i p_i ln(p_i/q_i) h.
double grid_entropy(const GridDensity& p, const GridDensity& q);

// L1 quadrature distance sum_i |p_i - q_i| h.
double grid_total_variation(const GridDensity& p, const GridDensity& q);

struct GridMatchOutcome {
  GridDensity matched;
  Multipliers multipliers;
  double entropy;
  int iterations;
  double residual;
  MatchStatus status;
};

// Minimum-relative-entropy matching with quadrature in place of weighted
// sums; the dual solve is the same damped Newton as the ensemble module.
GridMatchOutcome grid_match(const MacroState& m, const GridDensity& prior,
                            const RestrictionSet& R,
                            const SolverOptions& opts = {});

// Time-parametrized Fisher information E_p[ |L*p / p|^2 ].
double fisher_information(const GridDensity& p, const SdeModel& model);

// Quadratic form g^T Var_p(phi)^{-1} g with g = R(L*p): the part of the
// Fisher information captured by the tracked moments. Bounded above by
// fisher_information by Cauchy-Schwarz.
double matched_expansion_coefficient(const GridDensity& p,
                                     const SdeModel& model,
                                     const RestrictionSet& R);

struct LocalErrorRow {
  double dt;
  double entropy;       // D(p(t+dt) || matched)
  double tv;            // TV(p(t+dt), matched)
  double entropy_rate;  // entropy / dt^2
};

struct LocalErrorProbe {
  std::vector<LocalErrorRow> rows;
  double slope;              // log-log slope of entropy vs dt
  double limit_coefficient;  // fitted dt^2 coefficient of the entropy
};

// For each dt: evolve p(t) forward by dt on the grid, match its R-moments
// onto the prior p(t), and record entropy and TV against the evolved
// density. Fits the leading-order behaviour over the dt ladder.
LocalErrorProbe local_error_probe(const GridDensity& p, const SdeModel& model,
                                  const RestrictionSet& R,
                                  const std::vector<double>& dt_list);

// Weighted least-squares slope of ln(y) against ln(x).
double log_log_slope(const std::vector<double>& x,
                     const std::vector<double>& y);

}  // namespace mima
