#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mima/extrapolation.hpp"
#include "mima/matching.hpp"
#include "mima/micro.hpp"
#include "mima/restriction.hpp"

namespace mima {

struct AccelConfig {
  double horizon;        // T
  double dt_macro;       // Delta t
  double window;         // Delta tau = K * dt_micro
  int micro_steps;       // K
  int particles;         // J
  std::string family = "trig";
  int level = 2;
  std::uint64_t seed = 0;
  SolverOptions solver;
  bool adaptive = true;
  // keep the burst endpoint ensembles in each step record; the sweep uses
  // them to bootstrap the extrapolated moments
  bool record_bursts = false;

  // N(dt) = min{N : N dt >= T}; the mesh may overshoot T by < dt.
  int macro_step_count() const;
};

struct MacroStepRecord {
  int index;
  double t_start;
  double dt_used;
  int halvings;
  std::vector<MacroState> burst;  // m_{n,0..K}
  MacroState extrapolated;        // m_{n+1}
  double multiplier_norm;
  double entropy;  // D(mu_{n+1} || last micro state)
  int iterations;
  double residual;
  std::optional<WeightedEnsemble> burst_start;  // only with record_bursts
  std::optional<WeightedEnsemble> burst_end;
};

struct TrajectoryRecord {
  std::vector<MacroStepRecord> steps;
  std::optional<WeightedEnsemble> terminal;
  double max_entropy = 0.0;  // stability proxy sup_n of per-step entropy
};

// Algorithm loop: per macro step (i) K Euler-Maruyama steps over the window,
// (ii) restriction of all K+1 states, (iii) coarse forward Euler of the
// endpoint states to t + dt, (iv) entropy matching of the burst end with the
// extrapolated state. The matched ensemble seeds the next step. Micro stream
// indices advance globally, so the variate layout is independent of dt.
TrajectoryRecord run_accelerated(const AccelConfig& cfg, const SdeModel& model,
                                 const WeightedEnsemble& initial);

// Plain Euler-Maruyama baseline to the horizon; weights untouched.
WeightedEnsemble run_reference(const SdeModel& model,
                               const WeightedEnsemble& initial, double horizon,
                               double dt_fine, const NormalStream& rng);

// As run_reference, also recording restriction moments whenever the running
// time crosses a requested mesh time.
std::vector<MacroState> reference_mesh_moments(const SdeModel& model,
                                               const WeightedEnsemble& initial,
                                               const RestrictionSet& R,
                                               const std::vector<double>& mesh,
                                               double dt_fine,
                                               const NormalStream& rng);

// As reference_mesh_moments but keeping the full ensemble at each mesh time.
std::vector<WeightedEnsemble> reference_mesh_states(
    const SdeModel& model, const WeightedEnsemble& initial,
    const std::vector<double>& mesh, double dt_fine, const NormalStream& rng);

double weak_error(const WeightedEnsemble& a, const WeightedEnsemble& b,
                  const std::function<double(double)>& f);

// Default initial condition for runs and sweeps: on the torus the density
// 1 + 0.4 cos(2 pi x) sampled by inverting its CDF, on the line a standard
// normal cloud.
WeightedEnsemble default_initial_ensemble(const SdeModel& model, int particles,
                                          const NormalStream& rng);

enum class SweepAxis { MacroStep, Level, Particles };

struct SweepRow {
  double axis_value;
  bool failed = false;
  std::string note;
  std::vector<double> errors;  // sup-over-mesh weak error per observable
  std::vector<double> noise;   // combined bootstrap standard error
  double mean_multiplier_norm = 0.0;
  double max_entropy = 0.0;
};

struct SweepTable {
  SweepAxis axis;
  std::vector<std::string> observables;
  std::vector<SweepRow> rows;
};

// One accelerated + reference pair per axis value, on independent
// substreams. Observables are the restriction functions plus one
// out-of-family torus bump. Failures mark the row instead of aborting.
SweepTable convergence_sweep(const AccelConfig& base, const SdeModel& model,
                             SweepAxis axis, const std::vector<double>& values);

// Weighted bootstrap standard error of E[f] over particle resampling.
double bootstrap_standard_error(const WeightedEnsemble& ens,
                                const std::function<double(double)>& f,
                                int resamples = 50, std::uint64_t seed = 7);

// Same resampling scheme on precomputed per-particle values.
double bootstrap_standard_error_values(const std::vector<double>& values,
                                       const std::vector<double>& weights,
                                       int resamples = 50,
                                       std::uint64_t seed = 7);

}  // namespace mima
