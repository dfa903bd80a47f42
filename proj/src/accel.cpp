#include "mima/accel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mima/errors.hpp"

namespace mima {

int AccelConfig::macro_step_count() const {
  return static_cast<int>(std::ceil(horizon / dt_macro - 1e-12));
}

TrajectoryRecord run_accelerated(const AccelConfig& cfg, const SdeModel& model,
                                 const WeightedEnsemble& initial) {
  const RestrictionSet R = family_by_name(cfg.family, cfg.level);
  const MicroConfig micro = MicroConfig::from_window(cfg.window,
                                                     cfg.micro_steps);
  const NormalStream rng = NormalStream(cfg.seed).substream(0);
  const ExtrapolationPlan plan{cfg.dt_macro, cfg.window, cfg.adaptive,
                               cfg.window, 30};

  TrajectoryRecord record;
  WeightedEnsemble state = initial;
  double t = 0.0;
  std::uint64_t micro_count = 0;
  int n = 0;
  while (t < cfg.horizon - 1e-12) {
    std::vector<WeightedEnsemble> burst;
    try {
      burst = propagate(state, model, micro, rng, micro_count);
      micro_count += micro.steps;

      std::vector<MacroState> macros;
      macros.reserve(burst.size());
      for (const auto& ens : burst) macros.push_back(restrict_ensemble(R, ens));

      ExtrapolateMatchResult em = extrapolate_and_match(
          macros.front(), macros.back(), burst.back(), R, plan, cfg.solver);

      double norm = 0.0;
      for (double v : em.outcome.multipliers.lambda) norm += v * v;

      MacroStepRecord step{n,
                           t,
                           em.dt_used,
                           em.halvings,
                           std::move(macros),
                           restrict_ensemble(R, em.outcome.matched),
                           std::sqrt(norm),
                           em.outcome.entropy,
                           em.outcome.iterations,
                           em.outcome.residual};
      record.max_entropy = std::max(record.max_entropy, em.outcome.entropy);
      if (cfg.record_bursts) {
        step.burst_start = burst.front();
        step.burst_end = burst.back();
      }
      record.steps.push_back(std::move(step));

      state = em.outcome.matched;
      t += em.dt_used;
      ++n;
    } catch (const StepCollapse& e) {
      throw StepCollapse(e.what(), n);
    }
  }
  record.terminal = std::move(state);
  return record;
}

WeightedEnsemble run_reference(const SdeModel& model,
                               const WeightedEnsemble& initial, double horizon,
                               double dt_fine, const NormalStream& rng) {
  const long steps = std::lround(horizon / dt_fine);
  if (std::abs(steps * dt_fine - horizon) > 1e-9 * std::max(1.0, horizon))
    throw std::invalid_argument("dt_fine must divide the horizon");
  WeightedEnsemble state = initial;
  for (long k = 0; k < steps; ++k)
    state = em_step(state, model, dt_fine, rng, static_cast<std::uint64_t>(k));
  return state;
}

std::vector<MacroState> reference_mesh_moments(const SdeModel& model,
                                               const WeightedEnsemble& initial,
                                               const RestrictionSet& R,
                                               const std::vector<double>& mesh,
                                               double dt_fine,
                                               const NormalStream& rng) {
  std::vector<MacroState> out;
  for (const auto& state :
       reference_mesh_states(model, initial, mesh, dt_fine, rng))
    out.push_back(restrict_ensemble(R, state));
  return out;
}

std::vector<WeightedEnsemble> reference_mesh_states(
    const SdeModel& model, const WeightedEnsemble& initial,
    const std::vector<double>& mesh, double dt_fine, const NormalStream& rng) {
  std::vector<WeightedEnsemble> out;
  WeightedEnsemble state = initial;
  double t = 0.0;
  std::uint64_t k = 0;
  for (double target : mesh) {
    while (t < target - 1e-12) {
      state = em_step(state, model, dt_fine, rng, k++);
      t += dt_fine;
    }
    out.push_back(state);
  }
  return out;
}

double weak_error(const WeightedEnsemble& a, const WeightedEnsemble& b,
                  const std::function<double(double)>& f) {
  return std::abs(expectation(a, f) - expectation(b, f));
}

WeightedEnsemble default_initial_ensemble(const SdeModel& model, int particles,
                                          const NormalStream& rng) {
  std::vector<double> x(particles);
  if (model.space.is_torus()) {
    // density 1 + a cos(2 pi x): a pure first-harmonic disturbance, sampled
    // by inverting F(x) = x + (a/2pi) sin(2 pi x) with Newton
    constexpr double a = 0.4;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int j = 0; j < particles; ++j) {
      const double z = rng.normal(0, static_cast<std::uint64_t>(j));
      const double u = 0.5 * std::erfc(-z / std::numbers::sqrt2);
      double y = u;
      for (int it = 0; it < 50; ++it) {
        const double step = (y + a / two_pi * std::sin(two_pi * y) - u) /
                            (1.0 + a * std::cos(two_pi * y));
        y -= step;
        if (std::abs(step) < 1e-15) break;
      }
      x[j] = y;
    }
  } else {
    for (int j = 0; j < particles; ++j)
      x[j] = 0.5 + 0.1 * rng.normal(0, static_cast<std::uint64_t>(j));
  }
  return {std::move(x), model.space, "initial"};
}

double bootstrap_standard_error(const WeightedEnsemble& ens,
                                const std::function<double(double)>& f,
                                int resamples, std::uint64_t seed) {
  const std::size_t J = ens.size();
  std::vector<double> fx(J);
  for (std::size_t j = 0; j < J; ++j) fx[j] = f(ens.positions()[j]);
  return bootstrap_standard_error_values(fx, ens.weights(), resamples, seed);
}

double bootstrap_standard_error_values(const std::vector<double>& values,
                                       const std::vector<double>& weights,
                                       int resamples, std::uint64_t seed) {
  const std::size_t J = values.size();
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, J - 1);
  std::vector<double> means(resamples);
  for (int b = 0; b < resamples; ++b) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const std::size_t idx = pick(gen);
      num += weights[idx] * values[idx];
      den += weights[idx];
    }
    means[b] = num / den;
  }
  double mean = 0.0;
  for (double v : means) mean += v;
  mean /= resamples;
  double var = 0.0;
  for (double v : means) var += (v - mean) * (v - mean);
  return std::sqrt(var / (resamples - 1));
}

namespace {

// Out-of-family probe observable: Gaussian bump on the torus.
std::function<double(double)> torus_bump() {
  const ConfigurationSpace torus = ConfigurationSpace::torus();
  return [torus](double x) {
    const double d = torus.distance(x, 0.3);
    return std::exp(-d * d / (2.0 * 0.05 * 0.05));
  };
}

AccelConfig row_config(const AccelConfig& base, SweepAxis axis, double value) {
  AccelConfig cfg = base;
  switch (axis) {
    case SweepAxis::MacroStep: {
      cfg.dt_macro = value;
      cfg.window = value / 4.0;
      const double dt_micro = cfg.window * cfg.window;
      cfg.micro_steps =
          std::max(1, static_cast<int>(std::lround(cfg.window / dt_micro)));
      break;
    }
    case SweepAxis::Level:
      cfg.level = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::Particles:
      cfg.particles = static_cast<int>(std::lround(value));
      break;
  }
  return cfg;
}

}  // namespace

SweepTable convergence_sweep(const AccelConfig& base, const SdeModel& model,
                             SweepAxis axis,
                             const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("empty sweep value list");

  SweepTable table;
  table.axis = axis;

  // column layout covers the largest level in the ladder; rows with a
  // smaller restriction leave the extra moment columns as NaN
  int level_max = base.level;
  if (axis == SweepAxis::Level)
    for (double v : values)
      level_max = std::max(level_max, static_cast<int>(std::lround(v)));
  {
    const RestrictionSet R_max = family_by_name(base.family, level_max);
    for (int l = 0; l < R_max.level(); ++l)
      table.observables.push_back(R_max.at(l).name);
    table.observables.push_back("bump");
  }
  const std::size_t n_obs = table.observables.size();

  for (double value : values) {
    SweepRow row;
    row.axis_value = value;
    try {
      const AccelConfig cfg = row_config(base, axis, value);
      const RestrictionSet R = family_by_name(cfg.family, cfg.level);

      std::vector<std::function<double(double)>> obs;
      for (int l = 0; l < R.level(); ++l) {
        auto f = R.at(l).f;
        obs.push_back(std::move(f));
      }
      obs.push_back(torus_bump());

      const NormalStream root(cfg.seed);
      const WeightedEnsemble initial =
          default_initial_ensemble(model, cfg.particles, root.substream(1));

      // accelerated run with per-step mesh moments
      AccelConfig run_cfg = cfg;
      run_cfg.record_bursts = true;
      const TrajectoryRecord traj = run_accelerated(run_cfg, model, initial);

      std::vector<double> mesh;
      {
        double t = 0.0;
        for (const auto& s : traj.steps) {
          t += s.dt_used;
          mesh.push_back(t);
        }
      }
      // reference at the micro-window resolution, independent substream
      const std::vector<WeightedEnsemble> ref_mesh = reference_mesh_states(
          model, initial, mesh, cfg.window, root.substream(2));
      const WeightedEnsemble& ref = ref_mesh.back();

      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.errors.assign(n_obs, nan);
      row.noise.assign(n_obs, nan);
      for (int l = 0; l < R.level(); ++l) {
        row.errors[l] = 0.0;
        std::size_t argmax = 0;
        for (std::size_t n = 0; n < traj.steps.size(); ++n) {
          const double err = std::abs(traj.steps[n].extrapolated.m[l] -
                                      restrict_ensemble(R, ref_mesh[n]).m[l]);
          if (err > row.errors[l]) {
            row.errors[l] = err;
            argmax = n;
          }
        }
        // the matched moment equals m0 + s (m1 - m0) with s = dt/window, so
        // its sampling noise is that of (1-s) phi(start) + s phi(end) per
        // particle; bootstrapping this combination sees the extrapolation
        // amplification a terminal-only bootstrap would miss
        const MacroStepRecord& s_rec = traj.steps[argmax];
        const double s = s_rec.dt_used / cfg.window;
        const auto& start = *s_rec.burst_start;
        const auto& end = *s_rec.burst_end;
        std::vector<double> combined(start.size());
        for (std::size_t j = 0; j < start.size(); ++j)
          combined[j] = (1.0 - s) * R.eval(l, start.positions()[j]) +
                        s * R.eval(l, end.positions()[j]);
        const double na =
            bootstrap_standard_error_values(combined, start.weights());
        const double nb = bootstrap_standard_error(ref_mesh[argmax], R.at(l).f);
        row.noise[l] = std::sqrt(na * na + nb * nb);
      }
      row.errors.back() = weak_error(*traj.terminal, ref, obs.back());
      {
        const double na = bootstrap_standard_error(*traj.terminal, obs.back());
        const double nb = bootstrap_standard_error(ref, obs.back());
        row.noise[n_obs - 1] = std::sqrt(na * na + nb * nb);
      }

      double mean_norm = 0.0;
      for (const auto& s : traj.steps) {
        mean_norm += s.multiplier_norm;
        row.max_entropy = std::max(row.max_entropy, s.entropy);
      }
      row.mean_multiplier_norm = mean_norm / traj.steps.size();
    } catch (const std::exception& e) {
      row.failed = true;
      row.note = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace mima
