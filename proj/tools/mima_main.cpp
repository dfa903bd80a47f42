#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "mima/accel.hpp"
#include "mima/config.hpp"
#include "mima/errors.hpp"
#include "mima/oracle_grid.hpp"

namespace fs = std::filesystem;
using namespace mima;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string output_dir(const Config& cfg) {
  if (const char* env = std::getenv("MIMA_OUT_DIR")) return env;
  return cfg.get_string("output.dir", ".");
}

AccelConfig accel_config(const Config& cfg) {
  AccelConfig out;
  out.horizon = cfg.get_double("macro.horizon");
  out.dt_macro = cfg.get_double("macro.dt");
  out.window = cfg.get_double("micro.window");
  out.micro_steps = static_cast<int>(cfg.get_int("micro.k"));
  out.particles = static_cast<int>(cfg.get_int("ensemble.j"));
  out.seed = static_cast<std::uint64_t>(cfg.get_int("ensemble.seed", 0));
  out.family = cfg.get_string("restriction.family", "trig");
  out.level = static_cast<int>(cfg.get_int("restriction.level", 2));
  out.solver.tol_moment = cfg.get_double("solver.tol", 1e-10);
  out.solver.lambda_cap = cfg.get_double("solver.lambda-cap", 50.0);
  out.adaptive = cfg.get_bool("adaptive.enabled", true);
  return out;
}

void write_trajectory_csv(const std::string& path,
                          const TrajectoryRecord& traj) {
  std::ofstream out(path);
  out << "step,t_start,dt_used,halvings,lambda_norm,entropy,iterations,"
         "residual";
  if (!traj.steps.empty())
    for (int l = 0; l < traj.steps.front().extrapolated.level(); ++l)
      out << ",m_" << (l + 1);
  out << "\n";
  for (const auto& s : traj.steps) {
    out << s.index << ',' << format_full(s.t_start) << ','
        << format_full(s.dt_used) << ',' << s.halvings << ','
        << format_full(s.multiplier_norm) << ',' << format_full(s.entropy)
        << ',' << s.iterations << ',' << format_full(s.residual);
    for (double m : s.extrapolated.m) out << ',' << format_full(m);
    out << "\n";
  }
}

std::string config_echo(const Config& cfg) {
  std::ostringstream ss;
  for (const auto& [k, v] : cfg.values()) ss << k << " = " << v << "\n";
  return ss.str();
}

int cmd_run(const std::string& config_path) {
  const Config cfg = Config::from_file(config_path);
  const AccelConfig acfg = accel_config(cfg);
  const SdeModel model = models::by_label(cfg.get_string("model.label"));
  const fs::path dir = output_dir(cfg);
  fs::create_directories(dir);

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.seed = acfg.seed;
  manifest.config_echo = config_echo(cfg);
  manifest.started = timestamp_utc();

  const WeightedEnsemble initial = default_initial_ensemble(
      model, acfg.particles, NormalStream(acfg.seed).substream(1));

  int status = kExitOk;
  try {
    const TrajectoryRecord traj = run_accelerated(acfg, model, initial);
    write_trajectory_csv((dir / "trajectory.csv").string(), traj);
    manifest.outputs.push_back((dir / "trajectory.csv").string());
    std::ofstream term(dir / "terminal_ensemble.csv");
    traj.terminal->write_csv(term);
    manifest.outputs.push_back((dir / "terminal_ensemble.csv").string());
  } catch (const StepCollapse& e) {
    manifest.failures.push_back(std::string("step collapse at macro step ") +
                                std::to_string(e.step_index) + ": " + e.what());
    status = kExitRuntime;
  }
  manifest.finished = timestamp_utc();
  manifest.write((dir / "manifest.txt").string());
  if (status == kExitOk)
    std::cout << "run complete: " << (dir / "trajectory.csv").string() << "\n";
  else
    std::cerr << "run failed, partial outputs in " << dir.string() << "\n";
  return status;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::vector<double>& values) {
  if (values.empty()) {
    std::cerr << "error: empty sweep value list\n";
    return kExitConfig;
  }
  SweepAxis axis;
  if (axis_name == "macro-step")
    axis = SweepAxis::MacroStep;
  else if (axis_name == "level")
    axis = SweepAxis::Level;
  else if (axis_name == "particles")
    axis = SweepAxis::Particles;
  else {
    std::cerr << "error: unknown axis " << axis_name << "\n";
    return kExitConfig;
  }

  const Config cfg = Config::from_file(config_path);
  const AccelConfig acfg = accel_config(cfg);
  const SdeModel model = models::by_label(cfg.get_string("model.label"));
  const fs::path dir = output_dir(cfg);
  fs::create_directories(dir);

  const SweepTable table = convergence_sweep(acfg, model, axis, values);

  std::ofstream out(dir / "sweep.csv");
  out << "axis_value,failed";
  for (const auto& o : table.observables)
    out << ",err_" << o << ",noise_" << o;
  out << ",mean_lambda_norm,max_entropy,note\n";
  int ok_rows = 0;
  for (const auto& row : table.rows) {
    out << format_full(row.axis_value) << ',' << (row.failed ? 1 : 0);
    for (std::size_t i = 0; i < table.observables.size(); ++i) {
      if (row.failed)
        out << ",,";
      else
        out << ',' << format_full(row.errors[i]) << ','
            << format_full(row.noise[i]);
    }
    out << ',' << format_full(row.mean_multiplier_norm) << ','
        << format_full(row.max_entropy) << ',' << row.note << "\n";
    if (!row.failed) ++ok_rows;
  }
  std::cout << "sweep complete: " << (dir / "sweep.csv").string() << "\n";
  return ok_rows > 0 ? kExitOk : kExitRuntime;
}

int cmd_oracle(const std::string& config_path, const std::string& probe) {
  const Config cfg = Config::from_file(config_path);
  const fs::path dir = output_dir(cfg);
  fs::create_directories(dir);
  const int M = static_cast<int>(cfg.get_int("oracle.grid-m", 1024));

  if (probe == "widening-gaussian" || probe == "entropy-expansion") {
    const double sigma = cfg.get_double("oracle.sigma", 1.0);
    const double circumference =
        cfg.get_double("oracle.circumference", 40.0 * std::sqrt(sigma));
    const WideningGaussianRef ref{sigma};
    const double center = circumference / 2.0;
    auto density_at = [&](double t) {
      return GridDensity::from_function(
          [&](double x) { return widening_gaussian_density(t, x - center, ref); },
          M, circumference);
    };
    const GridDensity p0 = density_at(0.0);
    const SdeModel heat = models::pure_diffusion_torus();

    std::ofstream out(dir / (probe + ".csv"));
    out << "dt,closed_form,grid_entropy,ratio_dt2,limit\n";
    std::vector<double> dts = {0.01, 0.005, 0.0025};
    double prev_ratio = 0.0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
      const double dt = dts[i];
      const double closed = widening_gaussian_entropy(sigma, dt);
      // widening-gaussian compares exact discretized densities; the
      // entropy-expansion variant evolves p0 with the grid scheme instead
      const GridDensity evolved = probe == "widening-gaussian"
                                      ? density_at(dt)
                                      : fp_evolve(p0, heat, dt);
      const double grid = grid_entropy(evolved, p0);
      const double ratio = grid / (dt * dt);
      // the ratio approaches 1/sigma^2 linearly in dt; Richardson with the
      // previous ladder point removes the linear term
      const double limit = i == 0 ? ratio : 2.0 * ratio - prev_ratio;
      prev_ratio = ratio;
      out << format_full(dt) << ',' << format_full(closed) << ','
          << format_full(grid) << ',' << format_full(ratio) << ','
          << format_full(limit) << "\n";
    }
    std::cout << "oracle probe written: " << (dir / (probe + ".csv")).string()
              << "\n";
    return kExitOk;
  }

  if (probe == "matched-expansion" || probe == "local-error") {
    const SdeModel model =
        models::by_label(cfg.get_string("model.label", "nonlinear-torus"));
    const int grid_m = static_cast<int>(cfg.get_int("oracle.grid-m", 256));
    const double t0 = cfg.get_double("oracle.t", 0.1);
    GridDensity p = GridDensity::from_function(
        [](double x) {
          return 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * x);
        },
        grid_m);
    p = fp_evolve(p, model, t0);

    if (probe == "matched-expansion") {
      std::ofstream out(dir / "matched-expansion.csv");
      out << "level,coefficient,fisher,ratio\n";
      const double fisher = fisher_information(p, model);
      for (int L : {2, 4, 6, 8}) {
        const RestrictionSet R = trig_family(L);
        const double coef = matched_expansion_coefficient(p, model, R);
        out << L << ',' << format_full(coef) << ',' << format_full(fisher)
            << ',' << format_full(coef / fisher) << "\n";
      }
      std::cout << "oracle probe written: "
                << (dir / "matched-expansion.csv").string() << "\n";
      return kExitOk;
    }

    const int level = static_cast<int>(cfg.get_int("restriction.level", 2));
    const RestrictionSet R = trig_family(level);
    std::vector<double> dts;
    for (double dt = std::pow(10.0, -1.5); dt > 0.95e-3; dt /= 2.0)
      dts.push_back(dt);
    const LocalErrorProbe pr = local_error_probe(p, model, R, dts);
    std::ofstream out(dir / "local-error.csv");
    out << "dt,entropy,tv,slope,limit\n";
    for (const auto& row : pr.rows)
      out << format_full(row.dt) << ',' << format_full(row.entropy) << ','
          << format_full(row.tv) << ',' << format_full(pr.slope) << ','
          << format_full(pr.limit_coefficient) << "\n";
    std::cout << "oracle probe written: " << (dir / "local-error.csv").string()
              << "\n";
    return kExitOk;
  }

  std::cerr << "error: unknown probe " << probe << "\n";
  return kExitConfig;
}

int cmd_moment_gain(const std::string& config_path) {
  const Config cfg = Config::from_file(config_path);
  const AccelConfig acfg = accel_config(cfg);
  const SdeModel model = models::by_label(cfg.get_string("model.label"));
  const fs::path dir = output_dir(cfg);
  fs::create_directories(dir);

  // candidate pool: comma-separated sin<k> / cos<k> specs
  std::vector<RestrictionSet::Entry> pool;
  {
    std::istringstream ss(cfg.get_string("gain.candidates"));
    std::string item;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    while (std::getline(ss, item, ',')) {
      const bool is_sin = item.rfind("sin", 0) == 0;
      const bool is_cos = item.rfind("cos", 0) == 0;
      if (!is_sin && !is_cos)
        throw ConfigError("unknown candidate spec: " + item);
      const double k = std::stod(item.substr(3));
      if (is_sin)
        pool.push_back(
            {[k](double x) { return std::sin(two_pi * k * x) / k; }, item});
      else
        pool.push_back(
            {[k](double x) { return std::cos(two_pi * k * x) / k; }, item});
    }
  }
  if (pool.empty()) {
    std::cerr << "error: empty candidate pool\n";
    return kExitConfig;
  }

  const double snapshot_t = cfg.get_double("gain.snapshot-t", acfg.horizon);
  const RestrictionSet R = family_by_name(acfg.family, acfg.level);
  const NormalStream root(acfg.seed);
  const WeightedEnsemble initial =
      default_initial_ensemble(model, acfg.particles, root.substream(1));

  AccelConfig snap = acfg;
  snap.horizon = snapshot_t;
  const TrajectoryRecord traj = run_accelerated(snap, model, initial);
  const WeightedEnsemble& prior = *traj.terminal;

  // candidate targets come from an independent fine reference at the snapshot
  const double dt_fine = acfg.window / acfg.micro_steps;
  const long n_fine = std::lround(snapshot_t / dt_fine);
  const WeightedEnsemble ref = run_reference(
      model, initial, n_fine * dt_fine, dt_fine, root.substream(2));
  std::vector<double> targets;
  for (const auto& c : pool) targets.push_back(expectation(ref, c.f));

  try {
    const int best = greedy_select(prior, R, pool, targets, acfg.solver);
    std::ofstream out(dir / "moment_gain.csv");
    out << "candidate,name,target,gain,selected\n";
    const MacroState base_m = restrict_ensemble(R, prior);
    for (std::size_t c = 0; c < pool.size(); ++c) {
      double gain = std::nan("");
      try {
        MacroState m_ext = base_m;
        m_ext.m.push_back(targets[c]);
        gain = entropy_gain(prior, R, R.extended(pool[c]), m_ext, acfg.solver);
      } catch (const std::exception&) {
      }
      out << c << ',' << pool[c].name << ',' << format_full(targets[c]) << ','
          << format_full(gain) << ',' << (static_cast<int>(c) == best ? 1 : 0)
          << "\n";
    }
    std::cout << "moment gain written: " << (dir / "moment_gain.csv").string()
              << "\n";
    return kExitOk;
  } catch (const AllInfeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"micro-macro acceleration for stiff SDEs"};
  app.require_subcommand(1);

  std::string config_path, axis = "macro-step", probe;
  std::vector<double> values;

  auto* run = app.add_subcommand("run", "single accelerated run");
  run->add_option("config", config_path, "config file")->required();

  auto* sweep = app.add_subcommand("sweep", "convergence sweep");
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("--axis", axis, "macro-step | level | particles");
  sweep->add_option("--values", values, "axis values")->delimiter(',');

  auto* oracle = app.add_subcommand("oracle", "grid verification probes");
  oracle->add_option("config", config_path, "config file")->required();
  oracle
      ->add_option("--probe", probe,
                   "entropy-expansion | matched-expansion | local-error | "
                   "widening-gaussian")
      ->required();

  auto* gain = app.add_subcommand("moment-gain", "greedy moment selection");
  gain->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (sweep->parsed()) return cmd_sweep(config_path, axis, values);
    if (oracle->parsed()) return cmd_oracle(config_path, probe);
    if (gain->parsed()) return cmd_moment_gain(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
