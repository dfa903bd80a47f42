// Acceptance gate: one pass/fail line per criterion, exit 0 only when all
// criteria hold. The CLI binary path is expected as argv[1] for the
// determinism check.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mima/accel.hpp"
#include "mima/config.hpp"
#include "mima/errors.hpp"
#include "mima/oracle_grid.hpp"

namespace fs = std::filesystem;
using namespace mima;
using clock_type = std::chrono::steady_clock;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

int g_failures = 0;

void report(int idx, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("criterion %2d %-28s %s (%s)\n", idx, name.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

WeightedEnsemble random_torus_prior(int J, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(J);
  for (double& v : x) v = unif(gen);
  return {std::move(x), ConfigurationSpace::torus()};
}

// Exponential tilt of the prior along the given restriction set: the
// resulting moments are feasible interior targets by construction.
WeightedEnsemble tilted(const WeightedEnsemble& prior, const RestrictionSet& R,
                        const std::vector<double>& lambda) {
  std::vector<double> w = prior.weights();
  for (std::size_t j = 0; j < prior.size(); ++j) {
    double s = 0.0;
    for (int l = 0; l < R.level(); ++l)
      s += lambda[l] * R.eval(l, prior.positions()[j]);
    w[j] *= std::exp(s);
  }
  return prior.reweighted(w);
}

std::vector<double> random_lambda(int L, double amp, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unif(-amp, amp);
  std::vector<double> out(L);
  for (double& v : out) v = unif(gen);
  return out;
}

// ---------------------------------------------------------------- 1 and 2

void criteria_matching() {
  std::mt19937_64 gen(1);
  const int levels[] = {2, 4, 6};
  double max_residual = 0.0, max_identity = 0.0;
  int max_iter = 0, converged = 0;
  const auto t0 = clock_type::now();
  for (int c = 0; c < 100; ++c) {
    const auto prior = random_torus_prior(1000, gen);
    const RestrictionSet R = trig_family(levels[c % 3]);
    const auto m =
        restrict_ensemble(R, tilted(prior, R, random_lambda(R.level(), 1.5, gen)));
    const auto out = match(m, prior, R);
    if (out.status == MatchStatus::Converged) ++converged;
    max_residual = std::max(max_residual, out.residual);
    max_iter = std::max(max_iter, out.iterations);
    max_identity = std::max(
        max_identity,
        std::abs(out.entropy - discrete_relative_entropy(out.matched, prior)));
  }
  const double elapsed = seconds_since(t0);
  {
    std::ostringstream d;
    d << converged << "/100 converged, residual<=" << max_residual
      << ", iters<=" << max_iter << ", " << elapsed << " s";
    report(1, "matching exactness:",
           converged == 100 && max_residual <= 1e-10 && max_iter <= 30 &&
               elapsed < 5.0,
           d.str());
  }
  {
    std::ostringstream d;
    d << "max |entropy - D(matched||prior)| = " << max_identity;
    report(2, "dual entropy identity:", max_identity <= 1e-10, d.str());
  }
}

// --------------------------------------------------------------------- 3

void criterion_pythagorean() {
  std::mt19937_64 gen(2);
  double worst = 0.0;
  bool ok = true;
  for (int c = 0; c < 50; ++c) {
    const auto prior = random_torus_prior(1000, gen);
    const RestrictionSet R = trig_family(c % 2 == 0 ? 2 : 4);
    // nu carries higher-mode content but meets the level-L constraints
    const auto nu = tilted(prior, trig_family(6), random_lambda(6, 1.0, gen));
    const auto out = match(restrict_ensemble(R, nu), prior, R);
    ok = ok && out.status == MatchStatus::Converged;
    worst = std::max(worst, std::abs(pythagorean_residual(nu, prior, out)));
  }
  std::ostringstream d;
  d << "max residual = " << worst << " over 50 triples";
  report(3, "pythagorean identity:", ok && worst <= 1e-8, d.str());
}

// --------------------------------------------------------------------- 4

void criterion_transitivity() {
  std::mt19937_64 gen(3);
  double worst_route = 0.0, worst_gain = 0.0;
  bool ok = true;
  for (int c = 0; c < 50; ++c) {
    const auto prior = random_torus_prior(1000, gen);
    const RestrictionSet R = trig_family(2);
    const RestrictionSet R_ext = R.extended(
        {[](double x) { return std::sin(2.0 * two_pi * x) / 2.0; }, "sin2"});
    const auto m_ext = restrict_ensemble(
        R_ext, tilted(prior, R_ext, random_lambda(3, 1.2, gen)));
    worst_route = std::max(worst_route,
                           std::abs(transitivity_check(m_ext, prior, R_ext)));
    const auto fine = match(m_ext, prior, R_ext);
    const auto coarse = match(m_ext.prefix(2), prior, R);
    ok = ok && fine.status == MatchStatus::Converged &&
         coarse.status == MatchStatus::Converged;
    const double gain = entropy_gain(prior, R, R_ext, m_ext);
    const double direct =
        discrete_relative_entropy(fine.matched, coarse.matched);
    worst_gain = std::max(worst_gain, std::abs(gain - direct));
  }
  std::ostringstream d;
  d << "max route diff = " << worst_route << ", max gain diff = " << worst_gain;
  report(4, "transitivity and gain:",
         ok && worst_route <= 1e-8 && worst_gain <= 1e-8, d.str());
}

// --------------------------------------------------------------------- 5

void criterion_widening_gaussian() {
  const auto t0 = clock_type::now();
  const int M = 1024;
  const double sigma = 1.0, circumference = 40.0;
  const WideningGaussianRef ref{sigma};
  const double center = 0.5 * circumference;
  const auto density_at = [&](double t) {
    return GridDensity::from_function(
        [&](double x) { return widening_gaussian_density(t, x - center, ref); },
        M, circumference);
  };
  const GridDensity p0 = density_at(0.0);
  double max_rel = 0.0, prev_ratio = 0.0, limit = 0.0;
  for (double dt : {0.01, 0.005, 0.0025}) {
    const double closed = widening_gaussian_entropy(sigma, dt);
    const double grid = grid_entropy(density_at(dt), p0);
    max_rel = std::max(max_rel, std::abs(grid - closed) / closed);
    const double ratio = grid / (dt * dt);
    limit = prev_ratio == 0.0 ? ratio : 2.0 * ratio - prev_ratio;
    prev_ratio = ratio;
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << "max rel err = " << max_rel << ", D/dt^2 -> " << limit << ", "
    << elapsed << " s";
  report(5, "widening gaussian:",
         max_rel <= 1e-6 && std::abs(limit - 1.0) <= 0.02 && elapsed < 10.0,
         d.str());
}

// --------------------------------------------------------------------- 6

void criterion_fisher() {
  const int M = 1024;
  const double circumference = 40.0, center = 20.0;
  const auto p = GridDensity::from_function(
      [center](double x) {
        return std::exp(-0.5 * (x - center) * (x - center));
      },
      M, circumference);
  const double fisher = fisher_information(p, models::pure_diffusion_torus());
  std::ostringstream d;
  d << "I = " << fisher << " vs 2";
  report(6, "fisher information:", std::abs(fisher - 2.0) <= 0.02, d.str());
}

// --------------------------------------------------------------------- 7

void criterion_entropy_expansion() {
  const auto model = models::nonlinear_torus();
  GridDensity p = GridDensity::from_function(
      [](double x) { return 1.0 + 0.5 * std::cos(two_pi * x); }, 256);
  p = fp_evolve(p, model, 0.1);
  const RestrictionSet R = trig_family(2);
  std::vector<double> dts;
  for (double dt = std::pow(10.0, -1.5); dt > 0.95e-3; dt /= 2.0)
    dts.push_back(dt);
  const auto probe = local_error_probe(p, model, R, dts);
  const double fisher = fisher_information(p, model);
  const double captured = matched_expansion_coefficient(p, model, R);
  const double target = 0.5 * (fisher - captured);
  const double rel = std::abs(probe.limit_coefficient - target) / target;
  std::ostringstream d;
  d << "slope = " << probe.slope << ", coef = " << probe.limit_coefficient
    << " vs " << target << " (rel " << rel << ")";
  report(7, "entropy expansion order:",
         std::abs(probe.slope - 2.0) <= 0.1 && rel <= 0.05 &&
             probe.limit_coefficient >= 0.0 &&
             probe.limit_coefficient <= 0.5 * fisher + 1e-12,
         d.str());
}

// --------------------------------------------------------------------- 8

void criterion_weak_order() {
  const auto t0 = clock_type::now();
  const double theta = 3.0, sigma = 0.5, x0 = 2.0, horizon = 0.5;
  const auto model = models::ornstein_uhlenbeck(theta, sigma);
  const int J = 1000000;
  const WeightedEnsemble initial(std::vector<double>(J, x0),
                                 ConfigurationSpace::real_line());
  const auto exact =
      ou_reference_moments(theta, sigma, x0, 0.0, horizon);
  const std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> err_mean, err_var;
  for (double dt : dts) {
    const auto end = run_reference(model, initial, horizon, dt,
                                   NormalStream(42).substream(3));
    const double mean = expectation(end, [](double x) { return x; });
    const double var = expectation(
        end, [mean](double x) { return (x - mean) * (x - mean); });
    err_mean.push_back(std::abs(mean - exact.mean));
    err_var.push_back(std::abs(var - exact.variance));
  }
  const double s_mean = log_log_slope(dts, err_mean);
  const double s_var = log_log_slope(dts, err_var);
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << "mean slope = " << s_mean << ", var slope = " << s_var << ", "
    << elapsed << " s";
  report(8, "euler weak order:",
         std::abs(s_mean - 1.0) <= 0.2 && std::abs(s_var - 1.0) <= 0.2 &&
             elapsed < 60.0,
         d.str());
}

// --------------------------------------------------------------------- 9

bool trend_ok(const SweepTable& table, double& worst_margin) {
  for (const auto& row : table.rows)
    if (row.failed) return false;
  const std::size_t n_obs = table.observables.size();
  for (std::size_t o = 0; o + 1 < n_obs; ++o) {  // restriction columns only
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      const auto& a = table.rows[i];
      const auto& b = table.rows[i + 1];
      if (std::isnan(a.errors[o]) || std::isnan(b.errors[o])) continue;
      const double allowance =
          2.0 * std::sqrt(a.noise[o] * a.noise[o] + b.noise[o] * b.noise[o]);
      const double margin = b.errors[o] - a.errors[o] - allowance;
      worst_margin = std::max(worst_margin, margin);
      if (margin > 0.0) return false;
    }
  }
  return true;
}

void criterion_convergence_trends() {
  const auto model = models::pure_diffusion_torus();
  AccelConfig base;
  base.horizon = 0.05;
  base.dt_macro = 0.05;
  base.window = 0.0125;
  base.micro_steps = 80;  // dt_micro = window^2
  base.particles = 100000;
  base.level = 4;
  base.seed = 42;

  double worst = -1.0;
  const auto dt_table = convergence_sweep(base, model, SweepAxis::MacroStep,
                                          {0.2, 0.1, 0.05, 0.025});
  const bool dt_ok = trend_ok(dt_table, worst);
  const auto level_table =
      convergence_sweep(base, model, SweepAxis::Level, {2, 4, 6, 8});
  const bool level_ok = trend_ok(level_table, worst);

  // projective degeneration at dt = window
  AccelConfig degen = base;
  degen.horizon = 0.2;
  degen.dt_macro = 0.05;
  degen.window = 0.05;
  degen.micro_steps = 20;
  const auto initial = default_initial_ensemble(
      model, degen.particles, NormalStream(degen.seed).substream(1));
  const auto traj = run_accelerated(degen, model, initial);
  const auto plain = run_reference(model, initial, degen.horizon, 0.0025,
                                   NormalStream(degen.seed).substream(0));
  const RestrictionSet R = trig_family(4);
  const auto ma = restrict_ensemble(R, *traj.terminal);
  const auto mb = restrict_ensemble(R, plain);
  double degen_diff = 0.0;
  for (int l = 0; l < 4; ++l)
    degen_diff = std::max(degen_diff, std::abs(ma.m[l] - mb.m[l]));

  std::ostringstream d;
  d << "worst trend margin = " << worst
    << ", degeneration diff = " << degen_diff;
  report(9, "convergence trends:", dt_ok && level_ok && degen_diff <= 1e-8,
         d.str());
}

// -------------------------------------------------------------------- 10

void criterion_stability() {
  const auto model = models::nonlinear_torus();
  const int J = 20000, L = 4, M = 1 << 14;

  // stationary density of the model, quantile-sampled on a deterministic
  // uniform probability grid
  std::vector<double> cdf(M + 1, 0.0);
  const auto p_inf = [](double x) {
    return std::pow(1.0 + 0.5 * std::cos(two_pi * x),
                    -(1.0 + 2.0 / std::numbers::pi));
  };
  for (int i = 0; i < M; ++i) cdf[i + 1] = cdf[i] + p_inf((i + 0.5) / M) / M;
  for (int i = 0; i <= M; ++i) cdf[i] /= cdf[M];
  std::vector<double> x0(J);
  {
    int i = 0;
    for (int j = 0; j < J; ++j) {
      const double u = (j + 0.5) / J;
      while (cdf[i + 1] < u) ++i;
      x0[j] = (i + (u - cdf[i]) / (cdf[i + 1] - cdf[i])) / M;
    }
  }
  const WeightedEnsemble base(std::move(x0), model.space, "stationary");
  const RestrictionSet R = trig_family(L);

  // perturbation direction: a sign wave, projected exactly off the tracked
  // moments so the inputs share their macroscopic state
  Eigen::MatrixXd B(J, L + 1);
  Eigen::VectorXd gv(J), wv(J);
  for (int j = 0; j < J; ++j) {
    const double x = base.positions()[j];
    gv[j] = std::cos(3.0 * two_pi * x) >= 0.0 ? 1.0 : -1.0;
    wv[j] = base.weights()[j];
    B(j, 0) = 1.0;
    for (int l = 0; l < L; ++l) B(j, l + 1) = R.eval(l, x);
  }
  const Eigen::MatrixXd WB = wv.asDiagonal() * B;
  const Eigen::VectorXd coef =
      (B.transpose() * WB).ldlt().solve(WB.transpose() * gv);
  gv -= B * coef;
  double mean_abs = 0.0;
  for (int j = 0; j < J; ++j) mean_abs += wv[j] * std::abs(gv[j]);

  double c_min = 1e300, c_max = -1e300;
  bool all_finite = true;
  for (double dt : {0.1, 0.05, 0.025}) {
    AccelConfig cfg;
    cfg.horizon = dt;
    cfg.dt_macro = dt;
    cfg.window = 0.005;
    cfg.micro_steps = 50;
    cfg.particles = J;
    cfg.level = L;
    cfg.seed = 42;
    const auto out_base = run_accelerated(cfg, model, base);
    for (double eps : {0.2, 0.1, 0.05}) {
      const double eta = eps / mean_abs;
      std::vector<double> w = base.weights();
      for (int j = 0; j < J; ++j) w[j] *= std::max(1.0 + eta * gv[j], 0.0);
      const auto pert = base.reweighted(w);
      const double tv0 = total_variation(pert, base);
      const auto out_pert = run_accelerated(cfg, model, pert);
      const double tv1 =
          total_variation(*out_pert.terminal, *out_base.terminal);
      const double c = (tv1 / tv0 - 1.0) / dt;
      all_finite = all_finite && std::isfinite(c);
      c_min = std::min(c_min, c);
      c_max = std::max(c_max, c);
    }
  }
  std::ostringstream d;
  d << "fitted C in [" << c_min << ", " << c_max << "], spread "
    << (c_max / c_min - 1.0) * 100.0 << "%";
  report(10, "stability probe:",
         all_finite && c_min > 0.0 && c_max / c_min < 1.5, d.str());
}

// -------------------------------------------------------------------- 11

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism(const std::string& cli) {
  const fs::path work = fs::temp_directory_path() / "mima_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  bool ok = true;
  std::string detail;
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path dir = work / ("rep" + std::to_string(rep));
    const fs::path cfg = work / ("run" + std::to_string(rep) + ".cfg");
    std::ofstream os(cfg);
    os << "model.label = nonlinear-torus\n"
       << "macro.horizon = 0.1\n"
       << "macro.dt = 0.05\n"
       << "micro.window = 0.0125\n"
       << "micro.k = 5\n"
       << "ensemble.j = 2000\n"
       << "ensemble.seed = 42\n"
       << "restriction.level = 4\n"
       << "output.dir = " << dir.string() << "\n";
    os.close();
    const std::string cmd =
        "\"" + cli + "\" run \"" + cfg.string() + "\" > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      ok = false;
      detail = "cli run exited nonzero";
    }
  }
  if (ok) {
    for (const char* name : {"trajectory.csv", "terminal_ensemble.csv"}) {
      const std::string a = read_bytes(work / "rep0" / name);
      const std::string b = read_bytes(work / "rep1" / name);
      if (a.empty() || a != b) {
        ok = false;
        detail = std::string(name) + " differs between repeats";
      }
    }
  }
  if (ok) detail = "both CSV outputs byte-identical across repeats";
  fs::remove_all(work);
  report(11, "determinism:", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  unsetenv("MIMA_OUT_DIR");
  criteria_matching();
  criterion_pythagorean();
  criterion_transitivity();
  criterion_widening_gaussian();
  criterion_fisher();
  criterion_entropy_expansion();
  criterion_weak_order();
  criterion_convergence_trends();
  criterion_stability();
  if (argc > 1) {
    criterion_determinism(argv[1]);
  } else {
    report(11, "determinism:", false, "cli path missing from argv[1]");
  }
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
