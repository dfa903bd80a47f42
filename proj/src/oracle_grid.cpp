#include "mima/oracle_grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mima/dual_solver.hpp"
#include "mima/errors.hpp"

namespace mima {

namespace {

void renormalize(std::vector<double>& v, double h) {
  double mass = 0.0;
  for (double p : v) mass += p * h;
  if (mass <= 0.0) throw std::invalid_argument("density with nonpositive mass");
  for (double& p : v) p /= mass;
}

double max_diffusion_sq(const SdeModel& model, const GridDensity& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.cells(); ++i) {
    const double b = model.diffusion(p.x(i));
    m = std::max(m, b * b);
  }
  return m;
}

}  // namespace

GridDensity::GridDensity(std::vector<double> values, double length)
    : values_(std::move(values)), length_(length) {
  if (values_.size() < 4) throw std::invalid_argument("grid too coarse");
  if (length_ <= 0.0) throw std::invalid_argument("length must be positive");
  for (double v : values_)
    if (v < 0.0) throw std::invalid_argument("negative density value");
  renormalize(values_, h());
}

GridDensity GridDensity::from_function(const std::function<double(double)>& f,
                                       int cells, double length) {
  std::vector<double> v(cells);
  const double h = length / cells;
  for (int i = 0; i < cells; ++i) v[i] = std::max(f((i + 0.5) * h), 0.0);
  return {std::move(v), length};
}

std::vector<double> apply_adjoint_generator(const GridDensity& p,
                                            const SdeModel& model) {
  const std::size_t M = p.cells();
  const double h = p.h();
  // flux terms a p and (1/2) b^2 p on the grid
  std::vector<double> ap(M), dp(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double x = p.x(i);
    const double b = model.diffusion(x);
    ap[i] = model.drift(x) * p.values()[i];
    dp[i] = 0.5 * b * b * p.values()[i];
  }
  std::vector<double> out(M);
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t im = (i + M - 1) % M;
    const std::size_t ip = (i + 1) % M;
    const double adv = (ap[ip] - ap[im]) / (2.0 * h);
    const double dif = (dp[ip] - 2.0 * dp[i] + dp[im]) / (h * h);
    out[i] = -adv + dif;
  }
  return out;
}

GridDensity fp_step(const GridDensity& p, const SdeModel& model, double dt) {
  const double h = p.h();
  const double bmax2 = max_diffusion_sq(model, p);
  if (bmax2 > 0.0 && dt > h * h / (2.0 * bmax2))
    throw CflViolated("explicit step violates dt <= h^2 / (2 max b^2)");

  const auto gen = apply_adjoint_generator(p, model);
  std::vector<double> v = p.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += dt * gen[i];

  double mass = 0.0;
  for (double pv : v) mass += pv * h;
  if (std::abs(mass - 1.0) >= 1e-12)
    throw std::runtime_error("mass drift exceeds 1e-12 in fp_step");
  return {std::move(v), p.length()};
}

GridDensity fp_evolve(const GridDensity& p, const SdeModel& model, double time,
                      double cfl_safety) {
  if (time <= 0.0) return p;
  const double h = p.h();
  const double bmax2 = max_diffusion_sq(model, p);
  const double dt_max =
      bmax2 > 0.0 ? cfl_safety * h * h / (2.0 * bmax2) : time;
  const int steps = std::max(1, static_cast<int>(std::ceil(time / dt_max)));
  const double dt = time / steps;
  GridDensity q = p;
  for (int s = 0; s < steps; ++s) q = fp_step(q, model, dt);
  return q;
}

double grid_entropy(const GridDensity& p, const GridDensity& q) {
  if (p.cells() != q.cells() || p.length() != q.length())
    throw std::invalid_argument("grids do not match");
  const double h = p.h();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.cells(); ++i) {
    const double pv = p.values()[i];
    if (pv == 0.0) continue;
    const double qv = q.values()[i];
    if (qv == 0.0)
      throw AbsoluteContinuityViolated("p positive where q vanishes");
    acc += pv * std::log(pv / qv) * h;
  }
  return acc;
}

double grid_total_variation(const GridDensity& p, const GridDensity& q) {
  if (p.cells() != q.cells() || p.length() != q.length())
    throw std::invalid_argument("grids do not match");
  const double h = p.h();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.cells(); ++i)
    acc += std::abs(p.values()[i] - q.values()[i]) * h;
  return acc;
}

GridMatchOutcome grid_match(const MacroState& m, const GridDensity& prior,
                            const RestrictionSet& R,
                            const SolverOptions& opts) {
  const std::size_t M = prior.cells();
  const int L = R.level();
  const double h = prior.h();
  std::vector<double> weights(M), phi(M * L);
  for (std::size_t i = 0; i < M; ++i) {
    weights[i] = prior.values()[i] * h;
    for (int l = 0; l < L; ++l) phi[i * L + l] = R.eval(l, prior.x(i));
  }
  DualSolution sol = solve_dual(weights, phi, L, m.m, opts);

  std::vector<double> matched(M);
  if (sol.status == MatchStatus::Converged) {
    for (std::size_t i = 0; i < M; ++i) matched[i] = sol.tilted[i] / h;
  } else {
    matched = prior.values();
  }
  return {GridDensity{std::move(matched), prior.length()},
          {std::move(sol.lambda), sol.log_partition},
          sol.entropy,
          sol.iterations,
          sol.residual,
          sol.status};
}

double fisher_information(const GridDensity& p, const SdeModel& model) {
  const auto gen = apply_adjoint_generator(p, model);
  const double h = p.h();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.cells(); ++i) {
    const double pv = p.values()[i];
    if (pv <= 0.0) continue;
    const double r = gen[i] / pv;
    acc += r * r * pv * h;
  }
  return acc;
}

double matched_expansion_coefficient(const GridDensity& p,
                                     const SdeModel& model,
                                     const RestrictionSet& R) {
  const int L = R.level();
  const double h = p.h();
  const auto gen = apply_adjoint_generator(p, model);

  Eigen::VectorXd g = Eigen::VectorXd::Zero(L);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(L);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(L, L);
  for (std::size_t i = 0; i < p.cells(); ++i) {
    Eigen::VectorXd f(L);
    for (int l = 0; l < L; ++l) f[l] = R.eval(l, p.x(i));
    g.noalias() += h * gen[i] * f;
    mean.noalias() += h * p.values()[i] * f;
    second.noalias() += h * p.values()[i] * f * f.transpose();
  }
  Eigen::MatrixXd var = second - mean * mean.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(var);
  if (llt.info() != Eigen::Success)
    throw SingularVariance("moment covariance is numerically singular");
  return g.dot(llt.solve(g));
}

double log_log_slope(const std::vector<double>& x,
                     const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs matching lists of >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LocalErrorProbe local_error_probe(const GridDensity& p, const SdeModel& model,
                                  const RestrictionSet& R,
                                  const std::vector<double>& dt_list) {
  LocalErrorProbe probe;
  std::vector<double> dts, ents;
  for (double dt : dt_list) {
    const GridDensity evolved = fp_evolve(p, model, dt);
    const MacroState m = restrict_grid(R, evolved);
    const GridMatchOutcome mo = grid_match(m, p, R);
    if (mo.status != MatchStatus::Converged)
      throw std::runtime_error("local error probe: matching did not converge");
    const double d = grid_entropy(evolved, mo.matched);
    const double tv = grid_total_variation(evolved, mo.matched);
    probe.rows.push_back({dt, d, tv, d / (dt * dt)});
    dts.push_back(dt);
    ents.push_back(d);
  }
  // weighted log-log fit: the relative truncation error of the quadratic
  // model grows linearly in dt, so down-weight large dt by 1/dt^2
  {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < dts.size(); ++i) {
      const double w = 1.0 / (dts[i] * dts[i]);
      const double lx = std::log(dts[i]);
      const double ly = std::log(ents[i]);
      sw += w;
      sx += w * lx;
      sy += w * ly;
      sxx += w * lx * lx;
      sxy += w * lx * ly;
    }
    probe.slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
  }

  // Richardson extrapolation of D/dt^2 from the two smallest dt values
  // removes the linear-in-dt remainder and exposes the limit coefficient
  {
    std::vector<const LocalErrorRow*> sorted;
    for (const auto& row : probe.rows) sorted.push_back(&row);
    std::sort(sorted.begin(), sorted.end(),
              [](const LocalErrorRow* a, const LocalErrorRow* b) {
                return a->dt < b->dt;
              });
    const double r1 = sorted[0]->entropy_rate;
    const double r2 = sorted[1]->entropy_rate;
    const double ratio = sorted[1]->dt / sorted[0]->dt;
    probe.limit_coefficient = r1 + (r1 - r2) / (ratio - 1.0);
  }
  return probe;
}

}  // namespace mima
