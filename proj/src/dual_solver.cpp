#include "mima/dual_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mima {

namespace {

// A(lambda) together with the tilted weights, one pass, max-shift stabilized.
double log_partition_and_tilt(const std::vector<double>& w,
                              const std::vector<double>& phi, int L,
                              const std::vector<double>& lambda,
                              std::vector<double>* tilted) {
  const std::size_t J = w.size();
  std::vector<double> score(J, -std::numeric_limits<double>::infinity());
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < J; ++j) {
    if (w[j] == 0.0) continue;
    double s = std::log(w[j]);
    for (int l = 0; l < L; ++l) s += lambda[l] * phi[j * L + l];
    score[j] = s;
    shift = std::max(shift, s);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < J; ++j)
    if (w[j] != 0.0) sum += std::exp(score[j] - shift);
  const double a = shift + std::log(sum);
  if (tilted) {
    tilted->assign(J, 0.0);
    for (std::size_t j = 0; j < J; ++j)
      if (w[j] != 0.0) (*tilted)[j] = std::exp(score[j] - a);
  }
  return a;
}

}  // namespace

DualSolution solve_dual(const std::vector<double>& weights,
                        const std::vector<double>& phi, int L,
                        const std::vector<double>& m,
                        const SolverOptions& opts) {
  const std::size_t J = weights.size();
  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;

  const Vec target = Eigen::Map<const Vec>(m.data(), L);

  std::vector<double> lambda(L, 0.0);
  std::vector<double> tilted;
  double a = log_partition_and_tilt(weights, phi, L, lambda, &tilted);

  auto dual_value = [&](const std::vector<double>& lam) {
    double v = log_partition_and_tilt(weights, phi, L, lam, nullptr);
    for (int l = 0; l < L; ++l) v -= lam[l] * m[l];
    return v;
  };

  auto moments_of = [&](const std::vector<double>& tw) {
    Vec g = Vec::Zero(L);
    for (std::size_t j = 0; j < J; ++j) {
      if (tw[j] == 0.0) continue;
      for (int l = 0; l < L; ++l) g[l] += tw[j] * phi[j * L + l];
    }
    return g;
  };

  double g_val = dual_value(lambda);
  DualSolution out;
  out.status = MatchStatus::MaxIterations;
  out.iterations = 0;

  for (int it = 0; it < opts.max_iter; ++it) {
    const Vec mom = moments_of(tilted);
    const Vec grad = mom - target;
    out.residual = grad.cwiseAbs().maxCoeff();
    out.iterations = it;
    if (out.residual <= opts.tol_moment) {
      out.status = MatchStatus::Converged;
      break;
    }

    // Hessian = covariance of phi under the tilted measure.
    Mat hess = Mat::Zero(L, L);
    for (std::size_t j = 0; j < J; ++j) {
      if (tilted[j] == 0.0) continue;
      Vec d(L);
      for (int l = 0; l < L; ++l) d[l] = phi[j * L + l] - mom[l];
      hess.noalias() += tilted[j] * d * d.transpose();
    }
    // Finite ensembles can degenerate even though the measure-level Hessian
    // is positive definite; ridge by trace when nearly singular.
    Eigen::SelfAdjointEigenSolver<Mat> es(hess, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-12)
      hess.diagonal().array() += 1e-12 * hess.trace() / L;

    Vec dir;
    Eigen::LLT<Mat> llt(hess);
    if (llt.info() == Eigen::Success)
      dir = llt.solve(-grad);
    else
      dir = -grad;  // gradient descent fallback
    if (!dir.allFinite()) dir = -grad;

    const double slope = grad.dot(dir);
    // near the optimum the predicted decrease sinks below the rounding noise
    // of the J-term partition sum; the slack keeps full Newton steps
    // acceptable there while the sufficient-decrease test still guards the
    // global phase
    const double slack =
        (1e-12 + std::sqrt(static_cast<double>(J)) *
                     std::numeric_limits<double>::epsilon()) *
        (std::abs(g_val) + 1.0);
    double t = 1.0;
    std::vector<double> trial(L);
    while (true) {
      for (int l = 0; l < L; ++l) trial[l] = lambda[l] + t * dir[l];
      const double v = dual_value(trial);
      if (v <= g_val + opts.armijo_c * t * slope + slack) {
        lambda = trial;
        g_val = v;
        break;
      }
      t *= 0.5;
      if (t < opts.min_step) {
        out.status = MatchStatus::Infeasible;  // line search stalled
        break;
      }
    }
    if (out.status == MatchStatus::Infeasible) break;

    double norm = 0.0;
    for (double v : lambda) norm += v * v;
    if (std::sqrt(norm) > opts.lambda_cap) {
      // multipliers blow up as m approaches the boundary of the moment space
      out.status = MatchStatus::Infeasible;
      break;
    }
    a = log_partition_and_tilt(weights, phi, L, lambda, &tilted);
  }

  if (out.status == MatchStatus::MaxIterations) {
    const Vec grad = moments_of(tilted) - target;
    out.residual = grad.cwiseAbs().maxCoeff();
    out.iterations = opts.max_iter;
  }

  out.lambda = lambda;
  out.log_partition = a;
  out.tilted = std::move(tilted);
  // entropy of the achieved tilted measure: lambda . grad A - A. Using the
  // achieved moments instead of the requested ones keeps the value equal to
  // the discrete relative entropy of the matched weights to roundoff even
  // when the solve stops with a nonzero residual.
  const Vec achieved = moments_of(out.tilted);
  out.entropy = -a;
  for (int l = 0; l < L; ++l) out.entropy += lambda[l] * achieved[l];
  return out;
}

}  // namespace mima
