#include "mima/restriction.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "mima/errors.hpp"
#include "mima/oracle_grid.hpp"

namespace mima {

namespace {

// Min eigenvalue of the Gram matrix of {1, phi_1..phi_L} on a dense grid;
// positive when the system is linearly independent.
void check_independence(const std::vector<RestrictionSet::Entry>& fs,
                        const ConfigurationSpace& space) {
  const int L = static_cast<int>(fs.size());
  const int n = 2048;
  // RealLine families are probed on a wide interval instead of [0,1)
  const double lo = space.is_torus() ? 0.0 : -8.0;
  const double hi = space.is_torus() ? 1.0 : 8.0;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(L + 1, L + 1);
  const double h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (i + 0.5) * h;
    Eigen::VectorXd v(L + 1);
    v[0] = 1.0;
    for (int l = 0; l < L; ++l) v[l + 1] = fs[l].f(x);
    gram.noalias() += h * v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram,
                                                    Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-10)
    throw std::invalid_argument(
        "restriction functions are not linearly independent of constants");
}

}  // namespace

RestrictionSet::RestrictionSet(std::vector<Entry> functions,
                               RestrictionFamily family,
                               ConfigurationSpace space)
    : functions_(std::move(functions)), family_(family), space_(space) {
  if (functions_.empty())
    throw std::invalid_argument("restriction set needs at least one function");
  check_independence(functions_, space_);
}

RestrictionSet RestrictionSet::prefix(int level) const {
  if (level < 1 || level > this->level())
    throw std::invalid_argument("invalid prefix level");
  return {std::vector<Entry>(functions_.begin(), functions_.begin() + level),
          family_, space_};
}

RestrictionSet RestrictionSet::extended(Entry extra) const {
  auto fs = functions_;
  fs.push_back(std::move(extra));
  return {std::move(fs), RestrictionFamily::Custom, space_};
}

RestrictionSet trig_family(int level) {
  if (level < 2 || level % 2 != 0)
    throw std::invalid_argument("trig family needs an even level >= 2");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<RestrictionSet::Entry> fs;
  for (int k = 1; k <= level / 2; ++k) {
    const double kk = k;
    fs.push_back({[kk](double x) { return std::sin(two_pi * kk * x) / kk; },
                  "sin" + std::to_string(k)});
    fs.push_back({[kk](double x) { return std::cos(two_pi * kk * x) / kk; },
                  "cos" + std::to_string(k)});
  }
  return {std::move(fs), RestrictionFamily::Trigonometric,
          ConfigurationSpace::torus()};
}

RestrictionSet scaled_power_family(int level) {
  if (level < 1) throw std::invalid_argument("power family needs level >= 1");
  std::vector<RestrictionSet::Entry> fs;
  for (int l = 1; l <= level; ++l) {
    const double ll = l;
    fs.push_back({[ll](double x) {
                    // torus identified with (0,1]
                    if (x == 0.0) x = 1.0;
                    return std::pow(x, ll) / ll;
                  },
                  "pow" + std::to_string(l)});
  }
  return {std::move(fs), RestrictionFamily::ScaledPower,
          ConfigurationSpace::torus()};
}

RestrictionSet family_by_name(const std::string& name, int level) {
  if (name == "trig") return trig_family(level);
  if (name == "scaled-power") return scaled_power_family(level);
  throw std::invalid_argument("unknown restriction family: " + name);
}

MacroState restrict_ensemble(const RestrictionSet& R,
                             const WeightedEnsemble& ens) {
  if (R.space().is_torus() != ens.space().is_torus())
    throw UnsupportedSpace("restriction family and ensemble space disagree");
  const int L = R.level();
  std::vector<double> m(L, 0.0);
  const auto& x = ens.positions();
  const auto& w = ens.weights();
  for (std::size_t j = 0; j < x.size(); ++j)
    for (int l = 0; l < L; ++l) m[l] += w[j] * R.eval(l, x[j]);
  return {std::move(m)};
}

MacroState restrict_grid(const RestrictionSet& R, const GridDensity& p) {
  const int L = R.level();
  std::vector<double> m(L, 0.0);
  const double h = p.h();
  for (std::size_t i = 0; i < p.cells(); ++i) {
    const double pv = p.values()[i] * h;
    for (int l = 0; l < L; ++l) m[l] += pv * R.eval(l, p.x(i));
  }
  return {std::move(m)};
}

}  // namespace mima
