#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mima/ensemble.hpp"
#include "mima/space.hpp"

namespace mima {

class GridDensity;  // oracle_grid.hpp

enum class RestrictionFamily { Trigonometric, ScaledPower, Custom };

// Macroscopic state: the vector of tracked moments.
struct MacroState {
  std::vector<double> m;

  int level() const { return static_cast<int>(m.size()); }
  MacroState prefix(int level) const {
    return {std::vector<double>(m.begin(), m.begin() + level)};
  }
};

// Ordered hierarchy of bounded state functions phi_1..phi_L. Any prefix is
// itself a valid set with the same leading functions. Linear independence of
// {1, phi_1, .., phi_L} is validated numerically at construction.
class RestrictionSet {
 public:
  struct Entry {
    std::function<double(double)> f;
    std::string name;
  };

  RestrictionSet(std::vector<Entry> functions, RestrictionFamily family,
                 ConfigurationSpace space);

  int level() const { return static_cast<int>(functions_.size()); }
  RestrictionFamily family() const { return family_; }
  const ConfigurationSpace& space() const { return space_; }
  const Entry& at(int l) const { return functions_[l]; }

  double eval(int l, double x) const { return functions_[l].f(x); }

  RestrictionSet prefix(int level) const;

  // Extend with one more function (used by the greedy moment selection).
  RestrictionSet extended(Entry extra) const;

 private:
  std::vector<Entry> functions_;
  RestrictionFamily family_;
  ConfigurationSpace space_;
};

// First L/2 Fourier pairs {sin(2 pi k x)/k, cos(2 pi k x)/k}, ordered
// sin_1, cos_1, sin_2, ... The 1/k scaling keeps the squared sup-norms
// summable along the hierarchy. 1-D torus only.
RestrictionSet trig_family(int level);

// phi_l(x) = x^l / l on the torus identified with (0,1]. Torus only; these
// functions are unbounded on the real line.
RestrictionSet scaled_power_family(int level);

RestrictionSet family_by_name(const std::string& name, int level);

// m_l = sum_j w_j phi_l(x_j).
MacroState restrict_ensemble(const RestrictionSet& R,
                             const WeightedEnsemble& ens);

// Composite midpoint quadrature sum_i p_i phi_l(x_i) h.
MacroState restrict_grid(const RestrictionSet& R, const GridDensity& p);

}  // namespace mima
