#pragma once

#include <stdexcept>
#include <string>

namespace mima {

struct AbsoluteContinuityViolated : std::runtime_error {
  explicit AbsoluteContinuityViolated(const std::string& what)
      : std::runtime_error(what) {}
};

struct UnsupportedSpace : std::runtime_error {
  explicit UnsupportedSpace(const std::string& what)
      : std::runtime_error(what) {}
};

struct CflViolated : std::runtime_error {
  explicit CflViolated(const std::string& what) : std::runtime_error(what) {}
};

struct SingularVariance : std::runtime_error {
  explicit SingularVariance(const std::string& what)
      : std::runtime_error(what) {}
};

// Extrapolation step halved below its floor: the target moments stay outside
// the sample moment space even near the micro window.
struct StepCollapse : std::runtime_error {
  StepCollapse(const std::string& what, int step_index_)
      : std::runtime_error(what), step_index(step_index_) {}
  int step_index = -1;
};

struct AllInfeasible : std::runtime_error {
  explicit AllInfeasible(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mima
