#pragma once

#include <stdexcept>
#include <string>

namespace cmlpin {

// Riccati iteration failed to converge, or the gain could not be formed.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Regressors are rank deficient: the data does not excite every direction.
class IdentifiabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plant state blew up during data collection or simulation.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmlpin
