#pragma once

#include <stdexcept>
#include <string>

namespace mbep {

// Bad user input: malformed model, wrong dimensions, invalid tolerances.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not deliver its contract.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The eigenbasis is too ill-conditioned to be used as a basis.
class EpProximityError : public NumericError {
 public:
  EpProximityError(const std::string& what, double condition)
      : NumericError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace mbep
