#pragma once

#include <stdexcept>
#include <string>

namespace viral {

// Input outside the model's parameter domain. The CLI maps this to exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not resolve its answer at the configured
// resolution. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was called before the process reached the state it needs.
class SequencingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Design queries at a virality weight where no equilibrium strategy is known.
class EquilibriumUnresolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace viral
