#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Precondition violations (bad parameters, malformed input).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested grid cannot hold the band of modes without wrap-around.
struct AliasError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State became non-finite during time stepping.
struct BlowupError : std::runtime_error {
  double t;
  explicit BlowupError(double t_)
      : std::runtime_error("solution became non-finite at t = " + std::to_string(t_)), t(t_) {}
};

// A conserved quantity drifted past the configured tolerance.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Small denominator in an explicit correction formula.
struct NearResonanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nlslab
