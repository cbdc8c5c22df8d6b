#pragma once

#include <stdexcept>
#include <string>

namespace safenav {

/// Perception pushed or queried out of order with the sample clock.
struct SequencingError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Barrier construction failed (bad scan data, offset root-find failure).
struct SynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A runtime assumption the safety filter relies on was violated.
struct AssumptionViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Initial state outside the certified set, or an invalid query pose.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed scenario or world description.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace safenav
