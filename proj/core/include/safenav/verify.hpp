#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace safenav {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // worst case / counterexample summary
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Soft-min/max bounds, stable-form agreement, monotonicity in the
/// sharpness, smoothstep endpoint and derivative laws.
SuiteReport verify_softmath(std::uint64_t seed);

/// Derivative propagation: blended jets, barrier jets, the composed barrier
/// in time and space, and the chain gradient, all against central finite
/// differences; weight laws and the chained Lie-derivative identities.
SuiteReport verify_jets(std::uint64_t seed);

/// Closed-form filter against the numerical oracle, constraint tightness,
/// sampled global optimality, multiplier sign, slack limits, continuity.
SuiteReport verify_controller(std::uint64_t seed);

/// Full closed-loop runs of the builtin scenarios: barrier positivity,
/// clearance, goal arrival, epoch-boundary smoothness, weight laws, and the
/// composition-variant agreement.
SuiteReport verify_invariance(std::uint64_t seed);

std::vector<SuiteReport> verify_all(std::uint64_t seed);

}  // namespace safenav
