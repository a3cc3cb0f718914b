#pragma once

// The acceptance checks, runnable at reduced scale from the CLI and at full
// scale from the acceptance binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "femto/model.hpp"

namespace femto {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  /// Multiplies every Monte Carlo trial count (1 = full scale).
  double scale = 1.0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// Criteria to run; empty runs all of 1..11.
  std::vector<int> only;
  /// Judge the simulated comparisons of a criterion jointly: Bonferroni
  /// bands for criterion 1, and for 5 and 6 an overlap of the crossing's
  /// 95% interval with the bounds instead of the point estimate. For
  /// reduced-scale runs, whose verdict should not depend on the seed.
  bool familywise = false;
};

inline constexpr int kCriterionCount = 11;

/// Runs one criterion. Exceptions from the engines are caught and reported
/// as a failure with their message.
CriterionResult run_criterion(int id, const ValidationOptions& opt);

std::vector<CriterionResult> run_acceptance(const ValidationOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// Analytic macro and femto outage of `cfg` against a simulation of
/// `trials` trials, both access modes; passes when every analytic value is
/// within three binomial standard errors plus its quadrature error.
CriterionResult check_config(const NetworkConfig& cfg, std::size_t trials, std::uint64_t seed, unsigned threads = 0);

std::string format_result(const CriterionResult& r);

}  // namespace femto
