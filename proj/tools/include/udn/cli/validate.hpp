#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "udn/coverage.hpp"

namespace udn::cli {

struct CriterionResult {
  int id = 0;  // 1..8; 0 for the mutation self-test
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidateOptions {
  // Fewer Monte Carlo drops. Results are indicative only.
  bool quick = false;
  unsigned workers = 0;
  std::uint64_t seed = 1;
  // Passed to every analytic evaluation; the self-test breaks it on purpose.
  CoverageOptions coverage{};
  // Called as each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

struct ValidationReport {
  std::vector<CriterionResult> results;
  bool all_pass() const;
};

CriterionResult check_ase_reproduction(const ValidateOptions& opts);     // 1
CriterionResult check_sparse_pf_gain(const ValidateOptions& opts);       // 2
CriterionResult check_upper_bound_gap(const ValidateOptions& opts);      // 3
CriterionResult check_pf_rr_convergence(const ValidateOptions& opts);    // 4
CriterionResult check_truncation_example(const ValidateOptions& opts);   // 5
CriterionResult check_mc_matches_exact(const ValidateOptions& opts);     // 6
CriterionResult check_property_suite(const ValidateOptions& opts);       // 7
CriterionResult check_rician_gap(const ValidateOptions& opts);           // 8

/// Runs the property suite with a sign error injected into the noise term and
/// passes only if the suite fails.
CriterionResult mutation_self_test(const ValidateOptions& opts);

/// Runs the listed criteria (all of 1..8 and the self-test when empty).
ValidationReport run_validation(const ValidateOptions& opts, const std::vector<int>& which = {});

/// "PASS [n] name: detail (t s)"
std::string format_line(const CriterionResult& r);

}  // namespace udn::cli
