#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "udn/cli/config.hpp"
#include "udn/cli/table.hpp"

namespace udn::cli {

struct McSummary {
  double lambda = 0.0;
  nlohmann::json body;  // coverage estimates, histograms, full-drop statistics
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by λ, then γ, then scheduler as listed
  std::vector<McSummary> mc;

  /// 0 if every row succeeded, 1 if all failed, 2 otherwise.
  int exit_code() const;
};

/// Runs the grid. Row failures are recorded in the error column and never
/// abort the sweep. Per-drop records go to `records` when non-null.
SweepResult run_sweep(const SweepSpec& spec, std::ostream* records = nullptr);

/// Writes rows in spec.format; JSON also carries the run description and any
/// MC summaries.
void write_result(std::ostream& out, const SweepSpec& spec, const SweepResult& result);

nlohmann::json describe(const SweepSpec& spec);

}  // namespace udn::cli
