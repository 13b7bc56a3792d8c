#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace udn::cli {

/// One (λ, γ, scheduler) result. Absent values are empty cells in CSV and
/// nulls in JSON.
struct SweepRow {
  double lambda = 0.0;
  double gamma_db = 0.0;
  std::string scheduler;
  std::optional<double> lambda_tilde;
  std::optional<double> kmax;
  std::optional<double> pcov_exact;
  std::optional<double> pcov_ub;
  std::optional<double> pcov_mc;
  std::optional<double> mc_ci_lo;
  std::optional<double> mc_ci_hi;
  std::optional<double> ase;
  std::optional<double> pf_rr_ratio;     // analytic, set on both rows of the pair
  std::optional<double> pf_rr_ratio_mc;
  std::string method_used;
  std::optional<double> quad_error;
  std::optional<double> wall_time;       // seconds for this row's coverage values
  std::optional<double> ase_time;        // seconds for the (λ, scheduler) ASE
  std::string error;
};

const std::vector<std::string>& sweep_columns();

/// Twelve significant digits, the precision the CSV round-trips at.
std::string format_number(double v);

/// The value as it reads back from its formatted form.
double round_trip(double v);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& in);

nlohmann::json to_json(const SweepRow& row);
SweepRow row_from_json(const nlohmann::json& j);

}  // namespace udn::cli
