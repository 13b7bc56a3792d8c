#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udn/coverage.hpp"
#include "udn/mcsim.hpp"

namespace udn::cli {

enum class MethodChoice { Auto, Exact, UpperBound };
enum class OutputFormat { Csv, Json };

const char* to_string(MethodChoice m);

/// Densities at or above this use the exact sum under MethodChoice::Auto.
inline constexpr double kAutoExactMinLambda = 100.0;

CoverageMethod resolve_method(MethodChoice choice, double lambda);

struct McSettings {
  long drops = 20000;
  SimMode mode = SimMode::FullDrop;
  FadingKind fading = FadingKind::Rayleigh;
  std::uint64_t seed = 1;
  double radius_km = 0.0;     // 0: automatic
  bool full_stats = false;    // active-BS fraction and UE-count histogram (full drop only)
  std::string records_path;   // per-drop CSV, empty: none
  std::string summary_path;   // aggregate JSON, empty: none
};

struct SweepSpec {
  NetworkConfig network{};
  PathLossModel model = make_3gpp_case();
  bool preset_3gpp = true;
  std::vector<double> lambda_grid{1.0, 10.0, 100.0, 1000.0, 10000.0};
  std::vector<double> gamma_db{0.0};
  double gamma0_db = 0.0;
  std::vector<SchedulerKind> schedulers{SchedulerKind::RoundRobin, SchedulerKind::ProportionalFair};
  MethodChoice method = MethodChoice::Auto;
  bool compute_ase = true;
  std::optional<McSettings> mc;
  unsigned workers = 0;
  std::string out_path;  // empty: stdout
  OutputFormat format = OutputFormat::Csv;

  /// Throws ConfigError on empty grids or out-of-range values.
  void validate() const;
};

/// Parses the YAML text of a run description. Unknown keys are errors.
SweepSpec parse_spec(const std::string& yaml_text);

/// Reads and parses a YAML file.
SweepSpec load_spec(const std::string& path);

/// n points from lo to hi, evenly spaced in log10.
std::vector<double> log_grid(double lo, double hi, int n);

SchedulerKind parse_scheduler(const std::string& s);
MethodChoice parse_method(const std::string& s);
OutputFormat parse_format(const std::string& s);
SimMode parse_sim_mode(const std::string& s);
FadingKind parse_fading(const std::string& s);

}  // namespace udn::cli
