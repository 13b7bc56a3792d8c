#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "udn/cli/config.hpp"
#include "udn/cli/sweep.hpp"
#include "udn/cli/validate.hpp"
#include "udn/errors.hpp"

namespace {

using namespace udn;
using namespace udn::cli;

struct Flags {
  std::string config;
  std::vector<double> lambda;
  std::vector<double> gamma_db;
  std::optional<double> gamma0_db;
  std::vector<std::string> scheduler;
  std::string method;
  std::optional<long> mc_drops;
  std::string mc_mode;
  std::string fading;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
  std::string format;
  bool no_ase = false;
  bool no_mc = false;
};

SweepSpec build_spec(const Flags& f) {
  SweepSpec spec = f.config.empty() ? SweepSpec{} : load_spec(f.config);
  if (!f.lambda.empty()) spec.lambda_grid = f.lambda;
  if (!f.gamma_db.empty()) spec.gamma_db = f.gamma_db;
  if (f.gamma0_db) spec.gamma0_db = *f.gamma0_db;
  if (!f.scheduler.empty()) {
    spec.schedulers.clear();
    for (const auto& s : f.scheduler) spec.schedulers.push_back(parse_scheduler(s));
  }
  if (!f.method.empty()) spec.method = parse_method(f.method);
  if (f.mc_drops && *f.mc_drops > 0) {
    if (!spec.mc) spec.mc = McSettings{};
    spec.mc->drops = *f.mc_drops;
  }
  if (f.no_mc || (f.mc_drops && *f.mc_drops == 0)) spec.mc.reset();
  if (spec.mc) {
    if (!f.mc_mode.empty()) spec.mc->mode = parse_sim_mode(f.mc_mode);
    if (!f.fading.empty()) spec.mc->fading = parse_fading(f.fading);
    if (f.seed) spec.mc->seed = *f.seed;
  }
  if (f.workers) spec.workers = *f.workers;
  if (!f.out.empty()) spec.out_path = f.out;
  if (!f.format.empty()) spec.format = parse_format(f.format);
  if (f.no_ase) spec.compute_ase = false;
  spec.validate();
  return spec;
}

int run_sweep_command(const Flags& f) {
  const SweepSpec spec = build_spec(f);
  std::unique_ptr<std::ofstream> records;
  if (spec.mc && !spec.mc->records_path.empty()) {
    records = std::make_unique<std::ofstream>(spec.mc->records_path);
    if (!*records) throw udn::ConfigError("cannot write " + spec.mc->records_path);
    *records << "lambda,drop,scheduler,serving_distance_km,branch,k_served,gain,i_agg_w,sinr,served\n";
  }
  const SweepResult result = run_sweep(spec, records.get());
  if (spec.mc && !spec.mc->summary_path.empty()) {
    std::ofstream out(spec.mc->summary_path);
    nlohmann::json j = nlohmann::json::array();
    for (const auto& m : result.mc) j.push_back(m.body);
    out << j.dump(2) << '\n';
  }
  if (spec.out_path.empty()) {
    write_result(std::cout, spec, result);
  } else {
    std::ofstream out(spec.out_path);
    if (!out) throw udn::ConfigError("cannot write " + spec.out_path);
    write_result(out, spec, result);
  }
  for (const auto& r : result.rows)
    if (!r.error.empty())
      std::cerr << "row lambda=" << r.lambda << " gamma_db=" << r.gamma_db << " " << r.scheduler << ": " << r.error
                << '\n';
  return result.exit_code();
}

int run_validate_command(bool quick, const std::vector<int>& which, std::optional<std::uint64_t> seed,
                         std::optional<unsigned> workers) {
  ValidateOptions opts;
  opts.quick = quick;
  if (seed) opts.seed = *seed;
  if (workers) opts.workers = *workers;
  opts.on_result = [](const CriterionResult& r) { std::cout << format_line(r) << std::endl; };
  if (quick) std::cout << "quick mode: reduced Monte Carlo drop counts, results are indicative only\n";
  const auto rep = run_validation(opts, which);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage and area spectral efficiency of dense small-cell networks under PF and RR scheduling"};
  app.require_subcommand(1);

  Flags f;
  auto* sweep = app.add_subcommand("sweep", "Run a density/threshold sweep and print a result table");
  sweep->add_option("--config", f.config, "YAML run description")->check(CLI::ExistingFile);
  sweep->add_option("--lambda", f.lambda, "BS densities per km^2")->delimiter(',');
  sweep->add_option("--gamma-db", f.gamma_db, "SINR thresholds in dB")->delimiter(',');
  sweep->add_option("--gamma0-db", f.gamma0_db, "Minimum working SINR for the ASE, dB");
  sweep->add_option("--scheduler", f.scheduler, "rr, pf or both (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"rr", "pf"}));
  sweep->add_option("--method", f.method, "Analytic method")->check(CLI::IsMember({"exact", "upper", "auto"}));
  sweep->add_option("--mc-drops", f.mc_drops, "Monte Carlo drops per density (0 disables)");
  sweep->add_option("--mc-mode", f.mc_mode, "Simulator")->check(CLI::IsMember({"full_drop", "model_faithful"}));
  sweep->add_option("--fading", f.fading, "Simulated fading")->check(CLI::IsMember({"rayleigh", "rician"}));
  sweep->add_option("--seed", f.seed, "Monte Carlo master seed");
  sweep->add_option("--workers", f.workers, "Worker threads (0: all cores)");
  sweep->add_option("--out", f.out, "Output file (default stdout)");
  sweep->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_flag("--no-ase", f.no_ase, "Skip the area spectral efficiency");
  sweep->add_flag("--no-mc", f.no_mc, "Drop the Monte Carlo section of the config");

  bool quick = false;
  std::vector<int> which;
  std::optional<std::uint64_t> vseed;
  std::optional<unsigned> vworkers;
  auto* validate = app.add_subcommand("validate", "Run the acceptance checks and print PASS/FAIL per criterion");
  validate->add_flag("--quick", quick, "Fewer Monte Carlo drops");
  validate->add_option("--only", which, "Criteria to run (1-8, 0 for the mutation self-test)")->delimiter(',');
  validate->add_option("--seed", vseed, "Master seed");
  validate->add_option("--workers", vworkers, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sweep) return run_sweep_command(f);
    if (*validate) return run_validate_command(quick, which, vseed, vworkers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
