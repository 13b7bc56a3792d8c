#include "udn/cli/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>

#include "udn/ase.hpp"
#include "udn/parallel.hpp"
#include "udn/units.hpp"

namespace udn::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void append_error(std::string& dst, const std::string& msg) {
  if (!dst.empty()) dst += "; ";
  dst += msg;
}

NetworkConfig at_lambda(const SweepSpec& spec, double lambda) {
  NetworkConfig cfg = spec.network;
  cfg.lambda = lambda;
  return cfg;
}

// Fills the analytic columns of one row.
void analytic_row(const CoverageEngine& engine, CoverageMethod method, SchedulerKind s, SweepRow& row) {
  const auto t0 = Clock::now();
  const double gamma = db_to_linear(row.gamma_db);
  row.lambda_tilde = engine.lambda_tilde();
  row.kmax = s == SchedulerKind::RoundRobin ? 1.0 : engine.distribution_for(s, method).kmax();

  const CoverageResult ub = engine.coverage(gamma, s, CoverageMethod::UpperBound);
  row.pcov_ub = ub.value;
  const CoverageResult* primary = &ub;
  CoverageResult exact;
  row.method_used = "upper";
  if (method == CoverageMethod::Exact) {
    exact = engine.coverage(gamma, s, CoverageMethod::Exact);
    if (exact.fell_back) {
      row.method_used = "upper (exact unstable)";
    } else {
      row.pcov_exact = exact.value;
      row.method_used = "exact";
      primary = &exact;
    }
  }
  row.quad_error = primary->quad_error;
  row.wall_time = seconds_since(t0);
}

double primary_value(const SweepRow& r) { return r.pcov_exact ? *r.pcov_exact : r.pcov_ub.value_or(NAN); }

nlohmann::json histogram(const std::vector<double>& xs, double lo, double hi, int bins) {
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  long above = 0;
  for (double x : xs) {
    if (x >= hi) {
      ++above;
      continue;
    }
    const int b = std::clamp(static_cast<int>((x - lo) / (hi - lo) * bins), 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  std::vector<double> edges;
  for (int i = 0; i <= bins; ++i) edges.push_back(lo + (hi - lo) * i / bins);
  return {{"edges", edges}, {"counts", counts}, {"above_range", above}};
}

nlohmann::json count_histogram(const std::vector<int>& ks) {
  std::map<int, long> m;
  for (int k : ks) ++m[k];
  nlohmann::json values = nlohmann::json::array(), counts = nlohmann::json::array();
  for (const auto& [k, c] : m) {
    values.push_back(k);
    counts.push_back(c);
  }
  return {{"values", values}, {"counts", counts}};
}

nlohmann::json full_drop_stats(const SimRun& run, const NetworkConfig& cfg) {
  long bs = 0, active = 0;
  std::map<int, long> per_active;
  long n_active_counts = 0;
  for (const auto& d : run.drops) {
    bs += d.inner_bs;
    active += d.inner_active;
    for (int n : d.inner_ue_counts) {
      if (n <= 0) continue;
      ++per_active[n];
      ++n_active_counts;
    }
  }
  nlohmann::json j;
  j["inner_bs"] = bs;
  j["active_fraction"] = bs > 0 ? static_cast<double>(active) / static_cast<double>(bs) : NAN;
  const Interval ci = wilson_interval(active, std::max(bs, 1L));
  j["active_fraction_ci95"] = {ci.lo, ci.hi};
  j["active_fraction_model"] = active_bs_density(cfg) / cfg.lambda;
  // Sup-norm distance between the empirical UE count of active BSs and the
  // truncated negative binomial. Reported, not asserted.
  if (n_active_counts > 0) {
    const auto dist = active_ue_count_distribution(cfg, std::numeric_limits<int>::max());
    double sup = 0.0;
    const int top = std::max(dist.kmax(), per_active.empty() ? 0 : per_active.rbegin()->first);
    for (int k = 1; k <= top; ++k) {
      const auto it = per_active.find(k);
      const double emp = it == per_active.end() ? 0.0 : static_cast<double>(it->second) / n_active_counts;
      sup = std::max(sup, std::abs(emp - dist.pmf(k)));
    }
    j["ue_count_sup_distance"] = sup;
  }
  return j;
}

void write_records(std::ostream& out, double lambda, const SimRun& run) {
  for (std::size_t i = 0; i < run.drops.size(); ++i) {
    for (const SchedulerKind s : {SchedulerKind::RoundRobin, SchedulerKind::ProportionalFair}) {
      const DropOutcome& o = run.outcome(static_cast<long>(i), s);
      out << format_number(lambda) << ',' << i << ',' << to_string(s) << ',' << format_number(o.serving_distance_km)
          << ',' << to_string(o.serving_branch) << ',' << o.k_served << ',' << format_number(o.gain) << ','
          << format_number(o.i_agg) << ',' << format_number(o.sinr) << ',' << (o.served ? 1 : 0) << '\n';
    }
  }
}

}  // namespace

int SweepResult::exit_code() const {
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
  if (failed == 0) return 0;
  return failed == static_cast<long>(rows.size()) ? 1 : 2;
}

SweepResult run_sweep(const SweepSpec& spec, std::ostream* records) {
  spec.validate();
  SweepResult result;
  const std::size_t n_l = spec.lambda_grid.size(), n_g = spec.gamma_db.size(), n_s = spec.schedulers.size();
  auto index = [&](std::size_t l, std::size_t g, std::size_t s) { return (l * n_g + g) * n_s + s; };

  result.rows.resize(n_l * n_g * n_s);
  std::vector<std::unique_ptr<CoverageEngine>> engines(n_l);
  std::vector<std::string> engine_errors(n_l);
  for (std::size_t l = 0; l < n_l; ++l) {
    for (std::size_t g = 0; g < n_g; ++g) {
      for (std::size_t s = 0; s < n_s; ++s) {
        auto& r = result.rows[index(l, g, s)];
        r.lambda = spec.lambda_grid[l];
        r.gamma_db = spec.gamma_db[g];
        r.scheduler = to_string(spec.schedulers[s]);
      }
    }
    try {
      engines[l] = std::make_unique<CoverageEngine>(at_lambda(spec, spec.lambda_grid[l]), spec.model);
    } catch (const std::exception& e) {
      engine_errors[l] = e.what();
    }
  }

  // Analytic coverage, one task per row.
  parallel_for(result.rows.size(), spec.workers, [&](std::size_t i) {
    const std::size_t l = i / (n_g * n_s), s = i % n_s;
    auto& row = result.rows[i];
    if (!engines[l]) {
      row.error = engine_errors[l];
      return;
    }
    try {
      analytic_row(*engines[l], resolve_method(spec.method, row.lambda), spec.schedulers[s], row);
    } catch (const std::exception& e) {
      append_error(row.error, e.what());
    }
  });

  // ASE per (λ, scheduler); each call parallelizes over its threshold grid.
  if (spec.compute_ase) {
    CoverageCurveCache cache;
    for (std::size_t l = 0; l < n_l; ++l) {
      if (!engines[l]) continue;
      for (std::size_t s = 0; s < n_s; ++s) {
        const auto t0 = Clock::now();
        AseQuery q{at_lambda(spec, spec.lambda_grid[l]), spec.model, spec.schedulers[s],
                   resolve_method(spec.method, spec.lambda_grid[l]), db_to_linear(spec.gamma0_db)};
        AseOptions opts;
        opts.workers = spec.workers;
        try {
          const AseResult a = ase(q, opts, &cache);
          const double t = seconds_since(t0);
          for (std::size_t g = 0; g < n_g; ++g) {
            result.rows[index(l, g, s)].ase = a.value;
            result.rows[index(l, g, s)].ase_time = t;
          }
        } catch (const std::exception& e) {
          for (std::size_t g = 0; g < n_g; ++g) append_error(result.rows[index(l, g, s)].error, e.what());
        }
      }
    }
  }

  // PF/RR ratios on both rows of each pair.
  const auto rr = std::find(spec.schedulers.begin(), spec.schedulers.end(), SchedulerKind::RoundRobin);
  const auto pf = std::find(spec.schedulers.begin(), spec.schedulers.end(), SchedulerKind::ProportionalFair);
  const bool paired = rr != spec.schedulers.end() && pf != spec.schedulers.end();
  const std::size_t s_rr = static_cast<std::size_t>(rr - spec.schedulers.begin());
  const std::size_t s_pf = static_cast<std::size_t>(pf - spec.schedulers.begin());
  if (paired) {
    for (std::size_t l = 0; l < n_l; ++l) {
      for (std::size_t g = 0; g < n_g; ++g) {
        auto& a = result.rows[index(l, g, s_rr)];
        auto& b = result.rows[index(l, g, s_pf)];
        const double ratio = primary_value(b) / primary_value(a);
        if (std::isfinite(ratio)) a.pf_rr_ratio = b.pf_rr_ratio = ratio;
      }
    }
  }

  // Monte Carlo: one paired run per λ scored against every threshold.
  if (spec.mc) {
    for (std::size_t l = 0; l < n_l; ++l) {
      SimConfig sc;
      sc.base = at_lambda(spec, spec.lambda_grid[l]);
      sc.model = spec.model;
      sc.fading = spec.mc->fading;
      sc.mode = spec.mc->mode;
      sc.sim_radius_km = spec.mc->radius_km;
      sc.n_drops = spec.mc->drops;
      sc.master_seed = spec.mc->seed;
      sc.workers = spec.workers;
      sc.collect_full_stats = spec.mc->full_stats && spec.mc->mode == SimMode::FullDrop;
      try {
        const SimRun run = simulate(sc);
        if (records) write_records(*records, sc.base.lambda, run);
        McSummary summary{sc.base.lambda, {}};
        summary.body["lambda"] = sc.base.lambda;
        summary.body["mode"] = to_string(sc.mode);
        summary.body["fading"] = to_string(sc.fading);
        summary.body["drops"] = sc.n_drops;
        summary.body["radius_km"] = run.radius_km;
        summary.body["boundary_hits"] = run.boundary_hits;
        for (const SchedulerKind s : {SchedulerKind::RoundRobin, SchedulerKind::ProportionalFair}) {
          nlohmann::json js;
          std::vector<double> dist;
          std::vector<int> ks;
          for (long i = 0; i < sc.n_drops; ++i) {
            const auto& o = run.outcome(i, s);
            if (!o.served) continue;
            dist.push_back(o.serving_distance_km);
            ks.push_back(o.k_served);
          }
          js["serving_distance_km"] = histogram(dist, 0.0, run.radius_km / 5.0, 50);
          js["k_served"] = count_histogram(ks);
          js["coverage"] = nlohmann::json::array();
          for (double gdb : spec.gamma_db) {
            const CoverageEstimate e = estimate_from_run(run, s, db_to_linear(gdb));
            js["coverage"].push_back({{"gamma_db", gdb}, {"p_hat", e.p_hat}, {"ci95", {e.ci95.lo, e.ci95.hi}}, {"n", e.n}});
          }
          summary.body[to_string(s)] = js;
        }
        if (sc.collect_full_stats) summary.body["full_drop"] = full_drop_stats(run, sc.base);
        result.mc.push_back(std::move(summary));

        for (std::size_t g = 0; g < n_g; ++g) {
          const double gamma = db_to_linear(spec.gamma_db[g]);
          for (std::size_t s = 0; s < n_s; ++s) {
            const CoverageEstimate e = estimate_from_run(run, spec.schedulers[s], gamma);
            auto& row = result.rows[index(l, g, s)];
            row.pcov_mc = e.p_hat;
            row.mc_ci_lo = e.ci95.lo;
            row.mc_ci_hi = e.ci95.hi;
          }
          if (paired) {
            auto& a = result.rows[index(l, g, s_rr)];
            auto& b = result.rows[index(l, g, s_pf)];
            if (*a.pcov_mc > 0.0) a.pf_rr_ratio_mc = b.pf_rr_ratio_mc = *b.pcov_mc / *a.pcov_mc;
          }
        }
      } catch (const std::exception& e) {
        for (std::size_t g = 0; g < n_g; ++g)
          for (std::size_t s = 0; s < n_s; ++s) append_error(result.rows[index(l, g, s)].error, e.what());
      }
    }
  }
  return result;
}

nlohmann::json describe(const SweepSpec& spec) {
  nlohmann::json j;
  j["3gpp_case"] = spec.preset_3gpp;
  j["network"] = {{"rho", spec.network.rho},
                  {"q", spec.network.q},
                  {"tx_power_dbm", watts_to_dbm(spec.network.tx_power)},
                  {"noise_power_dbm", watts_to_dbm(spec.network.noise_power)},
                  {"epsilon", spec.network.epsilon},
                  {"kmax_cap", spec.network.kmax_cap}};
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : spec.model.pieces()) {
    pieces.push_back({{"d_lo_m", km_to_meters(p.d_lo)},
                      {"d_hi_m", std::isfinite(p.d_hi) ? nlohmann::json(km_to_meters(p.d_hi)) : nlohmann::json(nullptr)},
                      {"los", {{"gain_at_1km_db", linear_to_db(p.a_los)}, {"alpha", p.alpha_los}}},
                      {"nlos", {{"gain_at_1km_db", linear_to_db(p.a_nlos)}, {"alpha", p.alpha_nlos}}}});
  }
  j["pathloss"] = pieces;
  std::vector<std::string> sched;
  for (auto s : spec.schedulers) sched.emplace_back(to_string(s));
  j["sweep"] = {{"lambda", spec.lambda_grid}, {"gamma_db", spec.gamma_db}, {"gamma0_db", spec.gamma0_db},
                {"schedulers", sched},         {"method", to_string(spec.method)}, {"ase", spec.compute_ase}};
  if (spec.mc) {
    j["mc"] = {{"drops", spec.mc->drops},        {"mode", to_string(spec.mc->mode)},
               {"fading", to_string(spec.mc->fading)}, {"seed", spec.mc->seed},
               {"radius_km", spec.mc->radius_km}};
  } else {
    j["mc"] = nullptr;
  }
  return j;
}

void write_result(std::ostream& out, const SweepSpec& spec, const SweepResult& result) {
  if (spec.format == OutputFormat::Csv) {
    write_csv(out, result.rows);
    return;
  }
  nlohmann::json j;
  j["config"] = describe(spec);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : result.rows) j["rows"].push_back(to_json(r));
  j["mc"] = nlohmann::json::array();
  for (const auto& m : result.mc) j["mc"].push_back(m.body);
  out << j.dump(2) << '\n';
}

}  // namespace udn::cli
