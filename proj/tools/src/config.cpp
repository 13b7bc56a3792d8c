#include "udn/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "udn/errors.hpp"
#include "udn/units.hpp"

namespace udn::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& key, T fallback) {
  const auto v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + key + "'");
  }
}

std::vector<double> number_list(const YAML::Node& v, const std::string& key) {
  std::vector<double> out;
  try {
    if (v.IsSequence()) {
      for (const auto& x : v) out.push_back(x.as<double>());
    } else {
      out.push_back(v.as<double>());
    }
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + key + "'");
  }
  return out;
}

LosProbability parse_los_law(const YAML::Node& n) {
  check_keys(n, "los_probability", {"law", "p", "coef", "scale_m"});
  const auto law = get<std::string>(n, "law", "");
  if (law == "constant") return ConstantLos{get<double>(n, "p", 0.0)};
  if (law == "complement_exp")
    return ComplementExpLos{get<double>(n, "coef", 5.0), meters_to_km(get<double>(n, "scale_m", 156.0))};
  if (law == "exp_decay") return ExpDecayLos{get<double>(n, "coef", 5.0), meters_to_km(get<double>(n, "scale_m", 30.0))};
  throw ConfigError("los_probability.law must be constant, complement_exp or exp_decay");
}

void parse_branch(const YAML::Node& n, const std::string& where, double& amplitude, double& alpha) {
  if (!n) throw ConfigError(where + " is required");
  check_keys(n, where, {"gain_at_1km_db", "alpha"});
  if (!n["gain_at_1km_db"] || !n["alpha"]) throw ConfigError(where + " needs gain_at_1km_db and alpha");
  amplitude = db_to_linear(get<double>(n, "gain_at_1km_db", 0.0));
  alpha = get<double>(n, "alpha", 0.0);
}

PathLossModel parse_pathloss(const YAML::Node& n) {
  check_keys(n, "pathloss", {"pieces"});
  const auto pieces = n["pieces"];
  if (!pieces || !pieces.IsSequence() || pieces.size() == 0) throw ConfigError("pathloss.pieces must be a non-empty list");
  std::vector<PathLossPiece> out;
  double lo = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto p = pieces[i];
    check_keys(p, "pathloss piece", {"d_hi_m", "los", "nlos", "los_probability"});
    PathLossPiece piece;
    piece.d_lo = lo;
    piece.d_hi = p["d_hi_m"] ? meters_to_km(get<double>(p, "d_hi_m", 0.0)) : kInf;
    if (i + 1 < pieces.size() && !p["d_hi_m"]) throw ConfigError("only the last piece may omit d_hi_m");
    if (i + 1 == pieces.size() && p["d_hi_m"]) throw ConfigError("the last piece must extend to infinity");
    parse_branch(p["los"], "los", piece.a_los, piece.alpha_los);
    parse_branch(p["nlos"], "nlos", piece.a_nlos, piece.alpha_nlos);
    if (!p["los_probability"]) throw ConfigError("los_probability is required");
    piece.los_prob = parse_los_law(p["los_probability"]);
    out.push_back(piece);
    lo = piece.d_hi;
  }
  return PathLossModel(std::move(out));
}

void parse_network(const YAML::Node& n, NetworkConfig& cfg) {
  check_keys(n, "network", {"rho", "q", "tx_power_dbm", "noise_power_dbm", "epsilon", "kmax_cap"});
  cfg.rho = get<double>(n, "rho", cfg.rho);
  cfg.q = get<double>(n, "q", cfg.q);
  cfg.tx_power = dbm_to_watts(get<double>(n, "tx_power_dbm", watts_to_dbm(cfg.tx_power)));
  cfg.noise_power = dbm_to_watts(get<double>(n, "noise_power_dbm", watts_to_dbm(cfg.noise_power)));
  cfg.epsilon = get<double>(n, "epsilon", cfg.epsilon);
  cfg.kmax_cap = get<int>(n, "kmax_cap", cfg.kmax_cap);
}

void parse_sweep(const YAML::Node& n, SweepSpec& spec) {
  check_keys(n, "sweep", {"lambda", "lambda_log", "gamma_db", "gamma0_db", "schedulers", "method", "ase", "workers"});
  if (n["lambda"] && n["lambda_log"]) throw ConfigError("give either sweep.lambda or sweep.lambda_log");
  if (n["lambda"]) spec.lambda_grid = number_list(n["lambda"], "lambda");
  if (const auto lg = n["lambda_log"]) {
    check_keys(lg, "lambda_log", {"from", "to", "points"});
    spec.lambda_grid = log_grid(get<double>(lg, "from", 1.0), get<double>(lg, "to", 1e4), get<int>(lg, "points", 5));
  }
  if (n["gamma_db"]) spec.gamma_db = number_list(n["gamma_db"], "gamma_db");
  spec.gamma0_db = get<double>(n, "gamma0_db", spec.gamma0_db);
  if (const auto s = n["schedulers"]) {
    spec.schedulers.clear();
    if (s.IsSequence()) {
      for (const auto& x : s) spec.schedulers.push_back(parse_scheduler(x.as<std::string>()));
    } else {
      spec.schedulers.push_back(parse_scheduler(s.as<std::string>()));
    }
  }
  if (n["method"]) spec.method = parse_method(get<std::string>(n, "method", "auto"));
  spec.compute_ase = get<bool>(n, "ase", spec.compute_ase);
  spec.workers = get<unsigned>(n, "workers", spec.workers);
}

McSettings parse_mc(const YAML::Node& n) {
  check_keys(n, "mc", {"drops", "mode", "fading", "seed", "radius_km", "full_stats", "records", "summary"});
  McSettings mc;
  mc.drops = get<long>(n, "drops", mc.drops);
  if (n["mode"]) mc.mode = parse_sim_mode(get<std::string>(n, "mode", ""));
  if (n["fading"]) mc.fading = parse_fading(get<std::string>(n, "fading", ""));
  mc.seed = get<std::uint64_t>(n, "seed", mc.seed);
  mc.radius_km = get<double>(n, "radius_km", mc.radius_km);
  mc.full_stats = get<bool>(n, "full_stats", mc.full_stats);
  mc.records_path = get<std::string>(n, "records", "");
  mc.summary_path = get<std::string>(n, "summary", "");
  return mc;
}

void parse_output(const YAML::Node& n, SweepSpec& spec) {
  check_keys(n, "output", {"path", "format"});
  spec.out_path = get<std::string>(n, "path", spec.out_path);
  if (n["format"]) spec.format = parse_format(get<std::string>(n, "format", "csv"));
}

}  // namespace

const char* to_string(MethodChoice m) {
  switch (m) {
    case MethodChoice::Auto:
      return "auto";
    case MethodChoice::Exact:
      return "exact";
    case MethodChoice::UpperBound:
      return "upper";
  }
  return "?";
}

CoverageMethod resolve_method(MethodChoice choice, double lambda) {
  switch (choice) {
    case MethodChoice::Exact:
      return CoverageMethod::Exact;
    case MethodChoice::UpperBound:
      return CoverageMethod::UpperBound;
    case MethodChoice::Auto:
      break;
  }
  return lambda >= kAutoExactMinLambda ? CoverageMethod::Exact : CoverageMethod::UpperBound;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw ConfigError("log grid needs 0 < from <= to and at least one point");
  if (n == 1) return {lo};
  std::vector<double> out;
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) out.push_back(i + 1 == n ? hi : std::pow(10.0, a + (b - a) * i / (n - 1)));
  return out;
}

SchedulerKind parse_scheduler(const std::string& s) {
  if (s == "rr") return SchedulerKind::RoundRobin;
  if (s == "pf") return SchedulerKind::ProportionalFair;
  throw ConfigError("scheduler must be rr or pf, got '" + s + "'");
}

MethodChoice parse_method(const std::string& s) {
  if (s == "auto") return MethodChoice::Auto;
  if (s == "exact") return MethodChoice::Exact;
  if (s == "upper") return MethodChoice::UpperBound;
  throw ConfigError("method must be exact, upper or auto, got '" + s + "'");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("format must be csv or json, got '" + s + "'");
}

SimMode parse_sim_mode(const std::string& s) {
  if (s == "full_drop") return SimMode::FullDrop;
  if (s == "model_faithful") return SimMode::ModelFaithful;
  throw ConfigError("mc.mode must be full_drop or model_faithful, got '" + s + "'");
}

FadingKind parse_fading(const std::string& s) {
  if (s == "rayleigh") return FadingKind::Rayleigh;
  if (s == "rician") return FadingKind::RicianDistanceDependent;
  throw ConfigError("fading must be rayleigh or rician, got '" + s + "'");
}

void SweepSpec::validate() const {
  network.validate();
  if (lambda_grid.empty()) throw ConfigError("the lambda grid is empty");
  if (gamma_db.empty()) throw ConfigError("the gamma grid is empty");
  if (schedulers.empty()) throw ConfigError("no scheduler selected");
  for (double l : lambda_grid)
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambda values must be positive and finite");
  for (double g : gamma_db)
    if (!std::isfinite(g)) throw ConfigError("gamma_db values must be finite");
  if (!std::isfinite(gamma0_db)) throw ConfigError("gamma0_db must be finite");
  if (mc) {
    if (mc->drops < 100) throw ConfigError("mc.drops must be at least 100");
    if (mc->radius_km < 0.0) throw ConfigError("mc.radius_km must be non-negative");
  }
}

SweepSpec parse_spec(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
  SweepSpec spec;
  if (!root || root.IsNull()) return spec;
  check_keys(root, "the config root", {"3gpp_case", "network", "pathloss", "sweep", "mc", "output"});
  spec.preset_3gpp = get<bool>(root, "3gpp_case", !root["pathloss"]);
  if (spec.preset_3gpp && root["pathloss"]) throw ConfigError("3gpp_case: true conflicts with an explicit pathloss section");
  if (!spec.preset_3gpp && !root["pathloss"]) throw ConfigError("3gpp_case: false needs a pathloss section");
  if (root["network"]) parse_network(root["network"], spec.network);
  if (root["pathloss"]) spec.model = parse_pathloss(root["pathloss"]);
  if (root["sweep"]) parse_sweep(root["sweep"], spec);
  if (const auto mc = root["mc"]) {
    if (!mc.IsNull()) spec.mc = parse_mc(mc);
  }
  if (root["output"]) parse_output(root["output"], spec);
  spec.validate();
  return spec;
}

SweepSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

}  // namespace udn::cli
