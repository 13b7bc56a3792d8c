#include "udn/cli/table.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace udn::cli {

namespace {

using Opt = std::optional<double> SweepRow::*;

struct OptField {
  const char* name;
  Opt member;
};

const OptField kOptFields[] = {
    {"lambda_tilde", &SweepRow::lambda_tilde}, {"kmax", &SweepRow::kmax},
    {"pcov_exact", &SweepRow::pcov_exact},     {"pcov_ub", &SweepRow::pcov_ub},
    {"pcov_mc", &SweepRow::pcov_mc},           {"mc_ci_lo", &SweepRow::mc_ci_lo},
    {"mc_ci_hi", &SweepRow::mc_ci_hi},         {"ase", &SweepRow::ase},
    {"pf_rr_ratio", &SweepRow::pf_rr_ratio},   {"pf_rr_ratio_mc", &SweepRow::pf_rr_ratio_mc},
};

const OptField kTimingFields[] = {
    {"quad_error", &SweepRow::quad_error},
    {"wall_time", &SweepRow::wall_time},
    {"ase_time", &SweepRow::ase_time},
};

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error("bad number in CSV: '" + s + "'");
  return v;
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> opt_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_number(s);
}

}  // namespace

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"lambda", "gamma_db", "scheduler"};
    for (const auto& f : kOptFields) c.emplace_back(f.name);
    c.emplace_back("method_used");
    for (const auto& f : kTimingFields) c.emplace_back(f.name);
    c.emplace_back("error");
    return c;
  }();
  return cols;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round_trip(double v) { return parse_number(format_number(v)); }

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    out << format_number(r.lambda) << ',' << format_number(r.gamma_db) << ',' << quote(r.scheduler);
    for (const auto& f : kOptFields) out << ',' << opt_cell(r.*f.member);
    out << ',' << quote(r.method_used);
    for (const auto& f : kTimingFields) out << ',' << opt_cell(r.*f.member);
    out << ',' << quote(r.error) << '\n';
  }
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  if (split_csv_line(line) != sweep_columns()) throw std::runtime_error("unexpected CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != sweep_columns().size()) throw std::runtime_error("CSV row has the wrong number of cells");
    SweepRow r;
    std::size_t i = 0;
    r.lambda = parse_number(cells[i++]);
    r.gamma_db = parse_number(cells[i++]);
    r.scheduler = cells[i++];
    for (const auto& f : kOptFields) r.*f.member = opt_parse(cells[i++]);
    r.method_used = cells[i++];
    for (const auto& f : kTimingFields) r.*f.member = opt_parse(cells[i++]);
    r.error = cells[i++];
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json to_json(const SweepRow& r) {
  nlohmann::json j;
  j["lambda"] = r.lambda;
  j["gamma_db"] = r.gamma_db;
  j["scheduler"] = r.scheduler;
  auto put = [&](const OptField& f) {
    const auto& v = r.*f.member;
    j[f.name] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  for (const auto& f : kOptFields) put(f);
  j["method_used"] = r.method_used;
  for (const auto& f : kTimingFields) put(f);
  j["error"] = r.error;
  return j;
}

SweepRow row_from_json(const nlohmann::json& j) {
  SweepRow r;
  r.lambda = j.at("lambda").get<double>();
  r.gamma_db = j.at("gamma_db").get<double>();
  r.scheduler = j.at("scheduler").get<std::string>();
  auto get = [&](const OptField& f) {
    const auto& v = j.at(f.name);
    r.*f.member = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  };
  for (const auto& f : kOptFields) get(f);
  r.method_used = j.at("method_used").get<std::string>();
  for (const auto& f : kTimingFields) get(f);
  r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace udn::cli
