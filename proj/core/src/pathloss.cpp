#include "udn/pathloss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "udn/diagnostics.hpp"
#include "udn/errors.hpp"

namespace udn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::string piece_label(std::size_t n) { return "path-loss piece " + std::to_string(n); }

// Sample points strictly inside (lo, hi]; for an infinite piece the grid runs
// geometrically out to 1e4 km.
std::vector<double> probe_grid(double lo, double hi, int count) {
  std::vector<double> xs;
  const double start = lo > 0.0 ? lo : 1e-6;
  const double stop = std::isinf(hi) ? std::max(start * 10.0, 1e4) : hi;
  const double ratio = std::log(stop / start);
  for (int i = 1; i <= count; ++i) xs.push_back(start * std::exp(ratio * i / count));
  if (!std::isinf(hi)) xs.back() = hi;
  return xs;
}

double los_limit_at_infinity(const LosProbability& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantLos>) return l.p;
        else if constexpr (std::is_same_v<T, ComplementExpLos>) return 1.0 - l.coef;
        else return 0.0;
      },
      law);
}

}  // namespace

const char* to_string(Branch b) { return b == Branch::LoS ? "LoS" : "NLoS"; }

double evaluate(const LosProbability& law, double r_km) {
  return std::visit(
      [r_km](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantLos>) return l.p;
        else if constexpr (std::is_same_v<T, ComplementExpLos>) return 1.0 - l.coef * std::exp(-l.scale / r_km);
        else return l.coef * std::exp(-r_km / l.scale);
      },
      law);
}

double PathLossPiece::gain(double r_km, Branch b) const {
  return amplitude(b) * std::pow(r_km, -exponent(b));
}

PathLossModel::PathLossModel(std::vector<PathLossPiece> pieces) : pieces_(std::move(pieces)) {
  require(!pieces_.empty(), "path-loss model needs at least one piece");
  require(pieces_.front().d_lo == 0.0, "first path-loss piece must start at 0");
  require(std::isinf(pieces_.back().d_hi), "last path-loss piece must extend to infinity");

  for (std::size_t n = 0; n < pieces_.size(); ++n) {
    const auto& p = pieces_[n];
    const auto label = piece_label(n);
    require(p.d_lo >= 0.0 && p.d_hi > p.d_lo, label + ": bounds must satisfy 0 <= d_lo < d_hi");
    if (n + 1 < pieces_.size()) require(pieces_[n + 1].d_lo == p.d_hi, label + ": pieces must be contiguous");
    require(p.a_los > 0.0 && p.a_nlos > 0.0 && std::isfinite(p.a_los) && std::isfinite(p.a_nlos),
            label + ": gains must be positive");
    require(p.alpha_los > 0.0 && p.alpha_nlos > 0.0, label + ": exponents must be positive");

    double prev = 1.0;
    for (double r : probe_grid(p.d_lo, p.d_hi, 256)) {
      const double pr = evaluate(p.los_prob, r);
      require(pr >= 0.0 && pr <= 1.0, label + ": LoS probability outside [0, 1] at r=" + std::to_string(r));
      require(pr <= prev + 1e-15, label + ": LoS probability must be non-increasing within a piece");
      prev = pr;
    }
    if (std::isinf(p.d_hi)) {
      const double lim = los_limit_at_infinity(p.los_prob);
      require(lim >= 0.0 && lim <= 1.0, label + ": LoS probability limit outside [0, 1]");
    }
  }

  for (std::size_t n = 0; n + 1 < pieces_.size(); ++n) {
    const double d = pieces_[n].d_hi;
    for (Branch b : {Branch::LoS, Branch::NLoS}) {
      require(pieces_[n + 1].gain(d, b) <= pieces_[n].gain(d, b),
              "path-loss model: " + std::string(to_string(b)) + " gain increases at boundary " + std::to_string(d) +
                  " km");
    }
    const double left = evaluate(pieces_[n].los_prob, d);
    const double right = evaluate(pieces_[n + 1].los_prob, std::nextafter(d, kInf));
    if (right > left) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "LoS probability jumps up from %.6g to %.6g at the piece boundary %.6g km", left,
                    right, d);
      warn(buf);
    }
  }
}

int PathLossModel::piece_index(double r_km) const {
  if (!(r_km > 0.0)) throw DomainError("distance must be positive");
  for (std::size_t n = 0; n < pieces_.size(); ++n)
    if (r_km <= pieces_[n].d_hi) return static_cast<int>(n);
  return size() - 1;
}

double PathLossModel::gain(double r_km, Branch b) const { return piece(piece_index(r_km)).gain(r_km, b); }

double PathLossModel::los_probability(double r_km) const {
  return evaluate(piece(piece_index(r_km)).los_prob, r_km);
}

double PathLossModel::inverse_gain(double g, Branch b) const {
  if (!(g > 0.0)) return kInf;
  for (const auto& p : pieces_) {
    const double u = std::pow(p.amplitude(b) / g, 1.0 / p.exponent(b));
    if (u <= p.d_lo) return p.d_lo;
    if (u <= p.d_hi) return u;
  }
  return kInf;
}

double PathLossModel::los_cutoff_km(double threshold) const {
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    const auto& p = *it;
    const double hi_value = std::isinf(p.d_hi) ? los_limit_at_infinity(p.los_prob) : evaluate(p.los_prob, p.d_hi);
    if (hi_value >= threshold) return p.d_hi;
    const double lo_probe = p.d_lo > 0.0 ? std::nextafter(p.d_lo, kInf) : 1e-9;
    if (evaluate(p.los_prob, lo_probe) < threshold) continue;

    // Bisect for the crossing inside the piece.
    double lo = lo_probe;
    double hi = p.d_hi;
    if (std::isinf(hi)) {
      hi = std::max(2.0 * lo, 1.0);
      while (evaluate(p.los_prob, hi) >= threshold) hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (evaluate(p.los_prob, mid) >= threshold ? lo : hi) = mid;
    }
    return hi;
  }
  return 0.0;
}

bool PathLossModel::los_dominates_beyond(double d_km) const {
  for (const auto& p : pieces_) {
    if (p.d_hi < d_km) continue;
    const double lo = std::max(p.d_lo, d_km);
    const double lo_probe = lo > 0.0 ? lo : 1e-12;
    // log(gL/gN) is affine in log r, so checking the two ends is enough.
    if (p.gain(lo_probe, Branch::LoS) < p.gain(lo_probe, Branch::NLoS)) return false;
    if (std::isinf(p.d_hi)) {
      if (p.alpha_los > p.alpha_nlos) return false;
      if (p.alpha_los == p.alpha_nlos && p.a_los < p.a_nlos) return false;
    } else if (p.gain(p.d_hi, Branch::LoS) < p.gain(p.d_hi, Branch::NLoS)) {
      return false;
    }
  }
  return true;
}

double PathLossModel::branch_crossing_km() const {
  double crossing = 0.0;
  for (const auto& p : pieces_) {
    if (p.alpha_los == p.alpha_nlos) continue;
    const double r = std::pow(p.a_nlos / p.a_los, 1.0 / (p.alpha_nlos - p.alpha_los));
    if (r > p.d_lo && r <= p.d_hi) crossing = std::max(crossing, r);
  }
  return crossing;
}

PathLossModel make_3gpp_case() {
  // Built once so the boundary-jump warning is emitted once per process.
  static const PathLossModel model = [] {
    const double r1 = 0.156;
    const double r2 = 0.030;
    const double d1 = r1 / std::log(10.0);
    PathLossPiece near{0.0, d1, std::pow(10.0, -10.38), 2.09, std::pow(10.0, -14.54), 3.75, ComplementExpLos{5.0, r1}};
    PathLossPiece far{d1, kInf, std::pow(10.0, -10.38), 2.09, std::pow(10.0, -14.54), 3.75, ExpDecayLos{5.0, r2}};
    return PathLossModel({near, far});
  }();
  return model;
}

PathLossModel make_single_slope_nlos(double a, double alpha) {
  return PathLossModel({PathLossPiece{0.0, kInf, a, alpha, a, alpha, ConstantLos{0.0}}});
}

double path_gain(const PathLossModel& model, double r_km, Branch b) { return model.gain(r_km, b); }

double los_probability(const PathLossModel& model, double r_km) { return model.los_probability(r_km); }

double invert_nlos_to_los(const PathLossModel& model, double r_km) {
  return model.inverse_gain(model.gain(r_km, Branch::LoS), Branch::NLoS);
}

double invert_los_to_nlos(const PathLossModel& model, double r_km) {
  return model.inverse_gain(model.gain(r_km, Branch::NLoS), Branch::LoS);
}

}  // namespace udn
