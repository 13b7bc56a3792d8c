#include "udn/mcsim.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "udn/coverage.hpp"
#include "udn/diagnostics.hpp"
#include "udn/errors.hpp"
#include "udn/parallel.hpp"
#include "udn/quadrature.hpp"

namespace udn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinDistance = 1e-9;  // km; guards the r -> 0 pole of the gain laws
constexpr std::uint64_t kUeFieldTag = 0x75656669656c6421ULL;

// Per-run constants shared by all drops.
struct SimContext {
  const SimConfig& cfg;
  double radius;
  double los_cutoff;    // beyond this every link is NLoS
  bool region_valid;    // LoS dominates NLoS beyond los_cutoff
  double lambda_tilde;
  double keep_prob;     // model-faithful interferer thinning
  UeCountDistribution dist;
};

SimContext make_context(const SimConfig& cfg) {
  cfg.base.validate();
  if (cfg.n_drops < 1) throw ConfigError("n_drops must be at least 1");
  const RadiusChoice rc = default_sim_radius(cfg.base, cfg.model);
  double radius = cfg.sim_radius_km > 0.0 ? cfg.sim_radius_km : rc.radius_km;
  if (cfg.sim_radius_km > 0.0 && cfg.sim_radius_km < 5.0 * rc.d99_km) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "simulation radius %.4g km is below 5x the 99th-percentile serving distance (%.4g km)",
                  cfg.sim_radius_km, rc.d99_km);
    warn(buf);
  }
  if (cfg.base.lambda * kPi * radius * radius > 2e7) throw ConfigError("simulation disc would hold more than 2e7 BSs");
  const double lc = cfg.model.los_cutoff_km();
  const double lt = active_bs_density(cfg.base);
  const double interferers = cfg.interferer_density.value_or(lt);
  if (!(interferers >= 0.0)) throw ConfigError("interferer density must be non-negative");
  if (cfg.fixed_k && *cfg.fixed_k < 1) throw ConfigError("fixed_k must be at least 1");
  return SimContext{cfg,
                    radius,
                    lc,
                    std::isfinite(lc) && cfg.model.los_dominates_beyond(lc),
                    lt,
                    std::min(1.0, interferers / cfg.base.lambda),
                    active_ue_count_distribution(cfg.base, INT_MAX)};
}

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double fading_gain(const SimConfig& cfg, double d_km, Rng& rng) { return sample_fading(cfg.fading, d_km * 1e3, rng); }

DropOutcome make_outcome(const SimConfig& cfg, double d, Branch b, int k, double gain, double interference) {
  DropOutcome o;
  o.serving_distance_km = d;
  o.serving_branch = b;
  o.k_served = k;
  o.gain = gain;
  o.i_agg = interference;
  o.sinr = cfg.base.tx_power * cfg.model.gain(d, b) * gain / (interference + cfg.base.noise_power);
  return o;
}

PairedDrop unserved_pair() {
  PairedDrop p;
  p.rr.served = p.pf.served = false;
  return p;
}

void fill_pair(PairedDrop& out, const SimConfig& cfg, double d, Branch b, int k, const std::vector<double>& gains,
               double interference) {
  out.rr = make_outcome(cfg, d, b, k, gains.front(), interference);
  out.pf = make_outcome(cfg, d, b, k, *std::max_element(gains.begin(), gains.end()), interference);
}

// ---------------------------------------------------------------------------
// Model-faithful drop.

PairedDrop model_faithful_pair(const SimContext& ctx, long drop_index) {
  const SimConfig& cfg = ctx.cfg;
  Rng rng = make_stream(cfg.master_seed, static_cast<std::uint64_t>(drop_index));
  const double lam = cfg.base.lambda;

  // π λ r_i² of the ordered distances form a unit-rate Poisson process.
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> dist, zeta;
  std::vector<char> los;
  double area = 0.0;
  for (;;) {
    area += exp1(rng);
    const double r = std::max(std::sqrt(area / (kPi * lam)), kMinDistance);
    if (r > ctx.radius) break;
    const bool l = r < ctx.los_cutoff && uniform(rng) < cfg.model.los_probability(r);
    dist.push_back(r);
    los.push_back(l);
    zeta.push_back(cfg.model.gain(r, l ? Branch::LoS : Branch::NLoS));
  }
  if (dist.empty()) return unserved_pair();

  const auto s = static_cast<std::size_t>(std::max_element(zeta.begin(), zeta.end()) - zeta.begin());
  const int k = cfg.fixed_k ? *cfg.fixed_k : ctx.dist.sample(rng);
  std::vector<double> gains(static_cast<std::size_t>(k));
  for (auto& g : gains) g = fading_gain(cfg, dist[s], rng);

  double interference = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (i == s || uniform(rng) >= ctx.keep_prob) continue;
    interference += cfg.base.tx_power * zeta[i] * fading_gain(cfg, dist[i], rng);
  }

  PairedDrop out;
  fill_pair(out, cfg, dist[s], los[s] ? Branch::LoS : Branch::NLoS, k, gains, interference);
  return out;
}

// ---------------------------------------------------------------------------
// Full drop: BS field and UE field on the disc, plus a probe UE at the origin.
// UE cells are generated on demand from their own hashed streams and UE
// associations are memoized, so only the neighbourhoods that matter are built.

class FullDrop {
 public:
  FullDrop(const SimContext& ctx, long drop_index)
      : ctx_(ctx),
        cfg_(ctx.cfg),
        seed_(stream_seed(ctx.cfg.master_seed, static_cast<std::uint64_t>(drop_index))),
        rng_(seed_),
        radius_(ctx.radius) {
    const double lam = cfg_.base.lambda;
    const long n = std::poisson_distribution<long>(lam * kPi * radius_ * radius_)(rng_);
    bx_.reserve(static_cast<std::size_t>(n));
    by_.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      const double r = radius_ * std::sqrt(uniform(rng_));
      const double th = 2.0 * kPi * uniform(rng_);
      bx_.push_back(r * std::cos(th));
      by_.push_back(r * std::sin(th));
    }
    count_.assign(bx_.size(), 0);

    hb_ = 0.7 / std::sqrt(lam);
    nb_ = std::max(1, static_cast<int>(std::ceil(2.0 * radius_ / hb_)));
    std::vector<int> cell_of(bx_.size());
    bstart_.assign(static_cast<std::size_t>(nb_) * nb_ + 1, 0);
    for (std::size_t i = 0; i < bx_.size(); ++i) {
      cell_of[i] = bcell(bx_[i], by_[i]);
      ++bstart_[static_cast<std::size_t>(cell_of[i]) + 1];
    }
    for (std::size_t c = 1; c < bstart_.size(); ++c) bstart_[c] += bstart_[c - 1];
    bitems_.resize(bx_.size());
    std::vector<int> fill(bstart_.begin(), bstart_.end() - 1);
    for (std::size_t i = 0; i < bx_.size(); ++i) bitems_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[i])]++)] = static_cast<int>(i);

    // About twenty UEs per cell.
    hu_ = std::min(2.0 * radius_, std::sqrt(20.0 / cfg_.base.rho));
    nu_ = std::max(1, static_cast<int>(std::ceil(2.0 * radius_ / hu_)));
    cells_.resize(static_cast<std::size_t>(nu_) * nu_);
    for (int j = 0; j < nu_; ++j) {
      for (int i = 0; i < nu_; ++i) {
        // Cells that miss the disc hold no UEs.
        const double x0 = -radius_ + i * hu_, y0 = -radius_ + j * hu_;
        const double nx = std::clamp(0.0, x0, x0 + hu_), ny = std::clamp(0.0, y0, y0 + hu_);
        if (nx * nx + ny * ny > radius_ * radius_) {
          auto& c = cells_[static_cast<std::size_t>(j * nu_ + i)];
          c.generated = c.done = true;
          ++done_cells_;
        }
      }
    }
  }

  PairedDrop run() {
    if (bx_.empty()) return unserved_pair();

    const int bo = associate(0.0, 0.0, 0);
    ++count_[static_cast<std::size_t>(bo)];
    scan_region(bo, false);
    const int k = count_[static_cast<std::size_t>(bo)];
    const double d_o = std::max(std::hypot(bx_[static_cast<std::size_t>(bo)], by_[static_cast<std::size_t>(bo)]), kMinDistance);
    const Branch b_o = link_branch(d_o, 0, bo);

    // Index 0 is the probe; co-served UEs draw at their own distance.
    std::vector<double> gains;
    gains.reserve(static_cast<std::size_t>(k));
    gains.push_back(fading_gain(cfg_, d_o, rng_));
    if (cfg_.fading == FadingKind::Rayleigh) {
      for (int i = 1; i < k; ++i) gains.push_back(sample_rayleigh(rng_));
    } else {
      for (double d : served_distances(bo)) gains.push_back(fading_gain(cfg_, d, rng_));
    }

    double interference = 0.0;
    for (std::size_t b = 0; b < bx_.size(); ++b) {
      if (static_cast<int>(b) == bo || !active(static_cast<int>(b))) continue;
      const double d = std::max(std::hypot(bx_[b], by_[b]), kMinDistance);
      const double z = cfg_.model.gain(d, link_branch(d, 0, static_cast<int>(b)));
      interference += cfg_.base.tx_power * z * fading_gain(cfg_, d, rng_);
    }

    PairedDrop out;
    fill_pair(out, cfg_, d_o, b_o, k, gains, interference);
    if (cfg_.collect_full_stats) collect_stats(out, bo);
    return out;
  }

 private:
  struct UeCell {
    bool generated = false;
    bool done = false;
    int pending = 0;
    std::vector<double> x, y;
    std::vector<int> assoc;
  };

  int bcell_coord(double v) const { return std::clamp(static_cast<int>(std::floor((v + radius_) / hb_)), 0, nb_ - 1); }
  int bcell(double x, double y) const { return bcell_coord(y) * nb_ + bcell_coord(x); }
  int ucell_coord(double v) const { return std::clamp(static_cast<int>(std::floor((v + radius_) / hu_)), 0, nu_ - 1); }

  // Calls fn(cell_x, cell_y) for the cells at Chebyshev distance k from
  // (cx, cy) inside an n x n grid. Returns false if none exist.
  template <class Fn>
  static bool for_ring(int cx, int cy, int k, int n, Fn&& fn) {
    bool any = false;
    auto visit = [&](int i, int j) {
      if (i < 0 || j < 0 || i >= n || j >= n) return;
      any = true;
      fn(i, j);
    };
    if (k == 0) {
      visit(cx, cy);
      return any;
    }
    for (int i = cx - k; i <= cx + k; ++i) {
      visit(i, cy - k);
      visit(i, cy + k);
    }
    for (int j = cy - k + 1; j <= cy + k - 1; ++j) {
      visit(cx - k, j);
      visit(cx + k, j);
    }
    return any;
  }

  Branch link_branch(double d, std::uint64_t ue_id, int bs) const {
    if (d >= ctx_.los_cutoff) return Branch::NLoS;
    return hashed_uniform(seed_, ue_id, static_cast<std::uint64_t>(bs)) < cfg_.model.los_probability(d) ? Branch::LoS
                                                                                                       : Branch::NLoS;
  }

  double gain_upper(double d) const {
    if (d <= 0.0) return kInf;
    const double nlos = cfg_.model.gain(d, Branch::NLoS);
    return d < ctx_.los_cutoff ? std::max(nlos, cfg_.model.gain(d, Branch::LoS)) : nlos;
  }

  // sup{d : gain_upper(d) >= g}
  double reach(double g) const {
    const double nlos = cfg_.model.inverse_gain(g, Branch::NLoS);
    if (!(ctx_.los_cutoff > 0.0)) return nlos;
    return std::max(nlos, std::min(ctx_.los_cutoff, cfg_.model.inverse_gain(g, Branch::LoS)));
  }

  // Strongest BS for a UE at (x, y): ring scan that stops once no unscanned BS can win.
  int associate(double x, double y, std::uint64_t ue_id) const {
    const int cx = bcell_coord(x), cy = bcell_coord(y);
    int best = -1;
    double best_gain = -1.0;
    double reach2 = kInf;  // BSs farther than sqrt(reach2) cannot beat best_gain
    for (int k = 0;; ++k) {
      const bool any = for_ring(cx, cy, k, nb_, [&](int i, int j) {
        const int c = j * nb_ + i;
        for (int t = bstart_[static_cast<std::size_t>(c)]; t < bstart_[static_cast<std::size_t>(c) + 1]; ++t) {
          const int b = bitems_[static_cast<std::size_t>(t)];
          const double dx = bx_[static_cast<std::size_t>(b)] - x, dy = by_[static_cast<std::size_t>(b)] - y;
          const double d2 = dx * dx + dy * dy;
          if (d2 > reach2) continue;
          const double d = std::max(std::sqrt(d2), kMinDistance);
          const double g = cfg_.model.gain(d, link_branch(d, ue_id, b));
          if (g > best_gain) {
            best_gain = g;
            best = b;
            const double r = reach(g);
            reach2 = r * r;
          }
        }
      });
      if (!any) break;
      // Every unscanned BS is at least k cell widths away.
      if (best >= 0 && k >= 1 && gain_upper(k * hb_) < best_gain) break;
    }
    return best;
  }

  // Largest distance from BS b beyond which no UE can pick b: past the LoS
  // cutoff a UE outside b's Voronoi cell always has a stronger BS. The cell is
  // bounded by the nearest neighbour in each 60-degree sector.
  double region_radius(int b) const {
    if (!ctx_.region_valid) return kInf;
    const double x = bx_[static_cast<std::size_t>(b)], y = by_[static_cast<std::size_t>(b)];
    std::array<double, 6> nearest;
    nearest.fill(kInf);
    const int cx = bcell_coord(x), cy = bcell_coord(y);
    for (int k = 0;; ++k) {
      const bool any = for_ring(cx, cy, k, nb_, [&](int i, int j) {
        const int c = j * nb_ + i;
        for (int t = bstart_[static_cast<std::size_t>(c)]; t < bstart_[static_cast<std::size_t>(c) + 1]; ++t) {
          const int o = bitems_[static_cast<std::size_t>(t)];
          if (o == b) continue;
          const double dx = bx_[static_cast<std::size_t>(o)] - x, dy = by_[static_cast<std::size_t>(o)] - y;
          const int sector = std::min(5, static_cast<int>((std::atan2(dy, dx) + kPi) / (kPi / 3.0)));
          nearest[static_cast<std::size_t>(sector)] = std::min(nearest[static_cast<std::size_t>(sector)], std::hypot(dx, dy));
        }
      });
      if (!any) break;
      if (k >= 1 && *std::max_element(nearest.begin(), nearest.end()) <= k * hb_) break;
    }
    return std::max(ctx_.los_cutoff, *std::max_element(nearest.begin(), nearest.end()));
  }

  void generate(int c) {
    auto& cell = cells_[static_cast<std::size_t>(c)];
    if (cell.generated) return;
    cell.generated = true;
    SplitMix64 rng(stream_seed(seed_ ^ kUeFieldTag, static_cast<std::uint64_t>(c)));
    auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const int i = c % nu_, j = c / nu_;
    const double x0 = -radius_ + i * hu_, y0 = -radius_ + j * hu_;
    const long n = std::poisson_distribution<long>(cfg_.base.rho * hu_ * hu_)(rng);
    for (long t = 0; t < n; ++t) {
      const double x = x0 + hu_ * u01(), y = y0 + hu_ * u01();
      if (x * x + y * y > radius_ * radius_) continue;
      cell.x.push_back(x);
      cell.y.push_back(y);
    }
    cell.assoc.assign(cell.x.size(), -1);
    cell.pending = static_cast<int>(cell.x.size());
    if (cell.pending == 0) {
      cell.done = true;
      ++done_cells_;
    }
  }

  static std::uint64_t ue_id(int cell, std::size_t j) {
    return (static_cast<std::uint64_t>(cell) + 1) << 24 | static_cast<std::uint64_t>(j);
  }

  // True if some other BS is strictly closer than b to every point of UE cell
  // c. Past the LoS cutoff such a cell cannot hold a UE of b.
  bool cell_dominated(int c, int b) const {
    const int i = c % nu_, j = c / nu_;
    const double x0 = -radius_ + i * hu_, y0 = -radius_ + j * hu_;
    const double xb = bx_[static_cast<std::size_t>(b)], yb = by_[static_cast<std::size_t>(b)];
    const double nx = std::clamp(xb, x0, x0 + hu_), ny = std::clamp(yb, y0, y0 + hu_);
    if (std::hypot(nx - xb, ny - yb) < ctx_.los_cutoff) return false;
    const std::array<double, 4> cxs{x0, x0 + hu_, x0, x0 + hu_}, cys{y0, y0, y0 + hu_, y0 + hu_};
    const int bx = bcell_coord(x0 + 0.5 * hu_), by = bcell_coord(y0 + 0.5 * hu_);
    const int reach = static_cast<int>(std::ceil(hu_ / hb_));
    for (int k = 0; k <= reach; ++k) {
      bool found = false;
      for_ring(bx, by, k, nb_, [&](int ci, int cj) {
        if (found) return;
        const int cell = cj * nb_ + ci;
        for (int t = bstart_[static_cast<std::size_t>(cell)]; t < bstart_[static_cast<std::size_t>(cell) + 1]; ++t) {
          const int o = bitems_[static_cast<std::size_t>(t)];
          if (o == b) continue;
          const double xo = bx_[static_cast<std::size_t>(o)], yo = by_[static_cast<std::size_t>(o)];
          bool all = true;
          for (std::size_t q = 0; q < 4 && all; ++q) {
            const double dox = cxs[q] - xo, doy = cys[q] - yo, dbx = cxs[q] - xb, dby = cys[q] - yb;
            all = dox * dox + doy * doy < dbx * dbx + dby * dby;
          }
          if (all) {
            found = true;
            return;
          }
        }
      });
      if (found) return true;
    }
    return false;
  }

  // Associates the UEs of every cell that may hold a UE of BS b. With
  // stop_on_hit, returns as soon as b is known to serve someone.
  void scan_region(int b, bool stop_on_hit) {
    const double rc = region_radius(b);
    const int cx = ucell_coord(bx_[static_cast<std::size_t>(b)]), cy = ucell_coord(by_[static_cast<std::size_t>(b)]);
    const int kmax = std::isinf(rc) ? nu_ : static_cast<int>(std::ceil(rc / hu_)) + 1;
    bool hit = false;
    for (int k = 0; k <= kmax && !hit; ++k) {
      const bool any = for_ring(cx, cy, k, nu_, [&](int i, int j) {
        if (hit) return;
        const int c = j * nu_ + i;
        if (cells_[static_cast<std::size_t>(c)].done) return;
        if (ctx_.region_valid && cell_dominated(c, b)) return;
        generate(c);
        auto& cell = cells_[static_cast<std::size_t>(c)];
        if (cell.done) return;
        for (std::size_t t = 0; t < cell.x.size(); ++t) {
          if (cell.assoc[t] >= 0) continue;
          const int a = associate(cell.x[t], cell.y[t], ue_id(c, t));
          cell.assoc[t] = a;
          ++count_[static_cast<std::size_t>(a)];
          if (--cell.pending == 0) {
            cell.done = true;
            ++done_cells_;
          }
          if (stop_on_hit && a == b) {
            hit = true;
            return;
          }
        }
      });
      if (!any) break;
    }
  }

  bool active(int b) {
    if (count_[static_cast<std::size_t>(b)] > 0) return true;
    if (done_cells_ == static_cast<int>(cells_.size())) return false;
    scan_region(b, true);
    return count_[static_cast<std::size_t>(b)] > 0;
  }

  // Distances from BS b to the UEs it serves, probe excluded. Requires a full scan_region(b).
  std::vector<double> served_distances(int b) const {
    std::vector<double> out;
    const double x = bx_[static_cast<std::size_t>(b)], y = by_[static_cast<std::size_t>(b)];
    for (const auto& cell : cells_) {
      for (std::size_t t = 0; t < cell.assoc.size(); ++t)
        if (cell.assoc[t] == b) out.push_back(std::max(std::hypot(cell.x[t] - x, cell.y[t] - y), kMinDistance));
    }
    return out;
  }

  void collect_stats(PairedDrop& out, int bo) {
    for (std::size_t b = 0; b < bx_.size(); ++b) {
      if (std::hypot(bx_[b], by_[b]) > 0.5 * radius_) continue;
      scan_region(static_cast<int>(b), false);
      const int n = count_[b] - (static_cast<int>(b) == bo ? 1 : 0);
      ++out.inner_bs;
      if (n > 0) ++out.inner_active;
      out.inner_ue_counts.push_back(n);
    }
  }

  const SimContext& ctx_;
  const SimConfig& cfg_;
  std::uint64_t seed_;
  Rng rng_;
  double radius_;

  std::vector<double> bx_, by_;
  std::vector<int> count_;
  double hb_ = 1.0;
  int nb_ = 1;
  std::vector<int> bstart_, bitems_;

  double hu_ = 1.0;
  int nu_ = 1;
  std::vector<UeCell> cells_;
  int done_cells_ = 0;
};

PairedDrop pair_with_context(const SimContext& ctx, long drop_index) {
  if (ctx.cfg.mode == SimMode::ModelFaithful) return model_faithful_pair(ctx, drop_index);
  return FullDrop(ctx, drop_index).run();
}

// Mean interference at the origin from active BSs beyond distance x.
double mean_tail_interference(const NetworkConfig& cfg, const PathLossModel& model, double x, double lambda_tilde) {
  double total = 0.0;
  const QuadOptions opts{0.0, 1e-8, 500};
  for (const auto& p : model.pieces()) {
    if (p.d_hi <= x) continue;
    const double lo = std::max(p.d_lo, x);
    auto f = [&](double u) {
      const double pr = evaluate(p.los_prob, u);
      return (pr * p.gain(u, Branch::LoS) + (1.0 - pr) * p.gain(u, Branch::NLoS)) * u;
    };
    total += std::isinf(p.d_hi) ? integrate_to_infinity(f, lo, std::max(lo, 1e-3), opts).value
                                : integrate(f, lo, p.d_hi, opts).value;
  }
  return 2.0 * kPi * lambda_tilde * cfg.tx_power * total;
}

}  // namespace

const char* to_string(SimMode m) { return m == SimMode::ModelFaithful ? "model_faithful" : "full_drop"; }

RadiusChoice default_sim_radius(const NetworkConfig& cfg, const PathLossModel& model) {
  const CoverageEngine engine(cfg, model);
  const QuadOptions opts{1e-10, 1e-8, 500};
  auto cdf = [&](double d) {
    double total = 0.0;
    for (const auto& p : model.pieces()) {
      if (p.d_lo >= d) break;
      const double hi = std::min(p.d_hi, d);
      for (Branch b : {Branch::LoS, Branch::NLoS})
        total += integrate([&](double r) { return engine.serving_pdf(r, b); }, p.d_lo, hi, opts).value;
    }
    return total;
  };
  auto quantile = [&](double q) {
    double hi = 1.0 / std::sqrt(cfg.lambda);
    while (cdf(hi) < q) hi *= 2.0;
    double lo = hi / 2.0;
    while (lo > 1e-9 && cdf(lo) >= q) lo /= 2.0;
    for (int i = 0; i < 40; ++i) {
      const double mid = std::sqrt(lo * hi);
      (cdf(mid) < q ? lo : hi) = mid;
    }
    return hi;
  };

  RadiusChoice out{};
  out.d_median_km = quantile(0.5);
  out.d99_km = quantile(0.99);

  const double lt = engine.lambda_tilde();
  const double target = 1e-3 * (cfg.noise_power + mean_tail_interference(cfg, model, out.d_median_km, lt));
  double hi = out.d_median_km;
  while (mean_tail_interference(cfg, model, hi, lt) > target) hi *= 2.0;
  double lo = hi / 2.0;
  for (int i = 0; i < 40; ++i) {
    const double mid = std::sqrt(lo * hi);
    (mean_tail_interference(cfg, model, mid, lt) > target ? lo : hi) = mid;
  }
  out.r_far_km = hi;
  out.radius_km = std::max(5.0 * out.d99_km, out.r_far_km);
  return out;
}

PairedDrop run_drop_pair(const SimConfig& cfg, long drop_index) {
  return pair_with_context(make_context(cfg), drop_index);
}

DropOutcome run_drop_model_faithful(const SimConfig& cfg, long drop_index) {
  SimConfig c = cfg;
  c.mode = SimMode::ModelFaithful;
  const PairedDrop p = run_drop_pair(c, drop_index);
  return cfg.scheduler == SchedulerKind::RoundRobin ? p.rr : p.pf;
}

DropOutcome run_drop_full(const SimConfig& cfg, long drop_index) {
  SimConfig c = cfg;
  c.mode = SimMode::FullDrop;
  const PairedDrop p = run_drop_pair(c, drop_index);
  return cfg.scheduler == SchedulerKind::RoundRobin ? p.rr : p.pf;
}

SimRun simulate(const SimConfig& cfg) {
  const SimContext ctx = make_context(cfg);
  SimRun run;
  run.radius_km = ctx.radius;
  run.drops.resize(static_cast<std::size_t>(cfg.n_drops));
  parallel_for(run.drops.size(), cfg.workers,
               [&](std::size_t i) { run.drops[i] = pair_with_context(ctx, static_cast<long>(i)); });
  for (const auto& d : run.drops)
    if (!d.pf.served || d.pf.serving_distance_km > ctx.radius / 5.0) ++run.boundary_hits;
  // The default radius already lets about 1% of drops past radius/5.
  if (run.boundary_hits > std::max(10L, cfg.n_drops / 50)) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%ld of %ld drops were served from beyond a fifth of the %.4g km disc radius",
                  run.boundary_hits, cfg.n_drops, ctx.radius);
    warn(buf);
  }
  return run;
}

Interval wilson_interval(long successes, long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = successes / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

CoverageEstimate estimate_from_run(const SimRun& run, SchedulerKind s, double gamma) {
  long hits = 0;
  const long n = static_cast<long>(run.drops.size());
  for (long i = 0; i < n; ++i)
    if (run.outcome(i, s).sinr > gamma) ++hits;
  return {gamma, n > 0 ? static_cast<double>(hits) / n : 0.0, wilson_interval(hits, n), n};
}

CoverageEstimate estimate_coverage(const SimConfig& cfg, double gamma) {
  if (cfg.n_drops < 100) throw ConfigError("coverage estimates need at least 100 drops");
  return estimate_from_run(simulate(cfg), cfg.scheduler, gamma);
}

std::vector<CoverageEstimate> estimate_curve(const SimConfig& cfg, const std::vector<double>& gamma_grid) {
  if (cfg.n_drops < 100) throw ConfigError("coverage estimates need at least 100 drops");
  const SimRun run = simulate(cfg);
  std::vector<CoverageEstimate> out;
  out.reserve(gamma_grid.size());
  for (double g : gamma_grid) out.push_back(estimate_from_run(run, cfg.scheduler, g));
  return out;
}

double sample_conditional_interference(const SimConfig& cfg, double r_km, Branch b, double radius_km, Rng& rng) {
  const double density = cfg.interferer_density.value_or(active_bs_density(cfg.base));
  const double lc = cfg.model.los_cutoff_km();
  const double serving = cfg.model.gain(r_km, b);
  const long n = std::poisson_distribution<long>(density * kPi * radius_km * radius_km)(rng);
  double interference = 0.0;
  for (long i = 0; i < n; ++i) {
    const double d = std::max(radius_km * std::sqrt(uniform(rng)), kMinDistance);
    const bool los = d < lc && uniform(rng) < cfg.model.los_probability(d);
    const double z = cfg.model.gain(d, los ? Branch::LoS : Branch::NLoS);
    if (z >= serving) continue;
    interference += cfg.base.tx_power * z * fading_gain(cfg, d, rng);
  }
  return interference;
}

}  // namespace udn
