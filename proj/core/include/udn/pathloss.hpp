#pragma once

#include <limits>
#include <variant>
#include <vector>

namespace udn {

enum class Branch { LoS, NLoS };

const char* to_string(Branch b);

// LoS probability laws. Distances in km.

/// Pr(r) = p.
struct ConstantLos {
  double p = 1.0;
};

/// Pr(r) = 1 - coef * exp(-scale / r).
struct ComplementExpLos {
  double coef = 5.0;
  double scale = 0.156;
};

/// Pr(r) = coef * exp(-r / scale).
struct ExpDecayLos {
  double coef = 5.0;
  double scale = 0.030;
};

using LosProbability = std::variant<ConstantLos, ComplementExpLos, ExpDecayLos>;

double evaluate(const LosProbability& law, double r_km);

/// One distance range (d_lo, d_hi] with power-law gains A r^-alpha per branch.
struct PathLossPiece {
  double d_lo = 0.0;
  double d_hi = std::numeric_limits<double>::infinity();
  double a_los = 1.0;
  double alpha_los = 2.0;
  double a_nlos = 1.0;
  double alpha_nlos = 3.0;
  LosProbability los_prob = ConstantLos{};

  double gain(double r_km, Branch b) const;
  double amplitude(Branch b) const { return b == Branch::LoS ? a_los : a_nlos; }
  double exponent(Branch b) const { return b == Branch::LoS ? alpha_los : alpha_nlos; }
};

/// Ordered pieces tiling (0, inf). Immutable after construction.
class PathLossModel {
 public:
  /// Validates the tiling, parameter ranges, per-piece monotonicity of the LoS
  /// probability and strict decrease of each assembled branch gain. Throws
  /// ConfigError on violation. Upward LoS-probability jumps at piece
  /// boundaries are reported through warn() and kept.
  explicit PathLossModel(std::vector<PathLossPiece> pieces);

  int size() const { return static_cast<int>(pieces_.size()); }
  const PathLossPiece& piece(int n) const { return pieces_[static_cast<std::size_t>(n)]; }
  const std::vector<PathLossPiece>& pieces() const { return pieces_; }

  /// Index of the piece with d_lo < r <= d_hi.
  int piece_index(double r_km) const;

  double gain(double r_km, Branch b) const;
  double los_probability(double r_km) const;

  /// Generalized inverse of a branch gain: sup{u : gain(u, b) >= g}. Solved
  /// in closed form piece by piece. When g falls into a downward jump between
  /// pieces the boundary distance is returned.
  double inverse_gain(double g, Branch b) const;

  /// Smallest d such that the LoS probability stays below `threshold` on [d, inf).
  double los_cutoff_km(double threshold = 1e-12) const;

  /// True if gain(u, LoS) >= gain(u, NLoS) for every u >= d.
  bool los_dominates_beyond(double d_km) const;

  /// Distance at which the two branch gains of the piece containing the
  /// LoS/NLoS crossing are equal, or 0 if LoS dominates everywhere.
  double branch_crossing_km() const;

 private:
  std::vector<PathLossPiece> pieces_;
};

/// Two-piece small-cell model: LoS 10^-10.38 r^-2.09, NLoS 10^-14.54 r^-3.75,
/// LoS probability 1 - 5 exp(-R1/r) up to d1 = R1/ln 10 and 5 exp(-r/R2)
/// beyond, with R1 = 156 m and R2 = 30 m.
PathLossModel make_3gpp_case();

/// One piece, no LoS component: gain A r^-alpha for every link.
PathLossModel make_single_slope_nlos(double a, double alpha);

double path_gain(const PathLossModel& model, double r_km, Branch b);
double los_probability(const PathLossModel& model, double r_km);

/// Distance at which the NLoS gain equals the LoS gain at r.
double invert_nlos_to_los(const PathLossModel& model, double r_km);

/// Distance at which the LoS gain equals the NLoS gain at r.
double invert_los_to_nlos(const PathLossModel& model, double r_km);

}  // namespace udn
