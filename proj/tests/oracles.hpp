#pragma once

// Independent reference computations for the tests. Nothing here calls into
// udn::core: integrals use composite Simpson rules on fixed grids, inverses use
// bisection and the two-piece small-cell model is written out by hand.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Composite Simpson rule with n (rounded up to even) intervals.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Simpson in log u: ∫_a^b f(u) du for 0 < a < b.
template <class F>
double simpson_log(F&& f, double a, double b, int n) {
  return simpson([&](double x) { const double u = std::exp(x); return f(u) * u; }, std::log(a), std::log(b), n);
}

/// Root of a monotone function on [lo, hi] by bisection.
template <class F>
double bisect(F&& f, double lo, double hi, int iterations = 200) {
  const bool rising = f(hi) > f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0.0) == rising) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Negative-binomial pmf Γ(k+q)/(Γ(q) k!) p^k (1-p)^q by a running product.
inline double nb_pmf(int k, double q, double p) {
  double v = std::pow(1.0 - p, q);
  for (int i = 0; i < k; ++i) v *= (q + i) / (i + 1.0) * p;
  return v;
}

/// Binomial coefficient as a double.
inline double choose(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// Sample mean and standard error.
struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

inline Moments moments(const std::vector<double>& xs) {
  double s = 0.0, s2 = 0.0;
  for (double x : xs) s += x;
  const double n = static_cast<double>(xs.size());
  const double m = s / n;
  for (double x : xs) s2 += (x - m) * (x - m);
  return {m, std::sqrt(s2 / (n - 1.0) / n)};
}

/// Two-piece small-cell model, distances in km. Each branch gain is a single
/// power law; only the LoS probability changes form at d1.
struct SmallCell {
  double a_los = std::pow(10.0, -10.38);
  double alpha_los = 2.09;
  double a_nlos = std::pow(10.0, -14.54);
  double alpha_nlos = 3.75;
  double r1 = 0.156;
  double r2 = 0.030;
  double d1 = 0.156 / std::log(10.0);

  // Segments that start at d1 must see the right-hand limit of the LoS
  // probability, which jumps there.
  double d1_right() const { return std::nextafter(d1, 1.0); }

  double pr_los(double u) const { return u <= d1 ? 1.0 - 5.0 * std::exp(-r1 / u) : 5.0 * std::exp(-u / r2); }
  double gain(double u, bool los) const {
    return los ? a_los * std::pow(u, -alpha_los) : a_nlos * std::pow(u, -alpha_nlos);
  }
  double distance_for(double g, bool los) const {
    return los ? std::pow(a_los / g, 1.0 / alpha_los) : std::pow(a_nlos / g, 1.0 / alpha_nlos);
  }
};

/// Reference coverage for a Poisson BS field of density lambda (association)
/// whose active subset has density lambda_active (interference), Rayleigh
/// fading, small-cell path loss.
struct CoverageReference {
  SmallCell m;
  double lambda;
  double lambda_active;
  double tx_power;
  double noise_power;
  int grid = 1000;  // Simpson intervals per smooth segment

  // ∫_0^x Pr^L(u) u du, or ∫_0^x (1 - Pr^L) u du when los is false.
  double moment(double x, bool los) const {
    if (!los) return 0.5 * x * x - moment(x, true);
    auto f = [&](double u) { return m.pr_los(u) * u; };
    if (x <= m.d1) return simpson(f, 0.0, x, grid);
    return simpson(f, 0.0, m.d1, grid) + simpson(f, m.d1_right(), std::min(x, 2.0), grid);
  }

  // Piecewise Simpson in log u over [lo, hi], split at d1.
  template <class F>
  double split_log(F&& f, double lo, double hi) const {
    if (lo >= hi) return 0.0;
    if (lo < m.d1 && m.d1 < hi) return simpson_log(f, lo, m.d1, grid) + simpson_log(f, m.d1_right(), hi, grid);
    return simpson_log(f, lo, hi, grid);
  }

  double serving_pdf(double r, bool los) const {
    const double g = m.gain(r, los);
    const double r_los = m.distance_for(g, true);
    const double r_nlos = m.distance_for(g, false);
    const double pr = los ? m.pr_los(r) : 1.0 - m.pr_los(r);
    return 2.0 * kPi * lambda * r * pr * std::exp(-2.0 * kPi * lambda * (moment(r_los, true) + moment(r_nlos, false)));
  }

  // -log E[exp(-s I)] given a serving link of gain g.
  double laplace_exponent(double s, double g) const {
    const double sp = s * tx_power;
    auto los = [&](double u) { const double x = sp * m.gain(u, true); return m.pr_los(u) * x / (1.0 + x) * u; };
    auto nlos = [&](double u) { const double x = sp * m.gain(u, false); return (1.0 - m.pr_los(u)) * x / (1.0 + x) * u; };
    const double lo_los = m.distance_for(g, true);
    const double lo_nlos = m.distance_for(g, false);
    // LoS probability is below 1e-28 beyond 2 km.
    double total = split_log(los, lo_los, std::max(lo_los, 2.0));
    const double far = 1e4;
    total += split_log(nlos, lo_nlos, std::max(lo_nlos, far));
    // Tail beyond `far`: x/(1+x) ≈ x and Pr^L ≈ 0.
    const double upper = std::max(lo_nlos, far);
    total += sp * m.a_nlos * std::pow(upper, 2.0 - m.alpha_nlos) / (m.alpha_nlos - 2.0);
    return 2.0 * kPi * lambda_active * total;
  }

  // P[SINR > γ | r, b] for a UE picked out of k by max-SNR selection
  // (k = 1 is round robin), via the alternating binomial sum.
  double conditional(double r, bool los, double gamma, int k) const {
    const double g = m.gain(r, los);
    const double s = gamma / (tx_power * g);
    double sum = 0.0;
    for (int n = 1; n <= k; ++n) {
      const double term = std::exp(-laplace_exponent(n * s, g) - n * s * noise_power);
      sum += (n % 2 ? 1.0 : -1.0) * choose(k, n) * term;
    }
    return sum;
  }

  // Jensen bound Σ f(k) [1 - (1 - L(s) e^{-s N})^k] with the given pmf on k = 1..K.
  double conditional_upper(double r, bool los, double gamma, const std::vector<double>& pmf) const {
    const double g = m.gain(r, los);
    const double s = gamma / (tx_power * g);
    const double x = std::exp(-laplace_exponent(s, g) - s * noise_power);
    double sum = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) sum += pmf[k] * (1.0 - std::pow(1.0 - x, static_cast<double>(k + 1)));
    return sum;
  }

  // Outer integral over r in log space, split at d1, up to r_max km.
  template <class C>
  double integrate_serving(C&& conditional_at, double r_max, int outer) const {
    double total = 0.0;
    for (bool los : {true, false}) {
      auto f = [&](double r) {
        const double pdf = serving_pdf(r, los);
        return pdf == 0.0 ? 0.0 : pdf * conditional_at(r, los);
      };
      total += simpson_log(f, 1e-7, m.d1, outer) + simpson_log(f, m.d1_right(), r_max, outer);
    }
    return total;
  }
};

}  // namespace oracle
