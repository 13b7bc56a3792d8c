#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace udn {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    abs_error += o.abs_error;
    evaluations += o.evaluations;
    subdivisions += o.subdivisions;
    converged = converged && o.converged;
    return *this;
  }
};

namespace detail {

// 21-point Kronrod rule with its embedded 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208532086877, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = 0.0;
  double resk = fc * kWgk[10];
  double resabs = std::abs(resk);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));

  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (10/21) quadrature of f over [a, b].
/// The segment with the largest error estimate is bisected until the summed
/// error meets max(abs_tol, rel_tol*|value|). When max_subdivisions is hit the
/// best estimate is returned with converged = false.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
  QuadResult out;
  if (!(b > a)) return out;

  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gk21(f, a, b));
  out.evaluations = 21;
  double value = heap.top().value;
  double error = heap.top().error;

  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(value)); };
  while (error > tolerance()) {
    if (out.subdivisions >= opts.max_subdivisions) {
      out.converged = false;
      break;
    }
    const detail::Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval can no longer be split in double precision.
      out.converged = false;
      break;
    }
    heap.pop();
    const auto left = detail::gk21(f, worst.a, mid);
    const auto right = detail::gk21(f, mid, worst.b);
    out.evaluations += 42;
    ++out.subdivisions;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the leaves so rounding from the running updates does not accumulate.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.abs_error = error;
  return out;
}

/// Integral of f over [a, +inf) via u = a + scale*(1-t)/t, t in (0, 1].
/// The far tail maps to t -> 0, where doubles are dense, so slowly decaying
/// algebraic tails stay resolvable. `scale` should be of the order of the
/// distance over which f decays.
template <class F>
QuadResult integrate_to_infinity(F&& f, double a, double scale, const QuadOptions& opts = {}) {
  auto mapped = [&](double t) {
    const double u = a + scale * (1.0 - t) / t;
    const double fu = f(u);
    return fu == 0.0 ? 0.0 : fu * scale / t / t;
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace udn
