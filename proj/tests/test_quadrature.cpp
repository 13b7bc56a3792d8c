#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "udn/quadrature.hpp"

namespace {

using namespace udn;

TEST(Quadrature, ExactForPolynomialsOnOneSegment) {
  // Both the 10-point Gauss and 21-point Kronrod rules are exact at degree 19,
  // so the error estimate vanishes and no subdivision happens.
  auto p = [](double x) { return std::pow(x, 19) - 3.0 * std::pow(x, 12) + x; };
  const auto r = integrate(p, 0.0, 1.0);
  EXPECT_NEAR(r.value, 1.0 / 20 - 3.0 / 13 + 0.5, 1e-14);
  EXPECT_EQ(r.evaluations, 21);
  EXPECT_TRUE(r.converged);
}

struct Reference {
  const char* name;
  double (*f)(double);
  double a, b, value;
};

TEST(Quadrature, ReferenceIntegrals) {
  const double pi = std::numbers::pi;
  const Reference cases[] = {
      {"sin", [](double x) { return std::sin(x); }, 0.0, pi, 2.0},
      {"gaussian", [](double x) { return std::exp(-x * x); }, -10.0, 10.0, std::sqrt(pi)},
      {"sqrt", [](double x) { return std::sqrt(x); }, 0.0, 1.0, 2.0 / 3.0},
      {"log", [](double x) { return std::log(x); }, 0.0, 1.0, -1.0},
      {"kink", [](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 0.29},
      {"peak", [](double x) { return 1e-4 / (1e-8 + (x - 0.5) * (x - 0.5)); }, 0.0, 1.0, 2.0 * std::atan(0.5e4)},
  };
  for (const auto& c : cases) {
    const auto r = integrate(c.f, c.a, c.b, QuadOptions{1e-13, 1e-13, 5000});
    EXPECT_NEAR(r.value, c.value, 1e-10 * std::max(1.0, std::abs(c.value))) << c.name;
    EXPECT_LE(std::abs(r.value - c.value), std::max(r.abs_error, 1e-12)) << c.name << " error estimate too small";
  }
}

TEST(Quadrature, SemiInfiniteIntegrals) {
  const auto e = integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, 1.0);
  EXPECT_NEAR(e.value, 1.0, 1e-11);
  // Slow algebraic tail: ∫_1^∞ x^-1.5 dx = 2.
  const auto slow = integrate_to_infinity([](double x) { return std::pow(x, -1.5); }, 1.0, 1.0,
                                          QuadOptions{1e-12, 1e-12, 5000});
  EXPECT_NEAR(slow.value, 2.0, 1e-9);
  // ∫_0^∞ 1/(1+x^2) = π/2 with a scale far from the natural one.
  const auto c = integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 100.0);
  EXPECT_NEAR(c.value, std::numbers::pi / 2, 1e-9);
}

TEST(Quadrature, ReportsNonConvergence) {
  auto wild = [](double x) { return std::sin(1.0 / x) / x; };
  const auto r = integrate(wild, 1e-6, 1.0, QuadOptions{1e-14, 1e-14, 3});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.subdivisions, 3);
}

TEST(Quadrature, EmptyIntervalIsZero) {
  const auto r = integrate([](double) { return 1.0; }, 2.0, 2.0);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.converged);
}

TEST(Quadrature, ResultsAccumulate) {
  QuadResult a{1.0, 0.1, 21, 0, true};
  const QuadResult b{2.0, 0.2, 42, 1, false};
  a += b;
  EXPECT_EQ(a.value, 3.0);
  EXPECT_NEAR(a.abs_error, 0.3, 1e-15);
  EXPECT_EQ(a.evaluations, 63);
  EXPECT_EQ(a.subdivisions, 1);
  EXPECT_FALSE(a.converged);
}

}  // namespace
