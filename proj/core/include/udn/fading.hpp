#pragma once

#include "udn/rng.hpp"

namespace udn {

enum class SchedulerKind { RoundRobin, ProportionalFair };
enum class FadingKind { Rayleigh, RicianDistanceDependent };

const char* to_string(SchedulerKind s);
const char* to_string(FadingKind f);

/// P[max of k unit-mean exponentials > y] = 1 - (1 - e^-y)^k.
double pf_gain_ccdf(double y, int k);

struct PfDraw {
  double gain;
  int index;  // which of the k candidates won
};

/// Draws k unit-mean exponential gains and returns the largest.
PfDraw sample_pf_gain(int k, Rng& rng);

/// K-factor in dB for a link of length r metres: 13 - 0.03 r.
double rician_k_factor_db(double r_m);

/// Unit-mean exponential power gain.
double sample_rayleigh(Rng& rng);

/// Unit-mean Rician power gain with linear K-factor k.
double sample_rician(double k_linear, Rng& rng);

/// Power gain for a link of length r metres. r is ignored for Rayleigh.
double sample_fading(FadingKind kind, double r_m, Rng& rng);

}  // namespace udn
