#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "model.hpp"
#include "policy.hpp"

namespace dualdiv {

using Rng = std::mt19937_64;

struct SimConfig {
  std::int64_t paths = 10000;
  std::uint64_t seed = 0;
  double dt = 1e-3;             // Euler step, only used when sigma > 0
  double discount_floor = 1e-8; // stop a path once e^{-qt} drops below this
  int threads = 1;
};

struct SimResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t paths = 0;
  double truncated_fraction = 0.0;
  std::uint64_t seed = 0;
};

// Generator for path `index`; depends only on (seed, index), so results do
// not change with the thread count.
Rng path_rng(std::uint64_t seed, std::uint64_t index);

// Uniform on (0, 1].
double uniform_open0(Rng& rng);

// Absorption time of the phase-type chain, 0 on the deficit atom.
double sample_phase_type(Rng& rng, const PhaseTypeDist& dist);

// Discounted dividends net of fixed costs under the (c1, c2) policy, started
// at x, until ruin.
SimResult simulate_value(const LevyModel& model, Policy policy, double beta,
                         double x, const SimConfig& cfg);

// (E_x[e^{-q tau_b^+}; tau_b^+ < tau_0^-], E_x[e^{-q tau_0^-}; tau_0^- < tau_b^+]).
std::pair<SimResult, SimResult> simulate_exit(const LevyModel& model, double x,
                                              double b, const SimConfig& cfg);

// Mean and standard error from per-path samples, summed pairwise.
SimResult summarize(const std::vector<double>& samples, std::int64_t truncated,
                    std::uint64_t seed);

}  // namespace dualdiv
