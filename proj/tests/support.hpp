#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "model.hpp"
#include "model_file.hpp"

namespace testing {

inline const std::vector<double> kRefAlpha = {0.0000, 0.0007, 0.9961,
                                                0.0000, 0.0001, 0.0031};

inline const std::vector<std::vector<double>> kRefT = {
    {-5.6546, 0.0000, 0.0000, 0.0000, 0.0000, 0.0000},
    {0.6066, -5.6847, 0.0000, 0.0166, 0.0089, 5.0526},
    {0.2156, 4.3616, -5.6485, 0.9162, 0.1424, 0.0126},
    {5.6247, 0.0000, 0.0000, -5.6786, 0.0000, 0.0000},
    {0.0107, 0.0000, 0.0000, 5.7247, -5.7420, 0.0000},
    {0.0136, 0.0000, 0.0000, 0.0024, 5.7022, -5.7183}};

inline dualdiv::ModelParams reference_params(double d, double sigma,
                                         double lambda) {
  dualdiv::ModelParams p;
  p.drift_d = d;
  p.sigma = sigma;
  p.lambda = lambda;
  p.q = 0.05;
  p.alpha = kRefAlpha;
  p.T = kRefT;
  return p;
}

inline dualdiv::LevyModel reference_model(double d, double sigma, double lambda) {
  return dualdiv::validate_model(reference_params(d, sigma, lambda));
}

inline dualdiv::ModelParams exp_params(double d = 2.0, double sigma = 0.0,
                                       double lambda = 1.0, double rate = 1.0,
                                       double q = 0.05) {
  dualdiv::ModelParams p;
  p.drift_d = d;
  p.sigma = sigma;
  p.lambda = lambda;
  p.q = q;
  p.alpha = {1.0};
  p.T = {{-rate}};
  return p;
}

inline dualdiv::LevyModel exp_model() {
  return dualdiv::validate_model(exp_params());
}

// Roots of psi(s) = q for one exponential phase of rate g and sigma = 0:
// (d s - q)(g + s) - lambda s = 0.
inline std::pair<double, double> exp_roots(double d, double lambda, double g,
                                           double q) {
  const double a = d;
  const double b = d * g - q - lambda;
  const double c = -q * g;
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  // Stable quadratic formula.
  const double t = -0.5 * (b + std::copysign(disc, b));
  const double r1 = t / a;
  const double r2 = c / t;
  return {std::max(r1, r2), std::min(r1, r2)};
}

inline std::string model_path(const std::string& name) {
  return std::string(DUALDIV_MODEL_DIR) + "/" + name;
}

// Random valid phase-type law with m phases: diagonal rates in [0.5, 5],
// a random split of each row's outflow between exits and other phases.
inline dualdiv::ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> phases(1, 4);
  const int m = phases(rng);
  dualdiv::ModelParams p;
  p.alpha.assign(static_cast<std::size_t>(m), 0.0);
  double total = 0.0;
  for (auto& a : p.alpha) total += (a = 0.1 + u(rng));
  const double mass = u(rng) < 0.3 ? 0.8 + 0.2 * u(rng) : 1.0;
  for (auto& a : p.alpha) a *= mass / total;
  p.T.assign(static_cast<std::size_t>(m),
             std::vector<double>(static_cast<std::size_t>(m), 0.0));
  for (int i = 0; i < m; ++i) {
    const double rate = 0.5 + 4.5 * u(rng);
    p.T[i][i] = -rate;
    const double exit_share = m == 1 ? 1.0 : 0.3 + 0.7 * u(rng);
    std::vector<double> w(static_cast<std::size_t>(m), 0.0);
    double wsum = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != i) wsum += (w[j] = u(rng) + 1e-3);
    for (int j = 0; j < m; ++j)
      if (j != i) p.T[i][j] = rate * (1.0 - exit_share) * w[j] / wsum;
  }
  p.sigma = u(rng) < 0.5 ? 0.0 : 0.3 + 1.5 * u(rng);
  p.drift_d = 0.5 + 3.0 * u(rng);
  p.lambda = 0.3 + 3.0 * u(rng);
  p.q = 0.02 + 0.2 * u(rng);
  return p;
}

}  // namespace testing
