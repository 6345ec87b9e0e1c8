#pragma once

#include <vector>

#include "policy.hpp"

namespace dualdiv {

struct ValueCurve {
  std::vector<double> xs;
  std::vector<double> vs;
  std::vector<double> dvs;
  Policy policy;
  double beta = 0.0;
};

// v_{c1,c2}(x) for an arbitrary admissible policy, and its x-derivative
// (left derivative at x = c2).
double value_at(const ScaleBasis& basis, double beta, Policy policy, double x);
double value_deriv_at(const ScaleBasis& basis, double beta, Policy policy,
                      double x);

// Optimal value -R(c2* - x) + gamma Z(c2* - x), valid on all of [0, inf)
// because G = 0 at the optimum.
double optimal_value_at(const ScaleBasis& basis, const SolveReport& report,
                        double x);
// Z(c2* - x) - gamma q W(c2* - x); at x = c2* this is the left limit.
double optimal_value_deriv(const ScaleBasis& basis, const SolveReport& report,
                           double x);

ValueCurve optimal_curve(const ScaleBasis& basis, const SolveReport& report,
                         const std::vector<double>& xs);
ValueCurve policy_curve(const ScaleBasis& basis, double beta, Policy policy,
                        const std::vector<double>& xs);

// n evenly spaced points on [lo, hi], both ends included.
std::vector<double> linspace(double lo, double hi, int n);
// 400 points on [0, 1.5 c2].
std::vector<double> default_grid(double c2);

// Zero-cost benchmark: reflection at a*, where Zbar(a*) = mu / q.
class Benchmark {
 public:
  explicit Benchmark(const ScaleBasis& basis);

  double a_star() const { return a_star_; }
  // mu/q - Zbar(a* - x) if mu > 0, else x.
  double value(double x) const;
  double deriv(double x) const;

 private:
  const ScaleBasis* basis_;
  double a_star_ = 0.0;
  bool positive_drift_ = false;
};

struct SweepRow {
  double beta = 0.0;
  SolveReport report;
  std::vector<double> vs;
};

struct BetaSweep {
  double a_star = 0.0;
  std::vector<double> xs;
  std::vector<double> vhat;
  std::vector<SweepRow> rows;
};

// Solves for each beta (positive, strictly descending) and evaluates the
// optimal value on xs together with the benchmark.
BetaSweep beta_sweep(const ScaleBasis& basis, const std::vector<double>& betas,
                     const std::vector<double>& xs,
                     const SolveOptions& options = {});

}  // namespace dualdiv
