#include "valuation.hpp"

#include <cmath>

#include "error.hpp"

namespace dualdiv {

namespace {

void check_x(double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    fail(ErrorCode::Domain, "surplus level x must be finite and >= 0");
}

}  // namespace

double value_at(const ScaleBasis& basis, double beta, Policy policy, double x) {
  check_x(x);
  const PolicyTerms t = policy_terms(basis, beta, policy.c1, policy.c2);
  if (x >= policy.c2) return x - policy.c1 - beta + t.vbar;
  if (x == 0.0) return 0.0;  // ruin is immediate at zero
  const double y = policy.c2 - x;
  const double G_over_W = t.G_norm * basis.Z_over_W(policy.c2);
  return -basis.R(y) + t.gamma * basis.Z(y) - G_over_W * basis.W(y);
}

double value_deriv_at(const ScaleBasis& basis, double beta, Policy policy,
                      double x) {
  check_x(x);
  if (x > policy.c2) {
    policy_terms(basis, beta, policy.c1, policy.c2);
    return 1.0;
  }
  const PolicyTerms t = policy_terms(basis, beta, policy.c1, policy.c2);
  const double y = policy.c2 - x;
  const double G_over_W = t.G_norm * basis.Z_over_W(policy.c2);
  return basis.Z(y) - t.gamma * basis.q() * basis.W(y) +
         G_over_W * basis.W_prime(y);
}

double optimal_value_at(const ScaleBasis& basis, const SolveReport& report,
                        double x) {
  check_x(x);
  if (x == 0.0) return 0.0;  // exact; the closed form leaves the G residual
  const double y = report.policy.c2 - x;
  return -basis.R(y) + report.gamma * basis.Z(y);
}

double optimal_value_deriv(const ScaleBasis& basis, const SolveReport& report,
                           double x) {
  check_x(x);
  const double y = report.policy.c2 - x;
  if (y < 0.0) return 1.0;
  return basis.Z(y) - report.gamma * basis.q() * basis.W(y);
}

ValueCurve optimal_curve(const ScaleBasis& basis, const SolveReport& report,
                         const std::vector<double>& xs) {
  ValueCurve c;
  c.xs = xs;
  c.policy = report.policy;
  c.beta = report.beta;
  c.vs.reserve(xs.size());
  c.dvs.reserve(xs.size());
  for (double x : xs) {
    c.vs.push_back(optimal_value_at(basis, report, x));
    c.dvs.push_back(optimal_value_deriv(basis, report, x));
  }
  return c;
}

ValueCurve policy_curve(const ScaleBasis& basis, double beta, Policy policy,
                        const std::vector<double>& xs) {
  ValueCurve c;
  c.xs = xs;
  c.policy = policy;
  c.beta = beta;
  c.vs.reserve(xs.size());
  c.dvs.reserve(xs.size());
  for (double x : xs) {
    c.vs.push_back(value_at(basis, beta, policy, x));
    c.dvs.push_back(value_deriv_at(basis, beta, policy, x));
  }
  return c;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1 || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
    fail(ErrorCode::InvalidArgument, "linspace needs n >= 1 and lo <= hi");
  if (n == 1) return {lo};
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + i * h;
  xs.back() = hi;
  return xs;
}

std::vector<double> default_grid(double c2) { return linspace(0.0, 1.5 * c2, 400); }

Benchmark::Benchmark(const ScaleBasis& basis) : basis_(&basis) {
  const double target = basis.mu() / basis.q();
  positive_drift_ = basis.mu() > 0.0;
  if (!positive_drift_) return;
  double lo = 0.0;
  double hi = std::max(1.0, target);
  int expand = 0;
  while (!(basis.Zbar(hi) > target)) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 60) fail(ErrorCode::Bracket, "no bracket for a*");
  }
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (basis.Zbar(mid) < target ? lo : hi) = mid;
  }
  a_star_ = 0.5 * (lo + hi);
}

double Benchmark::value(double x) const {
  check_x(x);
  if (!positive_drift_) return x;
  return basis_->mu() / basis_->q() - basis_->Zbar(a_star_ - x);
}

double Benchmark::deriv(double x) const {
  check_x(x);
  if (!positive_drift_) return 1.0;
  return basis_->Z(a_star_ - x);
}

BetaSweep beta_sweep(const ScaleBasis& basis, const std::vector<double>& betas,
                     const std::vector<double>& xs,
                     const SolveOptions& options) {
  if (betas.empty()) fail(ErrorCode::InvalidArgument, "empty beta list");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0))
      fail(ErrorCode::InvalidArgument, "betas must be positive");
    if (i > 0 && !(betas[i] < betas[i - 1]))
      fail(ErrorCode::InvalidArgument, "betas must be strictly descending");
  }
  BetaSweep out;
  const Benchmark bench(basis);
  out.a_star = bench.a_star();
  out.xs = xs;
  out.vhat.reserve(xs.size());
  for (double x : xs) out.vhat.push_back(bench.value(x));
  for (double beta : betas) {
    SweepRow row;
    row.beta = beta;
    row.report = solve(basis, beta, options);
    row.vs.reserve(xs.size());
    for (double x : xs) row.vs.push_back(optimal_value_at(basis, row.report, x));
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace dualdiv
