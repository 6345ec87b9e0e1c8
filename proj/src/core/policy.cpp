#include "policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace dualdiv {

namespace {

constexpr double kMinDenominator = 1e-14;
constexpr double kHTolerance = 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_order(double c1, double c2) {
  if (!(c1 >= 0.0) || !(c2 > c1) || !std::isfinite(c2)) {
    std::ostringstream os;
    os << "policy needs 0 <= c1 < c2 < inf (c1 = " << c1 << ", c2 = " << c2
       << ")";
    fail(ErrorCode::Domain, os.str());
  }
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    fail(ErrorCode::Domain, "transaction cost beta must be > 0");
}

// Runs fn(i) for i in [0, n) over up to `threads` workers.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double safe_objective(const ScaleBasis& basis, double beta, double c1,
                      double c2) {
  if (!(c1 >= 0.0) || !(c2 > c1)) return -kInf;
  try {
    return objective(basis, beta, c1, c2);
  } catch (const Error&) {
    return -kInf;
  }
}

// G / Z(c2) and G / Z(c2) - H / (q W(c2 - c1)). The normalised G and H are
// nearly parallel near the optimum; their difference does not involve vbar
// and is evaluated directly, which keeps the Newton system well conditioned.
struct Residual {
  bool ok = false;
  double G = 0.0;
  double H = 0.0;
  double norm() const { return ok ? std::hypot(G, H) : kInf; }
};

Residual residual(const ScaleBasis& basis, double beta, double c1, double c2) {
  if (!(c1 >= 0.0) || !(c2 > c1)) return {};
  try {
    const PolicyTerms t = policy_terms(basis, beta, c1, c2);
    return {true, t.G_norm,
            basis.Wbar_over_W(c2 - c1) - basis.R_over_Z(c2)};
  } catch (const Error&) {
    return {};
  }
}

// G(0, c2) / Z(c2). With c1 = 0 the controlled process is ruined at once
// after each payment, so vbar = 0 and gamma = c2 - beta - mu/q.
double corner_G(const ScaleBasis& basis, double beta, double c2) {
  return (c2 - beta - basis.mu() / basis.q()) - basis.R_over_Z(c2);
}

struct LocalResult {
  enum class Kind { Interior, Corner, Failed } kind = Kind::Failed;
  Policy policy;
  int iterations = 0;
  std::string why;
};

// 1-D solve of G(0, c2) = 0. G(0, .) starts at -beta (bounded variation) or
// -inf (unbounded), decreases until c2 = beta + mu/q and increases after, so
// the root is unique.
double corner_root(const ScaleBasis& basis, double beta, double ceiling,
                   int& iterations) {
  double lo = 1e-9 * std::max(1.0, ceiling);
  double hi = std::max(ceiling, 2.0 * lo);
  if (!(corner_G(basis, beta, lo) < 0.0))
    fail(ErrorCode::Bracket, "G(0, c2) is not negative near c2 = 0");
  int expand = 0;
  while (!(corner_G(basis, beta, hi) > 0.0)) {
    hi *= 2.0;
    if (++expand > 60)
      fail(ErrorCode::Bracket, "G(0, c2) has no sign change below the ceiling");
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (corner_G(basis, beta, mid) < 0.0 ? lo : hi) = mid;
    ++iterations;
  }
  // Safeguarded Newton; d/dc2 [G/Z] = q (R/Z) / (Z/W) at c1 = 0.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double fx = corner_G(basis, beta, x);
    if (fx == 0.0) break;
    (fx < 0.0 ? lo : hi) = x;
    const double dfx = basis.q() * basis.R_over_Z(x) / basis.Z_over_W(x);
    double next = x - fx / dfx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    ++iterations;
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-15 * x) break;
  }
  return x;
}

// Compass search on the objective: a globally convergent way to walk from an
// arbitrary seed into the basin of the maximiser before Newton takes over.
Policy pattern_ascent(const ScaleBasis& basis, double beta, Policy p,
                      double step, double min_step, int& iterations) {
  double best = safe_objective(basis, beta, p.c1, p.c2);
  static constexpr double kDirs[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                         {1, 1},  {-1, -1}, {1, -1}, {-1, 1}};
  int evals = 0;
  while (step > min_step && evals < 20000) {
    bool moved = false;
    for (const auto& d : kDirs) {
      Policy cand{std::max(0.0, p.c1 + step * d[0]), p.c2 + step * d[1]};
      const double v = safe_objective(basis, beta, cand.c1, cand.c2);
      ++evals;
      if (v > best) {
        best = v;
        p = cand;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
    ++iterations;
  }
  return p;
}

// Damped Newton on the residual above with a finite-difference
// Jacobian. Two pushes into c1 < 0 hand over to the corner solve.
LocalResult newton(const ScaleBasis& basis, double beta, Policy p,
                   int max_iterations) {
  LocalResult out;
  int pushes = 0;
  Residual r = residual(basis, beta, p.c1, p.c2);
  if (!r.ok) {
    out.why = "Newton seed is not evaluable";
    return out;
  }
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    if (std::max(std::abs(r.G), std::abs(r.H)) <= 1e-15 * (1.0 + p.c2)) {
      out.kind = LocalResult::Kind::Interior;
      out.policy = p;
      return out;
    }
    // Jacobian by central differences, one-sided near c1 = 0.
    const double h1 = 1e-6 * std::max(1.0, p.c1);
    const double h2 = 1e-6 * std::max(1.0, p.c2);
    const double c1m = std::max(0.0, p.c1 - h1);
    const double c1p = p.c1 + h1;
    const Residual r1p = residual(basis, beta, c1p, p.c2);
    const Residual r1m = residual(basis, beta, c1m, p.c2);
    const Residual r2p = residual(basis, beta, p.c1, p.c2 + h2);
    const Residual r2m = residual(basis, beta, p.c1, p.c2 - h2);
    if (!r1p.ok || !r1m.ok || !r2p.ok || !r2m.ok) {
      out.why = "Jacobian stencil left the admissible region";
      return out;
    }
    const double j11 = (r1p.G - r1m.G) / (c1p - c1m);
    const double j21 = (r1p.H - r1m.H) / (c1p - c1m);
    const double j12 = (r2p.G - r2m.G) / (2.0 * h2);
    const double j22 = (r2p.H - r2m.H) / (2.0 * h2);
    const double det = j11 * j22 - j12 * j21;
    const double scale = std::max({std::abs(j11), std::abs(j12), std::abs(j21),
                                   std::abs(j22)});
    double d1 = 0.0;
    double d2 = 0.0;
    if (std::abs(det) > 1e-14 * scale * scale) {
      d1 = -(j22 * r.G - j12 * r.H) / det;
      d2 = -(-j21 * r.G + j11 * r.H) / det;
    } else {
      // Near-singular Jacobian: projected gradient ascent step.
      const auto [g1, g2] = objective_grad(basis, beta, p.c1, p.c2);
      const double gn = std::hypot(g1, g2);
      if (gn == 0.0) {
        out.why = "singular Jacobian at a flat point";
        return out;
      }
      const double len = 1e-2 * std::max(1.0, p.c2);
      d1 = len * g1 / gn;
      d2 = len * g2 / gn;
    }

    double t = 1.0;
    bool accepted = false;
    bool pushed = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      Policy cand{p.c1 + t * d1, p.c2 + t * d2};
      if (cand.c1 < 0.0) {
        pushed = true;
        cand.c1 = 0.0;
      }
      if (!(cand.c2 > cand.c1)) continue;
      const Residual rc = residual(basis, beta, cand.c1, cand.c2);
      if (rc.ok && rc.norm() < (1.0 - 1e-4 * t) * r.norm()) {
        const double moved = std::hypot(cand.c1 - p.c1, cand.c2 - p.c2);
        p = cand;
        r = rc;
        accepted = true;
        if (moved <= 1e-14 * (1.0 + p.c2)) {
          out.kind = LocalResult::Kind::Interior;
          out.policy = p;
          return out;
        }
        break;
      }
    }
    if (pushed && ++pushes >= 2) {
      out.kind = LocalResult::Kind::Corner;
      out.policy = p;
      return out;
    }
    if (!accepted) {
      // No decrease possible: converged to rounding level or stuck.
      out.kind = r.norm() <= 1e-10 ? LocalResult::Kind::Interior
                                   : LocalResult::Kind::Failed;
      out.policy = p;
      if (out.kind == LocalResult::Kind::Failed)
        out.why = "line search stalled";
      return out;
    }
  }
  out.why = "iteration cap reached";
  out.policy = p;
  return out;
}

SolveReport make_report(const ScaleBasis& basis, double beta, Policy p,
                        bool corner, int iterations, double ceiling) {
  SolveReport rep;
  rep.policy = p;
  rep.beta = beta;
  rep.corner = corner;
  rep.iterations = iterations;
  rep.ceiling = ceiling;
  const PolicyTerms t = policy_terms(basis, beta, p.c1, p.c2);
  rep.vbar = t.vbar;
  rep.objective = t.vbar - p.c1;
  rep.gamma = t.gamma;
  rep.G_residual = G_val(basis, beta, p.c1, p.c2);
  rep.H_value = H_val(basis, beta, p.c1, p.c2);
  return rep;
}

// Local stage shared by solve() and solve_from(): compass ascent, then
// Newton or the corner solve.
SolveReport local_solve(const ScaleBasis& basis, double beta, Policy seed,
                        double step, double ceiling, int max_iterations) {
  int iterations = 0;
  Policy p = pattern_ascent(basis, beta, seed, step,
                            1e-4 * std::max(1.0, seed.c2), iterations);

  auto corner_route = [&]() -> std::pair<bool, SolveReport> {
    const double c2 = corner_root(basis, beta, ceiling, iterations);
    SolveReport rep = make_report(basis, beta, {0.0, c2}, true, iterations,
                                  ceiling);
    return {rep.H_value >= -kHTolerance, rep};
  };

  if (p.c1 == 0.0) {
    auto [ok, rep] = corner_route();
    if (ok) return rep;
    // H(0, c2*) < 0: the objective still rises in c1, so the maximiser is
    // interior; climb again from just inside the c1 > 0 region.
    const double c2 = rep.policy.c2;
    p = pattern_ascent(basis, beta, {1e-3 * c2, c2}, 0.05 * c2,
                       1e-4 * std::max(1.0, c2), iterations);
    if (p.c1 == 0.0)
      fail(ErrorCode::NoConvergence,
           "H(0, c2*) < 0 but the ascent returned to the corner");
  }

  LocalResult lr = newton(basis, beta, p, max_iterations);
  iterations += lr.iterations;
  if (lr.kind == LocalResult::Kind::Corner) {
    auto [ok, rep] = corner_route();
    if (ok) return rep;
    fail(ErrorCode::NoConvergence,
         "Newton pushed c1 below zero but H(0, c2*) < 0 at the corner");
  }
  if (lr.kind == LocalResult::Kind::Failed) {
    std::ostringstream os;
    os << "Newton on (G, H) failed near (" << lr.policy.c1 << ", "
       << lr.policy.c2 << "): " << lr.why;
    fail(ErrorCode::NoConvergence, os.str());
  }
  return make_report(basis, beta, lr.policy, false, iterations, ceiling);
}

}  // namespace

PolicyTerms policy_terms(const ScaleBasis& basis, double beta, double c1,
                         double c2) {
  check_order(c1, c2);
  const double a = c2 - c1;
  const double up = basis.Z_gap(a, c2);
  const double r_gap = basis.R_gap(a, c2);
  const double k = a - beta - basis.mu() / basis.q();
  PolicyTerms t;
  t.f = -r_gap + k * up;
  t.g = 1.0 - up;
  if (!(t.g >= kMinDenominator)) {
    std::ostringstream os;
    os << "g(c1, c2) = " << t.g << " is degenerate at (" << c1 << ", " << c2
       << ")";
    fail(ErrorCode::DegenerateDenominator, os.str());
  }
  t.vbar = t.f / t.g;
  t.gamma = t.vbar + k;
  t.G_norm = t.gamma - basis.R_over_Z(c2);
  t.H_norm = t.gamma - basis.Wbar_over_W(a);
  return t;
}

double f_val(const ScaleBasis& basis, double beta, double c1, double c2) {
  check_beta(beta);
  check_order(c1, c2);
  const double a = c2 - c1;
  const double k = a - beta - basis.mu() / basis.q();
  return -basis.R_gap(a, c2) + k * basis.Z_gap(a, c2);
}

double g_val(const ScaleBasis& basis, double c1, double c2) {
  check_order(c1, c2);
  return 1.0 - basis.Z_gap(c2 - c1, c2);
}

double vbar(const ScaleBasis& basis, double beta, double c1, double c2) {
  check_beta(beta);
  return policy_terms(basis, beta, c1, c2).vbar;
}

double gamma_val(const ScaleBasis& basis, double beta, double c1, double c2) {
  check_beta(beta);
  return policy_terms(basis, beta, c1, c2).gamma;
}

double G_val(const ScaleBasis& basis, double beta, double c1, double c2) {
  check_beta(beta);
  const PolicyTerms t = policy_terms(basis, beta, c1, c2);
  return t.gamma * basis.Z(c2) - basis.R(c2);
}

double H_val(const ScaleBasis& basis, double beta, double c1, double c2) {
  check_beta(beta);
  const PolicyTerms t = policy_terms(basis, beta, c1, c2);
  const double a = c2 - c1;
  return basis.q() * (t.gamma * basis.W(a) - basis.Wbar(a));
}

double objective(const ScaleBasis& basis, double beta, double c1, double c2) {
  check_beta(beta);
  try {
    return policy_terms(basis, beta, c1, c2).vbar - c1;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateDenominator) return -kInf;
    throw;
  }
}

std::pair<double, double> objective_grad(const ScaleBasis& basis, double beta,
                                         double c1, double c2) {
  check_beta(beta);
  const PolicyTerms t = policy_terms(basis, beta, c1, c2);
  const double a = c2 - c1;
  const double G_over_Wb = t.G_norm * basis.Z_over_W(c2);
  const double Wa = basis.W(a);
  const double Wpa = basis.W_prime(a);
  const double H = basis.q() * (t.gamma * Wa - basis.Wbar(a));
  const double d_c2 =
      -G_over_Wb * (Wpa - Wa * basis.W_log_derivative(c2)) / t.g;
  const double d_c1 = (-H + G_over_Wb * Wpa) / t.g;
  return {d_c1, d_c2};
}

double search_ceiling(const ScaleBasis& basis, double beta) {
  check_beta(beta);
  double C = 10.0 * (std::abs(basis.mu()) / basis.q() + beta + 1.0);
  constexpr int kEdgeSamples = 16;
  for (int doubling = 0; doubling < 30; ++doubling, C *= 2.0) {
    bool ok = true;
    for (int k = 0; k <= kEdgeSamples && ok; ++k) {
      const double c1 = 0.5 * C * k / kEdgeSamples;
      const Residual r = residual(basis, beta, c1, C);
      ok = r.ok && r.G > 0.0;
    }
    if (ok) return C;
  }
  fail(ErrorCode::Bracket, "search ceiling expansion failed");
}

Surface objective_surface(const ScaleBasis& basis, double beta, double ceiling,
                          int n, int threads) {
  check_beta(beta);
  if (n < 2) fail(ErrorCode::InvalidArgument, "surface needs n >= 2");
  Surface s;
  s.ceiling = ceiling;
  s.n = n;
  s.values.assign(static_cast<std::size_t>(n) * n,
                  std::numeric_limits<double>::quiet_NaN());
  const double h = ceiling / (n - 1);
  parallel_for(n, threads, [&](int i) {
    for (int j = i + 1; j < n; ++j)
      s.values[static_cast<std::size_t>(i) * n + j] =
          safe_objective(basis, beta, i * h, j * h);
  });
  return s;
}

SolveReport solve_from(const ScaleBasis& basis, double beta, Policy seed,
                       double ceiling, const SolveOptions& options) {
  check_beta(beta);
  check_order(seed.c1, seed.c2);
  return local_solve(basis, beta, seed, ceiling / 8.0, ceiling,
                     options.max_iterations);
}

SolveReport solve(const ScaleBasis& basis, double beta,
                  const SolveOptions& options) {
  check_beta(beta);
  const double C = search_ceiling(basis, beta);

  // Stage 1: coarse grid over the triangle, then a few zoomed re-grids around
  // the best cell.
  const int n = std::max(options.grid, 4);
  double h = C / n;
  Policy best{0.0, h};
  double best_val = -kInf;
  double best_interior = -kInf;
  {
    std::vector<double> vals(static_cast<std::size_t>(n) * (n + 1), -kInf);
    parallel_for(n, options.threads, [&](int i) {
      for (int j = i + 1; j <= n; ++j)
        vals[static_cast<std::size_t>(i) * (n + 1) + j] =
            safe_objective(basis, beta, i * h, j * h);
    });
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        const double v = vals[static_cast<std::size_t>(i) * (n + 1) + j];
        if (v > best_val) {
          best_val = v;
          best = {i * h, j * h};
        }
        if (i > 0) best_interior = std::max(best_interior, v);
      }
    }
  }
  const bool corner_seed = !(best_interior > 0.0);
  if (!corner_seed) {
    const int zn = std::max(options.zoom_grid, 4);
    for (int level = 0; level < options.zoom_levels; ++level) {
      const double lo1 = std::max(0.0, best.c1 - 2.0 * h);
      const double lo2 = std::max(lo1, best.c2 - 2.0 * h);
      const double span = 4.0 * h;
      const double hz = span / zn;
      for (int i = 0; i <= zn; ++i) {
        for (int j = 0; j <= zn; ++j) {
          const double c1 = lo1 + i * hz;
          const double c2 = lo2 + j * hz;
          const double v = safe_objective(basis, beta, c1, c2);
          if (v > best_val) {
            best_val = v;
            best = {c1, c2};
          }
        }
      }
      h = hz;
    }
  } else {
    best = {0.0, best.c2};
  }

  SolveReport rep =
      local_solve(basis, beta, best, h, C, options.max_iterations);
  if (rep.objective < best_val - 1e-9) {
    std::ostringstream os;
    os << "local solve ended at objective " << rep.objective
       << " below the grid value " << best_val;
    fail(ErrorCode::NoConvergence, os.str());
  }

  if (options.starts > 0) {
    const int side = static_cast<int>(std::ceil(std::sqrt(options.starts)));
    int launched = 0;
    for (int i = 0; i < side && launched < options.starts; ++i) {
      for (int j = 0; j < side && launched < options.starts; ++j, ++launched) {
        const Policy seed{C * (i + 0.5) / (2.0 * side),
                          C * (i + 0.5) / (2.0 * side) +
                              C * (j + 1.0) / (2.0 * side)};
        const SolveReport other = solve_from(basis, beta, seed, C, options);
        const double d = std::max(std::abs(other.policy.c1 - rep.policy.c1),
                                  std::abs(other.policy.c2 - rep.policy.c2));
        if (d > options.agreement) {
          std::ostringstream os;
          os << "multi-start disagreement: (" << rep.policy.c1 << ", "
             << rep.policy.c2 << ") vs (" << other.policy.c1 << ", "
             << other.policy.c2 << ") from seed (" << seed.c1 << ", "
             << seed.c2 << ")";
          fail(ErrorCode::NoConvergence, os.str());
        }
      }
    }
  }
  return rep;
}

}  // namespace dualdiv
