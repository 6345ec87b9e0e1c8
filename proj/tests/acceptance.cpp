// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "format.hpp"
#include "simulate.hpp"
#include "support.hpp"
#include "valuation.hpp"

namespace fs = std::filesystem;
using dualdiv::ScaleBasis;

namespace {

constexpr double kBeta = 4.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) { return dualdiv::format_number(v); }

struct Case {
  const char* name;
  double d, sigma, lambda;
};

const Case kCase1[] = {{"case1_sigma0", 2.0, 0.0, 3.0}, {"case1_sigma1", 2.0, 1.0, 3.0}};
const Case kCase2[] = {{"case2_sigma0", 2.0, 0.0, 1.0}, {"case2_sigma1", 2.0, 1.0, 1.0}};

dualdiv::SolveReport solve16(const ScaleBasis& b) {
  dualdiv::SolveOptions opt;
  opt.starts = 16;
  opt.threads = 4;
  return dualdiv::solve(b, kBeta, opt);
}

Outcome laplace() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<dualdiv::LevyModel> models = {testing::exp_model(),
                                            testing::reference_model(2.0, 0.0, 3.0),
                                            testing::reference_model(2.0, 1.0, 3.0)};
  double worst = 0.0;
  for (const auto& m : models) {
    const ScaleBasis b(m);
    for (int k = 1; k <= 5; ++k)
      worst = std::max(worst, b.laplace_check(b.phi_q() + k));
  }
  const double t = seconds_since(t0);
  return {worst < 1e-6 && t < 1.0, "max error " + num(worst) + ", " + num(t) + " s"};
}

Outcome boundary() {
  const ScaleBasis s1(testing::reference_model(2.0, 1.0, 3.0));
  const ScaleBasis s0(testing::reference_model(2.0, 0.0, 3.0));
  double mass = 0.0;
  for (double a : testing::kRefAlpha) mass += a;
  const double e_w1 = std::abs(s1.W(0.0));
  const double e_w0 = std::abs(s0.W(0.0) - 0.5);
  const double e_d1 = std::abs(s1.W_prime(0.0) - 2.0) / 2.0;
  const double want = (0.05 + 3.0 * mass) / 4.0;
  const double e_d0 = std::abs(s0.W_prime(0.0) - want) / want;
  const bool ok = e_w1 <= 1e-9 && e_w0 <= 1e-9 && e_d1 <= 1e-6 && e_d0 <= 1e-6;
  return {ok, "W(0) errors " + num(e_w1) + ", " + num(e_w0) + "; W'(0+) rel errors " +
                  num(e_d1) + ", " + num(e_d0)};
}

Outcome closed_form() {
  const ScaleBasis b(testing::exp_model());
  const auto [phi, xi] = testing::exp_roots(2.0, 1.0, 1.0, 0.05);
  const double e_phi = std::abs(b.phi_q() - phi);
  const double e_xi = b.neg_roots().size() == 1
                          ? std::abs(b.neg_roots()[0] - dualdiv::Complex(-xi, 0.0))
                          : INFINITY;
  // The basis stores xi with positive real part; the root itself is -xi.
  // The quoted 7-digit figures are truncated, not rounded.
  const bool printed = std::abs(phi - 0.0478177) < 2e-7 && std::abs(-xi - 0.5228177) < 2e-7;
  return {e_phi <= 1e-9 && e_xi <= 1e-9 && printed,
          "Phi " + num(b.phi_q()) + " (err " + num(e_phi) + "), xi err " + num(e_xi)};
}

Outcome foc(std::vector<std::pair<std::string, dualdiv::SolveReport>>& solved) {
  bool ok = true;
  std::ostringstream os;
  for (const auto& [name, rep] : solved) {
    const bool g = std::abs(rep.G_residual) <= 1e-8;
    const bool h = rep.corner ? rep.H_value >= -1e-8 : std::abs(rep.H_value) <= 1e-8;
    ok = ok && g && h;
    os << name << " G=" << num(rep.G_residual) << " H=" << num(rep.H_value) << "; ";
  }
  os << "16-start agreement enforced by the solver";
  return {ok, os.str()};
}

Outcome qualitative(std::vector<std::pair<std::string, dualdiv::SolveReport>>& solved) {
  bool ok = true;
  std::ostringstream os;
  for (const auto& [name, rep] : solved) {
    const bool case1 = name.rfind("case1", 0) == 0;
    ok = ok && (case1 ? rep.policy.c1 > 0.0 : rep.policy.c1 == 0.0);
    os << name << " c1=" << num(rep.policy.c1) << " c2=" << num(rep.policy.c2) << "; ";
  }
  return {ok, os.str()};
}

Outcome fit() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : kCase1) {
    const ScaleBasis b(testing::reference_model(c.d, c.sigma, c.lambda));
    const auto rep = dualdiv::solve(b, kBeta);
    const double up = dualdiv::optimal_value_deriv(b, rep, rep.policy.c2);
    const double low = dualdiv::optimal_value_deriv(b, rep, rep.policy.c1);
    if (c.sigma > 0) {
      ok = ok && std::abs(up - 1.0) <= 1e-7;
    } else {
      const double want = 1.0 - rep.gamma * b.q() * b.W(0.0);
      ok = ok && std::abs(up - want) <= 1e-12 && up < 1.0;
    }
    ok = ok && std::abs(low - 1.0) <= 1e-7;
    os << c.name << " v'(c2-)=" << num(up) << " v'(c1)=" << num(low) << "; ";
  }
  return {ok, os.str()};
}

Outcome window() {
  bool ok = true;
  double worst_gap = INFINITY;
  for (const auto* set : {kCase1, kCase2})
    for (int k = 0; k < 2; ++k) {
      const ScaleBasis b(testing::reference_model(set[k].d, set[k].sigma, set[k].lambda));
      const auto rep = dualdiv::solve(b, kBeta);
      const auto cv = dualdiv::optimal_curve(b, rep, dualdiv::default_grid(rep.policy.c2));
      for (std::size_t i = 0; i < cv.xs.size(); ++i) {
        if (cv.xs[i] > rep.policy.c1 && cv.xs[i] < rep.policy.c2 && !(cv.dvs[i] < 1.0))
          ok = false;
        for (std::size_t j = 0; j < i; ++j)
          worst_gap = std::min(worst_gap,
                               cv.vs[i] - cv.vs[j] - (cv.xs[i] - cv.xs[j] - kBeta));
      }
    }
  ok = ok && worst_gap >= -1e-9;
  return {ok, "min of v(x)-v(y)-(x-y-beta) = " + num(worst_gap)};
}

Outcome monte_carlo() {
  const auto m = testing::reference_model(2.0, 0.0, 3.0);
  const ScaleBasis b(m);
  const auto rep = dualdiv::solve(b, kBeta);
  const auto& p = rep.policy;
  const double xs[4] = {0.0, p.c1, 0.5 * (p.c1 + p.c2), p.c2 - 0.1};
  dualdiv::SimConfig cfg;
  cfg.paths = 100000;
  cfg.seed = 20240601;
  cfg.threads = 1;
  int hits = 0;
  std::ostringstream os;
  const auto t0 = std::chrono::steady_clock::now();
  for (double x : xs) {
    const auto r = dualdiv::simulate_value(m, p, kBeta, x, cfg);
    const double v = dualdiv::optimal_value_at(b, rep, x);
    const bool hit = std::abs(v - r.mean) <= 3.0 * r.std_error;
    hits += hit;
    os << "x=" << num(x) << " " << num(v) << " vs " << num(r.mean) << "+-" << num(r.std_error)
       << (hit ? "" : " (miss)") << "; ";
  }
  const double t = seconds_since(t0);
  os << hits << "/4 within 3 SE, " << num(t) << " s";
  return {hits >= 3 && t < 60.0, os.str()};
}

Outcome sweep(const dualdiv::BetaSweep& sw) {
  bool ok = true;
  double prev = INFINITY;
  std::ostringstream os;
  for (std::size_t k = 0; k < sw.rows.size(); ++k) {
    double sup = 0.0;
    for (std::size_t i = 0; i < sw.xs.size(); ++i) {
      sup = std::max(sup, std::abs(sw.rows[k].vs[i] - sw.vhat[i]));
      if (k > 0 && sw.rows[k].vs[i] < sw.rows[k - 1].vs[i]) ok = false;
    }
    ok = ok && sup < prev;
    prev = sup;
    os << "beta=" << num(sw.rows[k].beta) << " sup=" << num(sup) << "; ";
  }
  const double near = std::abs(sw.rows.back().report.policy.c2 - sw.a_star);
  const double far = std::abs(sw.rows.front().report.policy.c2 - sw.a_star);
  ok = ok && near < far;
  os << "a*=" << num(sw.a_star) << ", |c2-a*| " << num(far) << " -> " << num(near);
  return {ok, os.str()};
}

Outcome corollary() {
  bool ok = true;
  std::ostringstream os;
  const std::vector<std::pair<std::string, dualdiv::LevyModel>> models = {
      {"d=3 sigma=1", testing::reference_model(3.0, 1.0, 3.0)},
      {"d=3 sigma=0", testing::reference_model(3.0, 0.0, 3.0)},
      {"expjump", testing::exp_model()}};
  for (const auto& [name, m] : models) {
    const ScaleBasis b(m);
    const auto rep = dualdiv::solve(b, kBeta);
    ok = ok && b.mu() <= 0.0 && rep.policy.c1 == 0.0;
    os << name << " mu=" << num(b.mu()) << " c1=" << num(rep.policy.c1) << "; ";
  }
  return {ok, os.str()};
}

void write_table(const fs::path& path, const std::string& header,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
    out << '\n';
  }
}

Outcome tables(const fs::path& dir, const dualdiv::BetaSweep& sw) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  for (const auto* set : {kCase1, kCase2})
    for (int k = 0; k < 2; ++k) {
      const auto& c = set[k];
      const ScaleBasis b(testing::reference_model(c.d, c.sigma, c.lambda));
      const auto rep = dualdiv::solve(b, kBeta);
      const auto surf = dualdiv::objective_surface(b, kBeta, rep.ceiling, 101, 4);
      const double h = surf.ceiling / (surf.n - 1);
      std::vector<std::vector<double>> rows;
      for (int i = 0; i < surf.n; ++i)
        for (int j = i + 1; j < surf.n; ++j)
          rows.push_back({i * h, j * h, surf.values[static_cast<std::size_t>(i) * surf.n + j]});
      written.push_back(dir / (std::string("surface_") + c.name + ".csv"));
      write_table(written.back(), "c1,c2,objective", rows);

      const auto cv = dualdiv::optimal_curve(b, rep, dualdiv::default_grid(rep.policy.c2));
      rows.clear();
      for (std::size_t i = 0; i < cv.xs.size(); ++i) rows.push_back({cv.xs[i], cv.vs[i], cv.dvs[i]});
      written.push_back(dir / (std::string("value_") + c.name + ".csv"));
      write_table(written.back(), "x,v,dv", rows);
    }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sw.xs.size(); ++i) {
    std::vector<double> row = {sw.xs[i], sw.vhat[i]};
    for (const auto& r : sw.rows) row.push_back(r.vs[i]);
    rows.push_back(row);
  }
  std::string header = "x,vhat";
  for (const auto& r : sw.rows) header += ",beta_" + num(r.beta);
  written.push_back(dir / "sweep_curves.csv");
  write_table(written.back(), header, rows);
  rows.clear();
  for (const auto& r : sw.rows) rows.push_back({r.beta, r.report.policy.c1, r.report.policy.c2});
  rows.push_back({0.0, sw.a_star, sw.a_star});
  written.push_back(dir / "sweep_levels.csv");
  write_table(written.back(), "beta,c1,c2", rows);

  bool ok = true;
  for (const auto& p : written) ok = ok && fs::exists(p) && fs::file_size(p) > 0;
  return {ok, std::to_string(written.size()) + " tables in " + dir.string()};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_tables");
  int failures = 0;
  auto report = [&](int n, const char* title, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", n, title,
                o.detail.c_str());
    std::fflush(stdout);
  };

  std::vector<std::pair<std::string, dualdiv::SolveReport>> solved;
  for (const auto* set : {kCase1, kCase2})
    for (int k = 0; k < 2; ++k) {
      try {
        const ScaleBasis b(testing::reference_model(set[k].d, set[k].sigma, set[k].lambda));
        solved.emplace_back(set[k].name, solve16(b));
      } catch (const std::exception& e) {
        std::printf("solve %s failed: %s\n", set[k].name, e.what());
      }
    }
  const bool all_solved = solved.size() == 4;

  dualdiv::BetaSweep sw;
  bool have_sweep = false;
  try {
    const ScaleBasis b(testing::reference_model(2.0, 1.0, 3.0));
    const auto probe = dualdiv::solve(b, 10.0);
    sw = dualdiv::beta_sweep(b, {10, 5, 1, 0.5, 0.1}, dualdiv::default_grid(probe.policy.c2));
    have_sweep = true;
  } catch (const std::exception& e) {
    std::printf("sweep failed: %s\n", e.what());
  }

  report(1, "Laplace identity", laplace);
  report(2, "boundary values", boundary);
  report(3, "closed-form roots", closed_form);
  report(4, "first-order conditions", [&] {
    Outcome o = foc(solved);
    o.pass = o.pass && all_solved;
    return o;
  });
  report(5, "c1 > 0 for Case 1, c1 = 0 for Case 2", [&] {
    Outcome o = qualitative(solved);
    o.pass = o.pass && all_solved;
    return o;
  });
  report(6, "fit conditions", fit);
  report(7, "slope window and dominance gap", window);
  report(8, "Monte-Carlo agreement", monte_carlo);
  report(9, "beta sweep convergence", [&] {
    return have_sweep ? sweep(sw) : Outcome{false, "no sweep"};
  });
  report(10, "mu <= 0 gives c1 = 0", corollary);
  report(11, "figure data tables", [&] {
    return have_sweep ? tables(out_dir, sw) : Outcome{false, "no sweep"};
  });
  return failures == 0 ? 0 : 1;
}
