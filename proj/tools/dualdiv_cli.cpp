// dualdiv: command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualdiv/dualdiv.h"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(dd_status s) {
  switch (s) {
    case DD_ERR_SINGULAR_RESOLVENT:
    case DD_ERR_REPEATED_ROOT:
    case DD_ERR_ROOT_COUNT:
    case DD_ERR_OVERFLOW_GUARD:
    case DD_ERR_DEGENERATE_DENOMINATOR:
    case DD_ERR_NO_CONVERGENCE:
    case DD_ERR_BRACKET:
    case DD_ERR_INTERNAL:
      return kExitNumerical;
    default:
      return kExitValidation;
  }
}

void check(dd_status s) {
  if (s == DD_OK) return;
  throw Failure{exit_code_for(s),
                std::string(dd_status_name(s)) + ": " + dd_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) {
  throw Failure{kExitValidation, msg};
}

std::string num(double v) {
  char buf[64];
  dd_format_number(v, buf, sizeof buf);
  return buf;
}

std::string jnum(double v) { return std::isfinite(v) ? num(v) : "null"; }

struct ModelDeleter {
  void operator()(dd_model* m) const { dd_model_free(m); }
};
struct BasisDeleter {
  void operator()(dd_basis* b) const { dd_basis_free(b); }
};
using ModelPtr = std::unique_ptr<dd_model, ModelDeleter>;
using BasisPtr = std::unique_ptr<dd_basis, BasisDeleter>;

// Options shared by every subcommand.
struct Common {
  std::string model_path;
  std::optional<double> q;
  std::string format = "json";
  std::string out;
  std::optional<int> threads;

  int thread_count() const {
    if (threads) return *threads;
    if (const char* env = std::getenv("DUALDIV_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
      usage_error("DUALDIV_THREADS must be a positive integer");
    }
    return 1;
  }

  ModelPtr load_model() const {
    dd_model* raw = nullptr;
    check(dd_model_load(model_path.c_str(), &raw));
    ModelPtr m(raw);
    if (q) {
      dd_model* other = nullptr;
      check(dd_model_with_q(m.get(), *q, &other));
      m.reset(other);
    }
    return m;
  }

  bool csv() const { return format == "csv"; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--model", c.model_path, "Model file")->required();
  cmd->add_option("--q", c.q, "Override the discount rate");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", c.out, "Write output to this file");
  cmd->add_option("--threads", c.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  f << text;
  if (!f) throw Failure{kExitValidation, "cannot write '" + c.out + "'"};
}

std::pair<double, double> parse_policy(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) usage_error("--policy expects c1,c2");
  try {
    std::size_t p1 = 0;
    std::size_t p2 = 0;
    const std::string a = s.substr(0, comma);
    const std::string b = s.substr(comma + 1);
    const double c1 = std::stod(a, &p1);
    const double c2 = std::stod(b, &p2);
    if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument(s);
    return {c1, c2};
  } catch (const std::exception&) {
    usage_error("--policy expects c1,c2");
  }
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t pos = 0;
      parts.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error("--x-grid expects lo:hi:step");
    }
  }
  if (parts.size() != 3) usage_error("--x-grid expects lo:hi:step");
  const double lo = parts[0];
  const double hi = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || !(hi >= lo) || !(lo >= 0.0))
    usage_error("--x-grid needs 0 <= lo <= hi and step > 0");
  const double count = std::floor((hi - lo) / step + 1e-9);
  if (count > 1e7) usage_error("--x-grid has too many points");
  std::vector<double> xs;
  for (long i = 0; i <= static_cast<long>(count); ++i) xs.push_back(lo + i * step);
  return xs;
}

std::string report_json(const dd_solve_report& r) {
  std::ostringstream os;
  os << "{\"c1\": " << jnum(r.c1) << ", \"c2\": " << jnum(r.c2)
     << ", \"vbar\": " << jnum(r.vbar) << ", \"objective\": "
     << jnum(r.objective) << ", \"gamma\": " << jnum(r.gamma)
     << ", \"G_residual\": " << jnum(r.G_residual)
     << ", \"H_value\": " << jnum(r.H_value)
     << ", \"corner\": " << (r.corner ? "true" : "false")
     << ", \"beta\": " << jnum(r.beta) << ", \"iterations\": " << r.iterations
     << "}";
  return os.str();
}

const char* kReportHeader =
    "c1,c2,vbar,objective,gamma,G_residual,H_value,corner,beta,iterations\n";

std::string report_csv_row(const dd_solve_report& r) {
  std::ostringstream os;
  os << num(r.c1) << ',' << num(r.c2) << ',' << num(r.vbar) << ','
     << num(r.objective) << ',' << num(r.gamma) << ',' << num(r.G_residual)
     << ',' << num(r.H_value) << ',' << (r.corner ? "true" : "false") << ','
     << num(r.beta) << ',' << r.iterations << '\n';
  return os.str();
}

dd_solve_options solve_options(int threads, int starts) {
  dd_solve_options o;
  dd_solve_options_default(&o);
  o.threads = threads;
  o.starts = starts;
  return o;
}

int run_solve(const Common& c, double beta, int starts, int surface_n,
              std::optional<double> surface_max) {
  ModelPtr model = c.load_model();
  dd_basis* raw = nullptr;
  check(dd_basis_create(model.get(), &raw));
  BasisPtr basis(raw);
  const dd_solve_options opts = solve_options(c.thread_count(), starts);
  dd_solve_report rep;
  check(dd_solve(basis.get(), beta, &opts, &rep));

  if (surface_n <= 0) {
    emit(c, c.csv() ? std::string(kReportHeader) + report_csv_row(rep)
                    : report_json(rep) + "\n");
    return 0;
  }
  if (surface_n < 2) usage_error("--dump-surface needs n >= 2");
  std::vector<double> values(static_cast<std::size_t>(surface_n) * surface_n);
  const double top = surface_max.value_or(rep.ceiling);
  check(dd_surface(basis.get(), beta, top, surface_n, opts.threads,
                   values.data()));
  const double h = top / (surface_n - 1);
  std::ostringstream os;
  if (c.csv()) {
    os << "c1,c2,objective\n";
    for (int i = 0; i < surface_n; ++i)
      for (int j = i + 1; j < surface_n; ++j)
        os << num(i * h) << ',' << num(j * h) << ','
           << num(values[static_cast<std::size_t>(i) * surface_n + j]) << '\n';
  } else {
    os << "{\"report\": " << report_json(rep) << ",\n \"surface\": {\"ceiling\": "
       << jnum(top) << ", \"n\": " << surface_n << ", \"values\": [";
    for (int i = 0; i < surface_n; ++i) {
      os << (i ? ",\n  [" : "\n  [");
      for (int j = 0; j < surface_n; ++j)
        os << (j ? ", " : "")
           << jnum(values[static_cast<std::size_t>(i) * surface_n + j]);
      os << ']';
    }
    os << "]}}\n";
  }
  emit(c, os.str());
  return 0;
}

int run_value(const Common& c, double beta, const std::string& policy,
              std::optional<double> x, const std::string& grid) {
  ModelPtr model = c.load_model();
  dd_basis* raw = nullptr;
  check(dd_basis_create(model.get(), &raw));
  BasisPtr basis(raw);

  std::optional<dd_solve_report> rep;
  double c1 = 0.0;
  double c2 = 0.0;
  if (policy.empty()) {
    const dd_solve_options opts = solve_options(c.thread_count(), 0);
    dd_solve_report r;
    check(dd_solve(basis.get(), beta, &opts, &r));
    rep = r;
    c1 = r.c1;
    c2 = r.c2;
  } else {
    std::tie(c1, c2) = parse_policy(policy);
  }

  std::vector<double> xs;
  if (x) {
    xs = {*x};
  } else if (!grid.empty()) {
    xs = parse_grid(grid);
  } else {
    const int n = 400;
    for (int i = 0; i < n; ++i) xs.push_back(1.5 * c2 * i / (n - 1));
  }

  std::ostringstream os;
  os << (c.csv() ? "x,v,dv\n" : "[");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = 0.0;
    double dv = 0.0;
    if (rep)
      check(dd_optimal_value(basis.get(), &*rep, xs[i], &v, &dv));
    else
      check(dd_value(basis.get(), beta, c1, c2, xs[i], &v, &dv));
    if (c.csv())
      os << num(xs[i]) << ',' << num(v) << ',' << num(dv) << '\n';
    else
      os << (i ? ",\n " : "") << "{\"x\": " << jnum(xs[i]) << ", \"v\": "
         << jnum(v) << ", \"dv\": " << jnum(dv) << '}';
  }
  if (!c.csv()) os << "]\n";
  emit(c, os.str());
  return 0;
}

std::string sim_json(const dd_sim_result& r) {
  std::ostringstream os;
  os << "{\"mean\": " << jnum(r.mean) << ", \"std_error\": "
     << jnum(r.std_error) << ", \"paths\": " << r.paths
     << ", \"seed\": " << r.seed << ", \"truncated_fraction\": "
     << jnum(r.truncated_fraction) << '}';
  return os.str();
}

int run_simulate(const Common& c, double beta, const std::string& policy,
                 double x, std::int64_t paths, std::uint64_t seed, double dt) {
  ModelPtr model = c.load_model();
  const auto [c1, c2] = parse_policy(policy);
  dd_sim_config cfg;
  dd_sim_config_default(&cfg);
  cfg.paths = paths;
  cfg.seed = seed;
  cfg.dt = dt;
  cfg.threads = c.thread_count();
  dd_sim_result r;
  check(dd_simulate_value(model.get(), c1, c2, beta, x, &cfg, &r));
  if (c.csv()) {
    std::ostringstream os;
    os << "mean,std_error,paths,seed,truncated_fraction\n"
       << num(r.mean) << ',' << num(r.std_error) << ',' << r.paths << ','
       << r.seed << ',' << num(r.truncated_fraction) << '\n';
    emit(c, os.str());
  } else {
    emit(c, sim_json(r) + "\n");
  }
  return 0;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error("--betas expects a comma-separated list of numbers");
    }
  }
  if (out.empty()) usage_error("--betas is empty");
  return out;
}

int run_sweep(const Common& c, const std::string& betas_arg) {
  ModelPtr model = c.load_model();
  dd_basis* raw = nullptr;
  check(dd_basis_create(model.get(), &raw));
  BasisPtr basis(raw);
  const std::vector<double> betas = parse_list(betas_arg);
  const dd_solve_options opts = solve_options(c.thread_count(), 0);
  std::vector<dd_solve_report> reports(betas.size());
  check(dd_beta_sweep(basis.get(), betas.data(), betas.size(), &opts,
                      reports.data()));
  double a_star = 0.0;
  check(dd_benchmark(basis.get(), nullptr, 0, &a_star, nullptr));

  std::ostringstream os;
  if (c.csv()) {
    os << "beta,c1,c2\n";
    for (const auto& r : reports)
      os << num(r.beta) << ',' << num(r.c1) << ',' << num(r.c2) << '\n';
    os << num(0.0) << ',' << num(a_star) << ',' << num(a_star) << '\n';
  } else {
    os << "[";
    for (std::size_t i = 0; i < reports.size(); ++i)
      os << (i ? ",\n " : "") << "{\"beta\": " << jnum(reports[i].beta)
         << ", \"c1\": " << jnum(reports[i].c1) << ", \"c2\": "
         << jnum(reports[i].c2) << '}';
    os << ",\n {\"beta\": " << jnum(0.0) << ", \"c1\": " << jnum(a_star)
       << ", \"c2\": " << jnum(a_star) << "}]\n";
  }
  emit(c, os.str());
  return 0;
}

int run_check(const Common& c) {
  ModelPtr model = c.load_model();
  dd_basis* raw = nullptr;
  check(dd_basis_create(model.get(), &raw));
  BasisPtr basis(raw);
  size_t count = 0;
  check(dd_check(basis.get(), nullptr, 0, &count));
  std::vector<dd_check_row> rows(count);
  check(dd_check(basis.get(), rows.data(), rows.size(), &count));

  dd_basis_info info;
  check(dd_basis_info_get(basis.get(), &info));
  std::vector<double> xr(info.neg_root_count);
  std::vector<double> xi(info.neg_root_count);
  std::vector<double> cr(info.neg_root_count);
  std::vector<double> ci(info.neg_root_count);
  size_t n = 0;
  check(dd_basis_roots(basis.get(), xr.data(), xi.data(), cr.data(), ci.data(),
                       xr.size(), &n));

  bool all = true;
  std::ostringstream os;
  if (c.csv()) {
    os << "check,value,tolerance,pass\n";
    for (const auto& r : rows) {
      all = all && r.pass;
      os << r.name << ',' << num(r.value) << ',' << num(r.tolerance) << ','
         << (r.pass ? "true" : "false") << '\n';
    }
  } else {
    os << "{\"phi\": " << jnum(info.phi) << ", \"lead_coeff\": "
       << jnum(info.lead_coeff) << ", \"mu\": " << jnum(info.mu)
       << ",\n \"roots\": [";
    for (size_t i = 0; i < n; ++i)
      os << (i ? ",\n  " : "\n  ") << "{\"xi_re\": " << jnum(xr[i])
         << ", \"xi_im\": " << jnum(xi[i]) << ", \"C_re\": " << jnum(cr[i])
         << ", \"C_im\": " << jnum(ci[i]) << '}';
    os << "],\n \"checks\": [";
    for (size_t i = 0; i < rows.size(); ++i) {
      all = all && rows[i].pass;
      os << (i ? ",\n  " : "\n  ") << "{\"check\": \"" << rows[i].name
         << "\", \"value\": " << jnum(rows[i].value) << ", \"tolerance\": "
         << jnum(rows[i].tolerance)
         << ", \"pass\": " << (rows[i].pass ? "true" : "false") << '}';
    }
    os << "]}\n";
  }
  emit(c, os.str());
  if (!all) {
    std::cerr << "dualdiv: one or more checks failed\n";
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal impulse dividends in the dual risk model"};
  app.require_subcommand(1);

  Common solve_c, value_c, sim_c, sweep_c, check_c;
  double beta = 0.0;
  int starts = 0;
  int surface_n = 0;
  std::optional<double> surface_max;
  std::string policy;
  std::optional<double> x;
  std::string grid;
  std::int64_t paths = 0;
  std::uint64_t seed = 0;
  double dt = 1e-3;
  std::string betas = "10,5,1,0.5,0.1";

  auto* solve = app.add_subcommand("solve", "Find the optimal (c1, c2) policy");
  add_common(solve, solve_c);
  solve->add_option("--beta", beta, "Fixed transaction cost")->required();
  solve->add_option("--starts", starts, "Multi-start uniqueness probe runs")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--dump-surface", surface_n,
                    "Emit the n x n objective grid");
  solve->add_option("--surface-max", surface_max,
                    "Upper edge of the surface grid (default: search ceiling)")
      ->check(CLI::PositiveNumber);

  auto* value = app.add_subcommand("value", "Evaluate a value function");
  add_common(value, value_c);
  value->add_option("--beta", beta, "Fixed transaction cost")->required();
  value->add_option("--policy", policy, "c1,c2 (default: the optimum)");
  auto* xopt = value->add_option("--x", x, "Single surplus level");
  value->add_option("--x-grid", grid, "lo:hi:step")->excludes(xopt);

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo value estimate");
  add_common(sim, sim_c);
  sim->add_option("--beta", beta, "Fixed transaction cost")->required();
  sim->add_option("--policy", policy, "c1,c2")->required();
  sim->add_option("--x", x, "Initial surplus")->required();
  sim->add_option("--paths", paths, "Number of paths")->required();
  sim->add_option("--seed", seed, "RNG seed")->required();
  sim->add_option("--dt", dt, "Euler step (sigma > 0 only)");

  auto* sweep = app.add_subcommand("sweep-beta", "Optimal levels across betas");
  add_common(sweep, sweep_c);
  sweep->add_option("--betas", betas, "Descending list, e.g. 10,5,1");

  auto* chk = app.add_subcommand("check", "Diagnostics of the scale basis");
  add_common(chk, check_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (solve->parsed()) return run_solve(solve_c, beta, starts, surface_n, surface_max);
    if (value->parsed()) return run_value(value_c, beta, policy, x, grid);
    if (sim->parsed())
      return run_simulate(sim_c, beta, policy, *x, paths, seed, dt);
    if (sweep->parsed()) return run_sweep(sweep_c, betas);
    if (chk->parsed()) return run_check(check_c);
  } catch (const Failure& f) {
    std::cerr << "dualdiv: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "dualdiv: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
