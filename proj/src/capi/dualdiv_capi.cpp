#include "dualdiv/dualdiv.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "diagnostics.hpp"
#include "error.hpp"
#include "format.hpp"
#include "model_file.hpp"
#include "policy.hpp"
#include "simulate.hpp"
#include "valuation.hpp"

struct dd_model {
  dualdiv::LevyModel model;
};

struct dd_basis {
  dualdiv::ScaleBasis basis;
};

namespace {

thread_local std::string g_last_error;

dd_status to_status(dualdiv::ErrorCode code) {
  using dualdiv::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return DD_ERR_INVALID_ARGUMENT;
    case ErrorCode::Subordinator: return DD_ERR_SUBORDINATOR;
    case ErrorCode::InvalidPhaseType: return DD_ERR_INVALID_PHASE_TYPE;
    case ErrorCode::NonpositiveRate: return DD_ERR_NONPOSITIVE_RATE;
    case ErrorCode::SingularResolvent: return DD_ERR_SINGULAR_RESOLVENT;
    case ErrorCode::RepeatedRoot: return DD_ERR_REPEATED_ROOT;
    case ErrorCode::RootCount: return DD_ERR_ROOT_COUNT;
    case ErrorCode::OverflowGuard: return DD_ERR_OVERFLOW_GUARD;
    case ErrorCode::Domain: return DD_ERR_DOMAIN;
    case ErrorCode::DegenerateDenominator: return DD_ERR_DEGENERATE_DENOMINATOR;
    case ErrorCode::NoConvergence: return DD_ERR_NO_CONVERGENCE;
    case ErrorCode::Bracket: return DD_ERR_BRACKET;
    case ErrorCode::Config: return DD_ERR_CONFIG;
    case ErrorCode::Parse: return DD_ERR_PARSE;
    case ErrorCode::Io: return DD_ERR_IO;
  }
  return DD_ERR_INTERNAL;
}

template <class Fn>
dd_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DD_OK;
  } catch (const dualdiv::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return DD_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) dualdiv::fail(dualdiv::ErrorCode::InvalidArgument, what);
}

dualdiv::SolveOptions to_options(const dd_solve_options* o) {
  dualdiv::SolveOptions out;
  if (!o) return out;
  out.grid = o->grid;
  out.zoom_levels = o->zoom_levels;
  out.zoom_grid = o->zoom_grid;
  out.max_iterations = o->max_iterations;
  out.starts = o->starts;
  out.agreement = o->agreement;
  out.threads = o->threads;
  return out;
}

void from_report(const dualdiv::SolveReport& r, dd_solve_report* out) {
  out->c1 = r.policy.c1;
  out->c2 = r.policy.c2;
  out->vbar = r.vbar;
  out->objective = r.objective;
  out->gamma = r.gamma;
  out->G_residual = r.G_residual;
  out->H_value = r.H_value;
  out->corner = r.corner ? 1 : 0;
  out->beta = r.beta;
  out->iterations = r.iterations;
  out->ceiling = r.ceiling;
}

dualdiv::SolveReport to_report(const dd_solve_report& r) {
  dualdiv::SolveReport out;
  out.policy = {r.c1, r.c2};
  out.vbar = r.vbar;
  out.objective = r.objective;
  out.gamma = r.gamma;
  out.G_residual = r.G_residual;
  out.H_value = r.H_value;
  out.corner = r.corner != 0;
  out.beta = r.beta;
  out.iterations = r.iterations;
  out.ceiling = r.ceiling;
  return out;
}

dualdiv::SimConfig to_config(const dd_sim_config* c) {
  dualdiv::SimConfig out;
  if (!c) return out;
  out.paths = c->paths;
  out.seed = c->seed;
  out.dt = c->dt;
  out.discount_floor = c->discount_floor;
  out.threads = c->threads;
  return out;
}

void from_sim(const dualdiv::SimResult& r, dd_sim_result* out) {
  out->mean = r.mean;
  out->std_error = r.std_error;
  out->paths = r.paths;
  out->truncated_fraction = r.truncated_fraction;
  out->seed = r.seed;
}

dd_model* wrap(const dualdiv::ModelParams& p) {
  return new dd_model{dualdiv::validate_model(p)};
}

}  // namespace

extern "C" {

const char* dd_status_name(dd_status status) {
  switch (status) {
    case DD_OK: return "Ok";
    case DD_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case DD_ERR_SUBORDINATOR: return "SubordinatorError";
    case DD_ERR_INVALID_PHASE_TYPE: return "InvalidPhaseType";
    case DD_ERR_NONPOSITIVE_RATE: return "NonpositiveRate";
    case DD_ERR_SINGULAR_RESOLVENT: return "SingularResolvent";
    case DD_ERR_REPEATED_ROOT: return "RepeatedRootError";
    case DD_ERR_ROOT_COUNT: return "RootCountError";
    case DD_ERR_OVERFLOW_GUARD: return "OverflowGuard";
    case DD_ERR_DOMAIN: return "DomainError";
    case DD_ERR_DEGENERATE_DENOMINATOR: return "DegenerateDenominator";
    case DD_ERR_NO_CONVERGENCE: return "NoConvergence";
    case DD_ERR_BRACKET: return "BracketError";
    case DD_ERR_CONFIG: return "ConfigError";
    case DD_ERR_PARSE: return "ParseError";
    case DD_ERR_IO: return "IoError";
    case DD_ERR_INTERNAL: return "InternalError";
  }
  return "Unknown";
}

const char* dd_last_error(void) { return g_last_error.c_str(); }

dd_status dd_model_create(const dd_model_params* params, dd_model** out) {
  return guarded([&] {
    require(params && out, "null argument");
    require(params->phases >= 1 && params->alpha && params->T,
            "model needs at least one phase");
    const auto m = static_cast<std::size_t>(params->phases);
    dualdiv::ModelParams p;
    p.drift_d = params->drift_d;
    p.sigma = params->sigma;
    p.lambda = params->lambda;
    p.q = params->q;
    p.alpha.assign(params->alpha, params->alpha + m);
    for (std::size_t i = 0; i < m; ++i)
      p.T.emplace_back(params->T + i * m, params->T + (i + 1) * m);
    *out = wrap(p);
  });
}

dd_status dd_model_load(const char* path, dd_model** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = wrap(dualdiv::load_model_file(path));
  });
}

dd_status dd_model_parse(const char* text, dd_model** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = wrap(dualdiv::parse_model_text(text));
  });
}

dd_status dd_model_with_q(const dd_model* model, double q, dd_model** out) {
  return guarded([&] {
    require(model && out, "null argument");
    *out = new dd_model{model->model.with_q(q)};
  });
}

void dd_model_free(dd_model* model) { delete model; }

dd_status dd_model_info_get(const dd_model* model, dd_model_info* out) {
  return guarded([&] {
    require(model && out, "null argument");
    const auto& m = model->model;
    out->drift_d = m.drift_d();
    out->sigma = m.sigma();
    out->lambda = m.lambda();
    out->q = m.q();
    out->phases = m.jumps().phases();
    out->mu = m.drift_mu();
    out->mean_jump = m.jumps().mean();
    out->jump_mass = m.jumps().mass();
    out->bounded_variation = m.variation() == dualdiv::Variation::Bounded;
  });
}

dd_status dd_psi(const dd_model* model, double re, double im, double* out_re,
                 double* out_im) {
  return guarded([&] {
    require(model && out_re && out_im, "null argument");
    const auto v = model->model.psi(dualdiv::Complex(re, im));
    *out_re = v.real();
    *out_im = v.imag();
  });
}

dd_status dd_psi_prime(const dd_model* model, double re, double im,
                       double* out_re, double* out_im) {
  return guarded([&] {
    require(model && out_re && out_im, "null argument");
    const auto v = model->model.psi_prime(dualdiv::Complex(re, im));
    *out_re = v.real();
    *out_im = v.imag();
  });
}

dd_status dd_basis_create(const dd_model* model, dd_basis** out) {
  return guarded([&] {
    require(model && out, "null argument");
    *out = new dd_basis{dualdiv::find_roots(model->model)};
  });
}

void dd_basis_free(dd_basis* basis) { delete basis; }

dd_status dd_basis_info_get(const dd_basis* basis, dd_basis_info* out) {
  return guarded([&] {
    require(basis && out, "null argument");
    const auto& b = basis->basis;
    out->phi = b.phi_q();
    out->lead_coeff = b.lead_coeff();
    out->mu = b.mu();
    out->q = b.q();
    out->neg_root_count = b.neg_roots().size();
    out->max_residual = b.max_residual();
    out->min_separation = b.min_separation();
  });
}

dd_status dd_basis_roots(const dd_basis* basis, double* xi_re, double* xi_im,
                         double* c_re, double* c_im, size_t capacity,
                         size_t* count) {
  return guarded([&] {
    require(basis && count, "null argument");
    const auto& xi = basis->basis.neg_roots();
    const auto& C = basis->basis.coeffs();
    *count = xi.size();
    for (std::size_t i = 0; i < xi.size() && i < capacity; ++i) {
      if (xi_re) xi_re[i] = xi[i].real();
      if (xi_im) xi_im[i] = xi[i].imag();
      if (c_re) c_re[i] = C[i].real();
      if (c_im) c_im[i] = C[i].imag();
    }
  });
}

dd_status dd_scale_eval(const dd_basis* basis, dd_scale_fn fn, double x,
                        double* out) {
  return guarded([&] {
    require(basis && out, "null argument");
    const auto& b = basis->basis;
    switch (fn) {
      case DD_W: *out = b.W(x); return;
      case DD_W_PRIME: *out = b.W_prime(x); return;
      case DD_WBAR: *out = b.Wbar(x); return;
      case DD_Z: *out = b.Z(x); return;
      case DD_ZBAR: *out = b.Zbar(x); return;
      case DD_R: *out = b.R(x); return;
    }
    require(false, "unknown scale function");
  });
}

dd_status dd_exit(const dd_basis* basis, double x, double b, double* up,
                  double* down) {
  return guarded([&] {
    require(basis && up && down, "null argument");
    *up = basis->basis.exit_up(x, b);
    *down = basis->basis.exit_down(x, b);
  });
}

dd_status dd_laplace_check(const dd_basis* basis, double s, double* out) {
  return guarded([&] {
    require(basis && out, "null argument");
    *out = basis->basis.laplace_check(s);
  });
}

dd_status dd_policy_evaluate(const dd_basis* basis, double beta, double c1,
                             double c2, dd_policy_eval* out) {
  return guarded([&] {
    require(basis && out, "null argument");
    const auto& b = basis->basis;
    const dualdiv::PolicyTerms t = dualdiv::policy_terms(b, beta, c1, c2);
    out->f = t.f;
    out->g = t.g;
    out->vbar = t.vbar;
    out->gamma = t.gamma;
    out->G = dualdiv::G_val(b, beta, c1, c2);
    out->H = dualdiv::H_val(b, beta, c1, c2);
    out->objective = t.vbar - c1;
    const auto [g1, g2] = dualdiv::objective_grad(b, beta, c1, c2);
    out->grad_c1 = g1;
    out->grad_c2 = g2;
  });
}

void dd_solve_options_default(dd_solve_options* out) {
  if (!out) return;
  const dualdiv::SolveOptions d;
  out->grid = d.grid;
  out->zoom_levels = d.zoom_levels;
  out->zoom_grid = d.zoom_grid;
  out->max_iterations = d.max_iterations;
  out->starts = d.starts;
  out->agreement = d.agreement;
  out->threads = d.threads;
}

dd_status dd_solve(const dd_basis* basis, double beta,
                   const dd_solve_options* options, dd_solve_report* out) {
  return guarded([&] {
    require(basis && out, "null argument");
    from_report(dualdiv::solve(basis->basis, beta, to_options(options)), out);
  });
}

dd_status dd_solve_from(const dd_basis* basis, double beta, double c1,
                        double c2, double ceiling,
                        const dd_solve_options* options, dd_solve_report* out) {
  return guarded([&] {
    require(basis && out, "null argument");
    from_report(dualdiv::solve_from(basis->basis, beta, {c1, c2}, ceiling,
                                    to_options(options)),
                out);
  });
}

dd_status dd_search_ceiling(const dd_basis* basis, double beta, double* out) {
  return guarded([&] {
    require(basis && out, "null argument");
    *out = dualdiv::search_ceiling(basis->basis, beta);
  });
}

dd_status dd_surface(const dd_basis* basis, double beta, double ceiling, int n,
                     int threads, double* values) {
  return guarded([&] {
    require(basis && values, "null argument");
    require(ceiling > 0.0 && std::isfinite(ceiling), "ceiling must be > 0");
    const auto s =
        dualdiv::objective_surface(basis->basis, beta, ceiling, n, threads);
    std::memcpy(values, s.values.data(), s.values.size() * sizeof(double));
  });
}

dd_status dd_value(const dd_basis* basis, double beta, double c1, double c2,
                   double x, double* v, double* dv) {
  return guarded([&] {
    require(basis && v, "null argument");
    *v = dualdiv::value_at(basis->basis, beta, {c1, c2}, x);
    if (dv) *dv = dualdiv::value_deriv_at(basis->basis, beta, {c1, c2}, x);
  });
}

dd_status dd_optimal_value(const dd_basis* basis, const dd_solve_report* report,
                           double x, double* v, double* dv) {
  return guarded([&] {
    require(basis && report && v, "null argument");
    const auto r = to_report(*report);
    *v = dualdiv::optimal_value_at(basis->basis, r, x);
    if (dv) *dv = dualdiv::optimal_value_deriv(basis->basis, r, x);
  });
}

dd_status dd_benchmark(const dd_basis* basis, const double* xs, size_t n,
                       double* a_star, double* vhat) {
  return guarded([&] {
    require(basis && a_star, "null argument");
    require(n == 0 || (xs && vhat), "null grid");
    const dualdiv::Benchmark bench(basis->basis);
    *a_star = bench.a_star();
    for (std::size_t i = 0; i < n; ++i) vhat[i] = bench.value(xs[i]);
  });
}

dd_status dd_beta_sweep(const dd_basis* basis, const double* betas, size_t n,
                        const dd_solve_options* options,
                        dd_solve_report* reports) {
  return guarded([&] {
    require(basis && betas && reports, "null argument");
    const auto sweep = dualdiv::beta_sweep(
        basis->basis, std::vector<double>(betas, betas + n), {},
        to_options(options));
    for (std::size_t i = 0; i < n; ++i) from_report(sweep.rows[i].report, &reports[i]);
  });
}

void dd_sim_config_default(dd_sim_config* out) {
  if (!out) return;
  const dualdiv::SimConfig d;
  out->paths = d.paths;
  out->seed = d.seed;
  out->dt = d.dt;
  out->discount_floor = d.discount_floor;
  out->threads = d.threads;
}

dd_status dd_simulate_value(const dd_model* model, double c1, double c2,
                            double beta, double x, const dd_sim_config* config,
                            dd_sim_result* out) {
  return guarded([&] {
    require(model && out, "null argument");
    from_sim(dualdiv::simulate_value(model->model, {c1, c2}, beta, x,
                                     to_config(config)),
             out);
  });
}

dd_status dd_simulate_exit(const dd_model* model, double x, double b,
                           const dd_sim_config* config, dd_sim_result* up,
                           dd_sim_result* down) {
  return guarded([&] {
    require(model && up && down, "null argument");
    const auto [u, d] =
        dualdiv::simulate_exit(model->model, x, b, to_config(config));
    from_sim(u, up);
    from_sim(d, down);
  });
}

dd_status dd_check(const dd_basis* basis, dd_check_row* rows, size_t capacity,
                   size_t* count) {
  return guarded([&] {
    require(basis && count, "null argument");
    const auto table = dualdiv::run_checks(basis->basis);
    *count = table.size();
    for (std::size_t i = 0; i < table.size() && i < capacity && rows; ++i) {
      std::memset(rows[i].name, 0, sizeof rows[i].name);
      std::strncpy(rows[i].name, table[i].name.c_str(),
                   sizeof rows[i].name - 1);
      rows[i].value = table[i].value;
      rows[i].tolerance = table[i].tolerance;
      rows[i].pass = table[i].pass ? 1 : 0;
    }
  });
}

size_t dd_format_number(double v, char* buf, size_t size) {
  const std::string s = dualdiv::format_number(v);
  if (buf && size > s.size()) {
    std::memcpy(buf, s.c_str(), s.size() + 1);
  } else if (buf && size > 0) {
    buf[0] = '\0';
  }
  return s.size();
}

}  // extern "C"
