#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "dualdiv/dualdiv.h"

namespace {

struct Handles {
  dd_model* model = nullptr;
  dd_basis* basis = nullptr;
  ~Handles() {
    dd_basis_free(basis);
    dd_model_free(model);
  }
};

std::string model_file(const char* name) {
  return std::string(DUALDIV_MODEL_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("status names and last error") {
  CHECK(std::string(dd_status_name(DD_OK)) == "Ok");
  CHECK(std::string(dd_status_name(DD_ERR_NO_CONVERGENCE)) == "NoConvergence");
  dd_model* m = nullptr;
  CHECK(dd_model_load("/nonexistent.toml", &m) == DD_ERR_IO);
  CHECK(m == nullptr);
  CHECK(std::strlen(dd_last_error()) > 0);
  CHECK(dd_model_load(model_file("expjump.toml").c_str(), &m) == DD_OK);
  CHECK(std::strlen(dd_last_error()) == 0);
  dd_model_free(m);
}

TEST_CASE("null arguments are rejected") {
  CHECK(dd_model_create(nullptr, nullptr) == DD_ERR_INVALID_ARGUMENT);
  double v = 0;
  CHECK(dd_scale_eval(nullptr, DD_W, 1.0, &v) == DD_ERR_INVALID_ARGUMENT);
  dd_model_free(nullptr);
  dd_basis_free(nullptr);
}

TEST_CASE("validation errors map to their codes") {
  const double alpha[1] = {1.0};
  const double T[1] = {-1.0};
  dd_model_params p{2.0, 0.0, 1.0, 0.05, 1, alpha, T};
  dd_model* m = nullptr;
  p.q = 0.0;
  CHECK(dd_model_create(&p, &m) == DD_ERR_NONPOSITIVE_RATE);
  p.q = 0.05;
  p.drift_d = -1.0;
  CHECK(dd_model_create(&p, &m) == DD_ERR_SUBORDINATOR);
  p.drift_d = 2.0;
  const double bad_alpha[1] = {1.5};
  p.alpha = bad_alpha;
  CHECK(dd_model_create(&p, &m) == DD_ERR_INVALID_PHASE_TYPE);
  CHECK(dd_model_parse("drift_d = 1\n", &m) == DD_ERR_PARSE);
  CHECK(m == nullptr);
}

TEST_CASE("model, roots and scale functions") {
  Handles h;
  const double alpha[1] = {1.0};
  const double T[1] = {-1.0};
  const dd_model_params p{2.0, 0.0, 1.0, 0.05, 1, alpha, T};
  REQUIRE(dd_model_create(&p, &h.model) == DD_OK);
  dd_model_info info{};
  REQUIRE(dd_model_info_get(h.model, &info) == DD_OK);
  CHECK(info.mu == doctest::Approx(-1.0));
  CHECK(info.bounded_variation == 1);
  double re = 0, im = 0;
  REQUIRE(dd_psi(h.model, 1.0, 0.0, &re, &im) == DD_OK);
  CHECK(re == doctest::Approx(2.0 + 0.5 - 1.0));  // 2s + lambda (1/(1+s) - 1)
  CHECK(im == 0.0);

  REQUIRE(dd_basis_create(h.model, &h.basis) == DD_OK);
  size_t count = 0;
  REQUIRE(dd_basis_roots(h.basis, nullptr, nullptr, nullptr, nullptr, 0, &count) == DD_OK);
  CHECK(count == 1u);
  std::vector<double> xr(count), xi(count), cr(count), ci(count);
  REQUIRE(dd_basis_roots(h.basis, xr.data(), xi.data(), cr.data(), ci.data(), count,
                         &count) == DD_OK);
  CHECK(xr[0] > 0.0);  // root of psi = q sits at -xi
  dd_basis_info bi{};
  REQUIRE(dd_basis_info_get(h.basis, &bi) == DD_OK);
  CHECK(bi.phi > 0.0);
  CHECK(bi.neg_root_count == 1u);
  double w0 = 1;
  REQUIRE(dd_scale_eval(h.basis, DD_W, 0.0, &w0) == DD_OK);
  CHECK(w0 == doctest::Approx(0.5));  // 1/d
  CHECK(dd_scale_eval(h.basis, DD_W, -1.0, &w0) == DD_OK);
  CHECK(w0 == 0.0);
  double up = 0, down = 0;
  REQUIRE(dd_exit(h.basis, 1.0, 3.0, &up, &down) == DD_OK);
  CHECK(up > 0.0);
  CHECK(down > 0.0);
  CHECK(up + down < 1.0);
  double lap = 1;
  REQUIRE(dd_laplace_check(h.basis, bi.phi + 1.0, &lap) == DD_OK);
  CHECK(lap < 1e-6);
}

TEST_CASE("solve, value and sweep through the C layer") {
  Handles h;
  REQUIRE(dd_model_load(model_file("case1_sigma1.toml").c_str(), &h.model) == DD_OK);
  REQUIRE(dd_basis_create(h.model, &h.basis) == DD_OK);
  dd_solve_report rep{};
  REQUIRE(dd_solve(h.basis, 4.0, nullptr, &rep) == DD_OK);
  CHECK(rep.corner == 0);
  CHECK(rep.c1 > 0.0);
  CHECK(std::abs(rep.G_residual) < 1e-8);
  double v = 0, dv = 0;
  REQUIRE(dd_optimal_value(h.basis, &rep, rep.c2, &v, &dv) == DD_OK);
  CHECK(dv == doctest::Approx(1.0).epsilon(1e-7));
  double v2 = 0, dv2 = 0;
  REQUIRE(dd_value(h.basis, 4.0, rep.c1, rep.c2, 1.0, &v2, &dv2) == DD_OK);
  REQUIRE(dd_optimal_value(h.basis, &rep, 1.0, &v, &dv) == DD_OK);
  CHECK(v == doctest::Approx(v2).epsilon(1e-9));

  dd_policy_eval ev{};
  REQUIRE(dd_policy_evaluate(h.basis, 4.0, rep.c1, rep.c2, &ev) == DD_OK);
  CHECK(ev.objective == doctest::Approx(rep.objective));
  CHECK(dd_policy_evaluate(h.basis, 4.0, 3.0, 2.0, &ev) == DD_ERR_DOMAIN);
  CHECK(dd_solve(h.basis, 0.0, nullptr, &rep) == DD_ERR_DOMAIN);

  const double betas[2] = {5.0, 1.0};
  dd_solve_report reps[2];
  REQUIRE(dd_beta_sweep(h.basis, betas, 2, nullptr, reps) == DD_OK);
  CHECK(reps[0].c2 > reps[1].c2);
  const double wrong[2] = {1.0, 5.0};
  CHECK(dd_beta_sweep(h.basis, wrong, 2, nullptr, reps) != DD_OK);

  double a_star = 0;
  double xs[2] = {0.0, 50.0}, vhat[2];
  REQUIRE(dd_benchmark(h.basis, xs, 2, &a_star, vhat) == DD_OK);
  CHECK(a_star > 0.0);
  CHECK(vhat[1] == doctest::Approx(50.0 - a_star + 0.0).epsilon(0.5));

  std::vector<double> grid(16 * 16);
  double ceiling = 0;
  REQUIRE(dd_search_ceiling(h.basis, 4.0, &ceiling) == DD_OK);
  REQUIRE(dd_surface(h.basis, 4.0, ceiling, 16, 2, grid.data()) == DD_OK);
  CHECK(std::isnan(grid[0]));                 // c1 = c2 = 0
  CHECK(std::isfinite(grid[0 * 16 + 5]));     // c1 = 0 < c2
}

TEST_CASE("simulation and checks through the C layer") {
  Handles h;
  REQUIRE(dd_model_load(model_file("expjump.toml").c_str(), &h.model) == DD_OK);
  REQUIRE(dd_basis_create(h.model, &h.basis) == DD_OK);
  dd_sim_config cfg;
  dd_sim_config_default(&cfg);
  cfg.paths = 1000;
  cfg.seed = 4;
  dd_sim_result r{};
  REQUIRE(dd_simulate_value(h.model, 0.0, 4.85, 4.0, 2.0, &cfg, &r) == DD_OK);
  CHECK(r.paths == 1000);
  CHECK(r.seed == 4u);
  cfg.paths = 0;
  CHECK(dd_simulate_value(h.model, 0.0, 4.85, 4.0, 2.0, &cfg, &r) == DD_ERR_CONFIG);

  size_t count = 0;
  REQUIRE(dd_check(h.basis, nullptr, 0, &count) == DD_OK);
  std::vector<dd_check_row> rows(count);
  REQUIRE(dd_check(h.basis, rows.data(), rows.size(), &count) == DD_OK);
  for (const auto& row : rows) {
    CAPTURE(row.name);
    CHECK(row.pass == 1);
  }
}

TEST_CASE("number formatting") {
  char buf[64];
  CHECK(dd_format_number(0.1, buf, sizeof buf) == 3u);
  CHECK(std::string(buf) == "0.1");
  dd_format_number(1.0 / 3.0, buf, sizeof buf);
  CHECK(std::string(buf) == "0.333333333333");
  char tiny[2];
  CHECK(dd_format_number(12345.0, tiny, sizeof tiny) == 5u);
}
