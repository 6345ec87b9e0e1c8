#pragma once

#include <utility>
#include <vector>

#include "scale.hpp"

namespace dualdiv {

// Pay the surplus down to c1 whenever it reaches or exceeds c2.
struct Policy {
  double c1 = 0.0;
  double c2 = 0.0;
};

// Everything the first-order machinery needs at one (c1, c2), evaluated in a
// single pass over the scale basis.
struct PolicyTerms {
  double f = 0.0;
  double g = 0.0;
  double vbar = 0.0;
  double gamma = 0.0;
  // G / Z(c2) and H / (q W(c2 - c1)): O(1) versions of G and H with the same
  // sign, used as the Newton residual.
  double G_norm = 0.0;
  double H_norm = 0.0;
};

PolicyTerms policy_terms(const ScaleBasis& basis, double beta, double c1,
                         double c2);

double f_val(const ScaleBasis& basis, double beta, double c1, double c2);
double g_val(const ScaleBasis& basis, double c1, double c2);
double vbar(const ScaleBasis& basis, double beta, double c1, double c2);
double gamma_val(const ScaleBasis& basis, double beta, double c1, double c2);
double G_val(const ScaleBasis& basis, double beta, double c1, double c2);
double H_val(const ScaleBasis& basis, double beta, double c1, double c2);

// vbar - c1, or -infinity where g degenerates (c2 close to c1 under
// unbounded variation).
double objective(const ScaleBasis& basis, double beta, double c1, double c2);

// (d/dc1 (vbar - c1), d/dc2 vbar) from the analytic first-order formulas.
// At c1 = 0 the first component is the right partial.
std::pair<double, double> objective_grad(const ScaleBasis& basis, double beta,
                                         double c1, double c2);

struct SolveOptions {
  int grid = 64;           // coarse grid points per axis
  int zoom_levels = 3;     // local re-gridding passes around the best cell
  int zoom_grid = 16;
  int max_iterations = 100;
  int starts = 0;          // extra multi-start runs; 0 disables the probe
  double agreement = 1e-6; // multi-start coordinate tolerance
  int threads = 1;
};

struct SolveReport {
  Policy policy;
  double vbar = 0.0;
  double objective = 0.0;
  double gamma = 0.0;
  double G_residual = 0.0;
  double H_value = 0.0;
  bool corner = false;
  double beta = 0.0;
  int iterations = 0;
  double ceiling = 0.0;
};

// Maximiser of vbar - c1 over 0 <= c1 < c2. Errors: NoConvergence,
// Bracket, Domain (beta <= 0).
SolveReport solve(const ScaleBasis& basis, double beta,
                  const SolveOptions& options = {});

// Local stage only, started from an arbitrary admissible point. Used for the
// uniqueness probe.
SolveReport solve_from(const ScaleBasis& basis, double beta, Policy seed,
                       double ceiling, const SolveOptions& options = {});

// Initial ceiling 10 (|mu|/q + beta + 1), doubled until G(c1, C) > 0 for
// c1 in (0, C/2] on the top edge.
double search_ceiling(const ScaleBasis& basis, double beta);

// n x n objective grid over [0, C]^2, row i is c1 = i C / (n - 1), column j
// is c2 = j C / (n - 1); cells with c1 >= c2 hold NaN.
struct Surface {
  double ceiling = 0.0;
  int n = 0;
  std::vector<double> values;
};
Surface objective_surface(const ScaleBasis& basis, double beta, double ceiling,
                          int n, int threads = 1);

}  // namespace dualdiv
