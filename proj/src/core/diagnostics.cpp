#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dualdiv {

namespace {

CheckRow at_most(std::string name, double value, double tol) {
  return {std::move(name), value, tol, value <= tol};
}

}  // namespace

std::vector<CheckRow> run_checks(const ScaleBasis& basis) {
  const LevyModel& m = basis.model();
  const double q = basis.q();
  const double phi = basis.phi_q();
  std::vector<CheckRow> rows;

  rows.push_back(at_most("psi(0)", std::abs(m.psi(0.0)), 1e-12));
  rows.push_back(at_most("root_residual", basis.max_residual(),
                         1e-8 * std::max(1.0, q)));
  rows.push_back({"root_separation", basis.min_separation(), 1e-6,
                  basis.min_separation() >= 1e-6});
  const int expected =
      m.jumps().phases() + (m.variation() == Variation::Unbounded ? 1 : 0);
  rows.push_back({"negative_root_count",
                  static_cast<double>(basis.neg_roots().size()),
                  static_cast<double>(expected),
                  static_cast<int>(basis.neg_roots().size()) == expected});

  double conj_err = 0.0;
  for (const Complex& xi : basis.neg_roots()) {
    double best = std::abs(xi.imag()) == 0.0 ? 0.0 : INFINITY;
    for (const Complex& other : basis.neg_roots())
      if (&other != &xi) best = std::min(best, std::abs(other - std::conj(xi)));
    conj_err = std::max(conj_err, best);
  }
  rows.push_back(at_most("conjugate_closure", conj_err, 1e-12));

  const double mu_err = std::abs(m.drift_mu() - m.drift_mu_direct());
  rows.push_back(at_most("drift_two_ways", mu_err, 1e-10));

  const bool bounded = m.variation() == Variation::Bounded;
  const double w0 = bounded ? 1.0 / m.drift_d() : 0.0;
  rows.push_back(at_most("W(0)", std::abs(basis.W(0.0) - w0), 1e-9));
  const double wp0 = bounded ? (q + m.jump_rate()) / (m.drift_d() * m.drift_d())
                             : 2.0 / (m.sigma() * m.sigma());
  rows.push_back(at_most("W'(0+)", std::abs(basis.W_prime(0.0) - wp0) / wp0,
                         1e-6));

  double lap = 0.0;
  for (int k = 1; k <= 5; ++k) lap = std::max(lap, basis.laplace_check(phi + k));
  rows.push_back(at_most("laplace_identity", lap, 1e-6));

  // Grid up to where e^{Phi x} stays moderate.
  const double top = std::min(50.0, 200.0 / phi);
  const int n = 200;
  double mono = INFINITY;
  double logconc = 0.0;
  double imag = 0.0;
  double prev_ld = INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double x = top * i / n;
    mono = std::min(mono, basis.W(x + 1e-4) - basis.W(x));
    imag = std::max(imag, basis.imag_residue(x));
    if (x > 0.0) {
      const double ld = basis.W_prime(x) / basis.W(x);
      logconc = std::max(logconc, ld - prev_ld);
      prev_ld = ld;
    }
  }
  rows.push_back({"W_increasing", mono, 0.0, mono > 0.0});
  rows.push_back(at_most("W_log_concave", logconc, 1e-9));
  rows.push_back(at_most("imag_residue", imag, 1e-9));
  return rows;
}

}  // namespace dualdiv
