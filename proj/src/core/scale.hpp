#pragma once

#include <complex>
#include <vector>

#include "model.hpp"

namespace dualdiv {

// Roots of psi(s) = q and the residues that turn them into the q-scale
// function
//
//   W(x) = e^{Phi x} / psi'(Phi) - sum_i C_i e^{-xi_i x},  x >= 0,
//
// with C_i = -1 / psi'(-xi_i). Internally W is held as an exponential sum
// sum_j a_j e^{r_j x}; complex roots are stored once and evaluated together
// with their conjugate, so every real-valued output has no imaginary residue
// by construction.
class ScaleBasis {
 public:
  struct Term {
    Complex coeff;  // a_j
    Complex rate;   // r_j
    bool paired;    // term stands for itself plus its complex conjugate
  };

  explicit ScaleBasis(LevyModel model);

  const LevyModel& model() const { return model_; }
  double q() const { return model_.q(); }
  double mu() const { return mu_; }

  double phi_q() const { return phi_; }
  double lead_coeff() const { return lead_; }
  // xi_i (positive real part), conjugate pairs both listed.
  const std::vector<Complex>& neg_roots() const { return xi_; }
  // C_i aligned with neg_roots().
  const std::vector<Complex>& coeffs() const { return C_; }

  // Largest |psi(r) - q| over all roots after polishing.
  double max_residual() const { return max_residual_; }
  // Smallest pairwise root distance divided by (1 + max modulus).
  double min_separation() const { return min_separation_; }

  double W(double x) const;
  // Right derivative; at x = 0 the right limit W'(0+).
  double W_prime(double x) const;
  double Wbar(double x) const;
  double Z(double x) const;
  double Zbar(double x) const;
  double R(double y) const;

  // |Im| / max(|Re|, tiny) of W(x) summed term by term without conjugate
  // pairing; a diagnostic for the root/coefficient symmetry.
  double imag_residue(double x) const;

  // W(a) / W(b) for 0 <= a, b without forming either factor.
  double W_ratio(double a, double b) const;
  // W'(x) / W(x), x > 0.
  double W_log_derivative(double x) const;
  double Z_over_W(double x) const;
  double R_over_W(double x) const;
  double R_over_Z(double x) const;
  double Wbar_over_W(double x) const;

  // Z(a) - W(a) Z(b) / W(b) and R(a) - W(a) R(b) / W(b) for 0 <= a <= b,
  // evaluated with the dominant e^{Phi x} term cancelled analytically.
  double Z_gap(double a, double b) const;
  double R_gap(double a, double b) const;

  // E_x[e^{-q tau_b^+}; tau_b^+ < tau_0^-] and E_x[e^{-q tau_0^-}; tau_0^- < tau_b^+].
  double exit_up(double x, double b) const;
  double exit_down(double x, double b) const;

  // Relative error of the Laplace identity int_0^inf e^{-sx} W(x) dx =
  // 1 / (psi(s) - q), using adaptive quadrature on [0, A] plus the exact
  // tail beyond A. Requires s > Phi(q).
  double laplace_check(double s) const;

  const std::vector<Term>& terms() const { return terms_; }

 private:
  // w, wp, z, r are W, W', Z, R multiplied by e^{-Phi x} so they stay O(1)
  // as x grows. z_rest and r_rest are Z - (q / Phi) W and R - (q / Phi^2) W,
  // unscaled: the leading exponential cancels exactly and what remains is
  // bounded (z_rest) or grows linearly (r_rest).
  struct Scaled {
    double w;
    double wp;
    double z;
    double r;
    double z_rest;
    double r_rest;
  };
  Scaled scaled(double x) const;
  void guard(double x) const;

  template <class F>
  double sum_terms(F&& f) const;

  LevyModel model_;
  double mu_ = 0.0;
  double phi_ = 0.0;
  double lead_ = 0.0;
  std::vector<Complex> xi_;
  std::vector<Complex> C_;
  std::vector<Term> terms_;
  // 1 - q sum a/r and -mu/q - q sum a/r^2: zero in exact arithmetic, kept so
  // the scaled forms agree with the direct ones to rounding.
  double kappa_z_ = 0.0;
  double kappa_r_ = 0.0;
  double max_residual_ = 0.0;
  double min_separation_ = 0.0;
};

// Builds the basis; RepeatedRoot / RootCount on failure.
ScaleBasis find_roots(const LevyModel& model);

// Cleared-denominator polynomial whose zeros are the roots of psi(s) = q.
std::vector<double> root_polynomial(const LevyModel& model);

// exp(z) - 1 and exp(z) - 1 - z without cancellation near zero.
Complex expm1c(Complex z);
Complex expm1_minus_z(Complex z);

}  // namespace dualdiv
