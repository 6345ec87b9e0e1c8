#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dualdiv {

// Coefficients are stored in ascending order: c[0] + c[1] s + ... .
using Poly = std::vector<double>;

// det(sI - A) and adj(sI - A) as polynomials in s, from the
// Leverrier-Faddeev recursion. adjugate[k] multiplies s^k.
struct CharPolyAdjugate {
  Poly det;
  std::vector<Eigen::MatrixXd> adjugate;
};

CharPolyAdjugate leverrier_faddeev(const Eigen::MatrixXd& A);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
std::complex<double> poly_eval(const Poly& p, std::complex<double> s);

// All complex roots via eigenvalues of the balanced companion matrix.
// Leading zero coefficients are stripped first.
std::vector<std::complex<double>> poly_roots(Poly p);

}  // namespace dualdiv
