#include "poly.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace dualdiv {

CharPolyAdjugate leverrier_faddeev(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  CharPolyAdjugate out;
  out.det.assign(static_cast<std::size_t>(n) + 1, 0.0);
  out.adjugate.assign(static_cast<std::size_t>(n), Eigen::MatrixXd());
  out.det[static_cast<std::size_t>(n)] = 1.0;

  // M_1 = I, c_{n-1} = -tr(A); M_k = A M_{k-1} + c_{n-k+1} I,
  // c_{n-k} = -tr(A M_k) / k. adj(sI - A) = sum_k M_k s^{n-k}.
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k > 1) {
      M = A * M;
      M.diagonal().array() += out.det[static_cast<std::size_t>(n - k + 1)];
    }
    out.adjugate[static_cast<std::size_t>(n - k)] = M;
    out.det[static_cast<std::size_t>(n - k)] =
        -(A * M).trace() / static_cast<double>(k);
  }
  return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

std::complex<double> poly_eval(const Poly& p, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

namespace {

// Parlett-Reinsch balancing restricted to powers of two, so no rounding is
// introduced by the scaling itself.
void balance(Eigen::MatrixXd& C) {
  const Eigen::Index n = C.rows();
  constexpr double kGamma = 0.9;
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      double col = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        row += std::abs(C(i, j));
        col += std::abs(C(j, i));
      }
      if (row == 0.0 || col == 0.0) continue;
      int exponent = 0;
      std::frexp(row / col, &exponent);
      exponent /= 2;
      if (exponent == 0) continue;
      const double scaled_col = std::ldexp(col, exponent);
      const double scaled_row = std::ldexp(row, -exponent);
      if (scaled_col + scaled_row < kGamma * (col + row)) {
        changed = true;
        const double up = std::ldexp(1.0, exponent);
        const double down = std::ldexp(1.0, -exponent);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j == i) continue;
          C(i, j) *= down;
          C(j, i) *= up;
        }
      }
    }
  }
}

}  // namespace

std::vector<std::complex<double>> poly_roots(Poly p) {
  while (!p.empty() && p.back() == 0.0) p.pop_back();
  if (p.size() < 2) return {};
  const Eigen::Index degree = static_cast<Eigen::Index>(p.size()) - 1;
  const double lead = p.back();
  if (degree == 1) return {std::complex<double>(-p[0] / lead, 0.0)};

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(degree, degree);
  C.diagonal(-1).setOnes();
  for (Eigen::Index i = 0; i < degree; ++i)
    C(i, degree - 1) = -p[static_cast<std::size_t>(i)] / lead;
  balance(C);

  Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::RootCount, "companion eigenvalue iteration did not converge");
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(degree));
  for (Eigen::Index i = 0; i < degree; ++i)
    roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

}  // namespace dualdiv
