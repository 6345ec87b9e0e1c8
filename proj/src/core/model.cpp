#include "model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "error.hpp"

namespace dualdiv {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kMinRcond = 1e-14;

}  // namespace

PhaseTypeDist::PhaseTypeDist(Eigen::VectorXd alpha, Eigen::MatrixXd T)
    : alpha_(std::move(alpha)), T_(std::move(T)) {
  const Eigen::Index m = alpha_.size();
  if (m < 1) fail(ErrorCode::InvalidPhaseType, "phase-type needs m >= 1");
  if (T_.rows() != m || T_.cols() != m) {
    std::ostringstream os;
    os << "T must be " << m << "x" << m << ", got " << T_.rows() << "x"
       << T_.cols();
    fail(ErrorCode::InvalidPhaseType, os.str());
  }
  if (!alpha_.allFinite() || !T_.allFinite())
    fail(ErrorCode::InvalidPhaseType, "non-finite entry in alpha or T");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (alpha_(i) < 0.0)
      fail(ErrorCode::InvalidPhaseType, "alpha has a negative entry");
  }
  mass_ = alpha_.sum();
  if (mass_ > 1.0 + kProbTol)
    fail(ErrorCode::InvalidPhaseType, "sum(alpha) exceeds 1");
  if (mass_ <= 0.0)
    fail(ErrorCode::InvalidPhaseType, "alpha carries no mass");

  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(T_(i, i) < 0.0))
      fail(ErrorCode::InvalidPhaseType, "T diagonal must be strictly negative");
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j && T_(i, j) < 0.0)
        fail(ErrorCode::InvalidPhaseType, "T off-diagonal must be nonnegative");
    }
  }
  exit_ = -T_.rowwise().sum();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (exit_(i) < -kProbTol)
      fail(ErrorCode::InvalidPhaseType, "T has a positive row sum");
    // Rounding of the tabulated rates can leave -1e-17 style residue.
    if (exit_(i) < 0.0) exit_(i) = 0.0;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(T_, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::InvalidPhaseType, "eigenvalues of T did not converge");
  if (es.eigenvalues().real().maxCoeff() >= 0.0)
    fail(ErrorCode::InvalidPhaseType,
         "T has an eigenvalue with nonnegative real part (defective law)");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(-T_);
  if (lu.rcond() < kMinRcond)
    fail(ErrorCode::InvalidPhaseType, "T is numerically singular");
  mean_ = alpha_.dot(lu.solve(Eigen::VectorXd::Ones(m)));
  if (!(mean_ > 0.0) || !std::isfinite(mean_))
    fail(ErrorCode::InvalidPhaseType, "mean jump size is not positive");
}

double PhaseTypeDist::survival(double x) const {
  if (x < 0.0) return 1.0;
  const Eigen::MatrixXd e = (T_ * x).exp();
  return alpha_.dot(e * Eigen::VectorXd::Ones(alpha_.size()));
}

LevyModel::LevyModel(double drift_d, double sigma, double lambda, double q,
                     PhaseTypeDist jumps)
    : drift_d_(drift_d),
      sigma_(sigma),
      lambda_(lambda),
      q_(q),
      jumps_(std::move(jumps)) {
  if (!std::isfinite(drift_d) || !std::isfinite(sigma) ||
      !std::isfinite(lambda) || !std::isfinite(q))
    fail(ErrorCode::InvalidArgument, "model parameters must be finite");
  if (sigma < 0.0) fail(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (!(lambda > 0.0)) fail(ErrorCode::NonpositiveRate, "lambda must be > 0");
  if (!(q > 0.0)) fail(ErrorCode::NonpositiveRate, "q must be > 0");
  if (sigma == 0.0 && !(drift_d > 0.0))
    fail(ErrorCode::Subordinator,
         "sigma = 0 requires drift_d > 0 (monotone paths are excluded)");
}

std::pair<Complex, Complex> LevyModel::resolvent_moments(Complex s) const {
  Eigen::MatrixXcd A = -jumps_.generator().cast<Complex>();
  A.diagonal().array() += s;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  if (!(lu.rcond() >= kMinRcond)) {
    std::ostringstream os;
    os << "sI - T is numerically singular at s = " << s;
    fail(ErrorCode::SingularResolvent, os.str());
  }
  const Eigen::VectorXcd y1 = lu.solve(jumps_.exit_rates().cast<Complex>());
  const Eigen::VectorXcd y2 = lu.solve(y1);
  const Eigen::VectorXcd a = jumps_.alpha().cast<Complex>();
  return {a.transpose() * y1, a.transpose() * y2};
}

Complex LevyModel::psi(Complex s) const {
  const Complex m1 = resolvent_moments(s).first;
  return drift_d_ * s + 0.5 * sigma_ * sigma_ * s * s +
         lambda_ * (m1 - jumps_.mass());
}

Complex LevyModel::psi_prime(Complex s) const {
  const Complex m2 = resolvent_moments(s).second;
  return drift_d_ + sigma_ * sigma_ * s - lambda_ * m2;
}

double LevyModel::drift_mu() const { return -psi_prime(0.0); }

double LevyModel::drift_mu_direct() const {
  return -drift_d_ + lambda_ * jumps_.mean();
}

LevyModel LevyModel::with_q(double q) const {
  return LevyModel(drift_d_, sigma_, lambda_, q, jumps_);
}

LevyModel validate_model(const ModelParams& raw) {
  const std::size_t m = raw.alpha.size();
  if (raw.T.size() != m)
    fail(ErrorCode::InvalidPhaseType, "T row count must equal len(alpha)");
  Eigen::VectorXd alpha(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd T(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    alpha(static_cast<Eigen::Index>(i)) = raw.alpha[i];
    if (raw.T[i].size() != m)
      fail(ErrorCode::InvalidPhaseType, "T must be square");
    for (std::size_t j = 0; j < m; ++j)
      T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = raw.T[i][j];
  }
  // Rates are checked before the jump law so that the error reported for an
  // otherwise-valid file names the first offending scalar.
  if (raw.sigma == 0.0 && !(raw.drift_d > 0.0))
    fail(ErrorCode::Subordinator,
         "sigma = 0 requires drift_d > 0 (monotone paths are excluded)");
  if (!(raw.lambda > 0.0)) fail(ErrorCode::NonpositiveRate, "lambda must be > 0");
  if (!(raw.q > 0.0)) fail(ErrorCode::NonpositiveRate, "q must be > 0");
  return LevyModel(raw.drift_d, raw.sigma, raw.lambda, raw.q,
                   PhaseTypeDist(std::move(alpha), std::move(T)));
}

}  // namespace dualdiv
