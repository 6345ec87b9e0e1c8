#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dualdiv {

using Complex = std::complex<double>;

// Phase-type law of the upward jump sizes: absorption time of a Markov chain
// with initial law `alpha` and sub-generator `T`. A deficit 1 - sum(alpha)
// is an atom at zero.
class PhaseTypeDist {
 public:
  // Throws Error(InvalidPhaseType) when any invariant fails.
  PhaseTypeDist(Eigen::VectorXd alpha, Eigen::MatrixXd T);

  int phases() const { return static_cast<int>(alpha_.size()); }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::MatrixXd& generator() const { return T_; }
  const Eigen::VectorXd& exit_rates() const { return exit_; }
  double mass() const { return mass_; }

  // alpha (-T)^{-1} 1
  double mean() const { return mean_; }

  // P(Z > x) = alpha exp(Tx) 1
  double survival(double x) const;

 private:
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd T_;
  Eigen::VectorXd exit_;
  double mass_ = 0.0;
  double mean_ = 0.0;
};

enum class Variation { Bounded, Unbounded };

struct ModelParams {
  double drift_d = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double q = 0.0;
  std::vector<double> alpha;
  std::vector<std::vector<double>> T;
};

// X_t - X_0 = -d t + sigma B_t + sum_{n <= N_t} Z_n with N Poisson(lambda)
// and Z_n phase-type. Immutable once constructed.
class LevyModel {
 public:
  LevyModel(double drift_d, double sigma, double lambda, double q,
            PhaseTypeDist jumps);

  double drift_d() const { return drift_d_; }
  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }
  double q() const { return q_; }
  const PhaseTypeDist& jumps() const { return jumps_; }

  // lambda * sum(alpha): the rate of jumps with positive size.
  double jump_rate() const { return lambda_ * jumps_.mass(); }

  // psi(s) = d s + sigma^2 s^2 / 2 + lambda (alpha (sI - T)^{-1} t - sum(alpha))
  Complex psi(Complex s) const;
  double psi(double s) const { return psi(Complex(s, 0.0)).real(); }

  Complex psi_prime(Complex s) const;
  double psi_prime(double s) const { return psi_prime(Complex(s, 0.0)).real(); }

  // E[X_1] = -psi'(0+).
  double drift_mu() const;

  // -d + lambda alpha (-T)^{-1} 1, computed without psi'.
  double drift_mu_direct() const;

  Variation variation() const {
    return sigma_ == 0.0 ? Variation::Bounded : Variation::Unbounded;
  }

  LevyModel with_q(double q) const;

 private:
  // alpha (sI - T)^{-k} t for k = 1, 2 via one LU factorisation.
  std::pair<Complex, Complex> resolvent_moments(Complex s) const;

  double drift_d_;
  double sigma_;
  double lambda_;
  double q_;
  PhaseTypeDist jumps_;
};

// Checks every model assumption and builds the model. Error codes:
// Subordinator, InvalidPhaseType, NonpositiveRate, InvalidArgument.
LevyModel validate_model(const ModelParams& raw);

}  // namespace dualdiv
