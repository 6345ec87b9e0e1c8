#include "scale.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"
#include "poly.hpp"

namespace dualdiv {

namespace {

constexpr double kExpLimit = 700.0;
constexpr double kRealTol = 1e-8;
constexpr double kSeparationTol = 1e-6;
constexpr int kMinPolishSteps = 2;
constexpr int kMaxPolishSteps = 12;

double residual_tol(double q) { return 1e-8 * std::max(1.0, q); }

// Newton on psi(s) - q. The first two steps are always taken; after that a
// step is kept only while it does not increase the residual.
Complex polish(const LevyModel& model, Complex s, bool real) {
  const double q = model.q();
  Complex f = model.psi(s) - q;
  for (int it = 0; it < kMaxPolishSteps; ++it) {
    const Complex df = model.psi_prime(s);
    if (std::abs(df) == 0.0) break;
    Complex next = s - f / df;
    if (real) next = Complex(next.real(), 0.0);
    const Complex fn = model.psi(next) - q;
    if (it >= kMinPolishSteps && std::abs(fn) >= std::abs(f)) break;
    const double step = std::abs(next - s);
    s = next;
    f = fn;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(s))
      break;
  }
  return s;
}

}  // namespace

Complex expm1c(Complex z) {
  const double x = z.real();
  const double y = z.imag();
  if (y == 0.0) return Complex(std::expm1(x), 0.0);
  const double s = std::sin(0.5 * y);
  return Complex(std::expm1(x) * std::cos(y) - 2.0 * s * s,
                 std::exp(x) * std::sin(y));
}

Complex expm1_minus_z(Complex z) {
  if (std::abs(z) < 0.5) {
    Complex term = z * z * 0.5;
    Complex acc = term;
    for (int k = 3; k < 30; ++k) {
      term *= z / static_cast<double>(k);
      acc += term;
      if (std::abs(term) <= 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  return expm1c(z) - z;
}

std::vector<double> root_polynomial(const LevyModel& model) {
  const PhaseTypeDist& ph = model.jumps();
  const CharPolyAdjugate lf = leverrier_faddeev(ph.generator());
  const double lam = model.lambda();
  const Poly quad = {-lam * ph.mass() - model.q(), model.drift_d(),
                     0.5 * model.sigma() * model.sigma()};
  Poly jump_part(lf.adjugate.size(), 0.0);
  for (std::size_t k = 0; k < lf.adjugate.size(); ++k)
    jump_part[k] = lam * ph.alpha().dot(lf.adjugate[k] * ph.exit_rates());
  return poly_add(poly_mul(quad, lf.det), jump_part);
}

ScaleBasis::ScaleBasis(LevyModel model) : model_(std::move(model)) {
  mu_ = model_.drift_mu();
  const double q = model_.q();
  const int m = model_.jumps().phases();
  const int expected_neg = model_.sigma() > 0.0 ? m + 1 : m;

  std::vector<Complex> raw = poly_roots(root_polynomial(model_));
  if (static_cast<int>(raw.size()) != expected_neg + 1) {
    std::ostringstream os;
    os << "root polynomial has degree " << raw.size() << ", expected "
       << expected_neg + 1;
    fail(ErrorCode::RootCount, os.str());
  }

  std::vector<Complex> roots;
  roots.reserve(raw.size());
  for (Complex r : raw) {
    const bool real = std::abs(r.imag()) <= kRealTol * (1.0 + std::abs(r));
    if (real) r = Complex(r.real(), 0.0);
    try {
      roots.push_back(polish(model_, r, real));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularResolvent) throw;
      std::ostringstream os;
      os << "root " << r << " coincides with an eigenvalue of T "
         << "(non-minimal phase-type representation)";
      fail(ErrorCode::RootCount, os.str());
    }
  }

  double max_mod = 0.0;
  for (const Complex& r : roots) max_mod = std::max(max_mod, std::abs(r));
  min_separation_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      min_separation_ = std::min(
          min_separation_, std::abs(roots[i] - roots[j]) / (1.0 + max_mod));
  if (min_separation_ < kSeparationTol) {
    std::ostringstream os;
    os << "roots of psi(s) = q are not distinct (relative separation "
       << min_separation_ << ")";
    fail(ErrorCode::RepeatedRoot, os.str());
  }

  max_residual_ = 0.0;
  for (const Complex& r : roots)
    max_residual_ = std::max(max_residual_, std::abs(model_.psi(r) - q));
  if (max_residual_ > residual_tol(q)) {
    std::ostringstream os;
    os << "root residual " << max_residual_ << " exceeds tolerance";
    fail(ErrorCode::RootCount, os.str());
  }

  std::vector<Complex> positive;
  std::vector<Complex> upper;  // negative real part, Im > 0
  std::vector<Complex> lower;  // negative real part, Im < 0
  std::vector<double> real_neg;
  for (const Complex& r : roots) {
    if (r.real() > 0.0) {
      positive.push_back(r);
    } else if (r.real() < 0.0) {
      if (r.imag() > 0.0)
        upper.push_back(r);
      else if (r.imag() < 0.0)
        lower.push_back(r);
      else
        real_neg.push_back(r.real());
    } else {
      fail(ErrorCode::RootCount, "root on the imaginary axis");
    }
  }
  if (positive.size() != 1 || positive[0].imag() != 0.0) {
    std::ostringstream os;
    os << "expected exactly one positive real root, found " << positive.size()
       << " root(s) with positive real part";
    fail(ErrorCode::RootCount, os.str());
  }
  if (upper.size() != lower.size())
    fail(ErrorCode::RootCount, "complex roots are not closed under conjugation");

  phi_ = positive[0].real();
  lead_ = 1.0 / model_.psi_prime(phi_);
  terms_.push_back({Complex(lead_, 0.0), Complex(phi_, 0.0), false});

  std::sort(real_neg.begin(), real_neg.end(), std::greater<>());
  for (double r : real_neg) {
    const double c = -1.0 / model_.psi_prime(r);
    xi_.emplace_back(-r, 0.0);
    C_.emplace_back(c, 0.0);
    terms_.push_back({Complex(-c, 0.0), Complex(r, 0.0), false});
  }

  // Pair each upper root with its nearest lower partner and symmetrise.
  std::vector<bool> used(lower.size(), false);
  std::sort(upper.begin(), upper.end(), [](const Complex& a, const Complex& b) {
    return a.real() > b.real();
  });
  for (const Complex& u : upper) {
    std::size_t best = lower.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(std::conj(lower[k]) - u);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    const Complex r = 0.5 * (u + std::conj(lower[best]));
    const Complex c = -1.0 / model_.psi_prime(r);
    xi_.push_back(-r);
    C_.push_back(c);
    xi_.push_back(-std::conj(r));
    C_.push_back(std::conj(c));
    terms_.push_back({-c, r, true});
  }

  const double inv_r = sum_terms([](Complex a, Complex r) { return a / r; });
  const double inv_r2 =
      sum_terms([](Complex a, Complex r) { return a / (r * r); });
  kappa_z_ = 1.0 - q * inv_r;
  kappa_r_ = -mu_ / q - q * inv_r2;
}

template <class F>
double ScaleBasis::sum_terms(F&& f) const {
  double acc = 0.0;
  for (const Term& t : terms_) {
    const Complex v = f(t.coeff, t.rate);
    acc += t.paired ? 2.0 * v.real() : v.real();
  }
  return acc;
}

void ScaleBasis::guard(double x) const {
  if (phi_ * x > kExpLimit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "Phi(q) * x = " << phi_ * x << " exceeds " << kExpLimit
       << "; use the ratio evaluations";
    fail(ErrorCode::OverflowGuard, os.str());
  }
}

double ScaleBasis::W(double x) const {
  if (x < 0.0) return 0.0;
  guard(x);
  const double v =
      sum_terms([x](Complex a, Complex r) { return a * std::exp(r * x); });
  return std::max(v, 0.0);
}

double ScaleBasis::W_prime(double x) const {
  if (x < 0.0) return 0.0;
  guard(x);
  return sum_terms(
      [x](Complex a, Complex r) { return a * r * std::exp(r * x); });
}

double ScaleBasis::Wbar(double x) const {
  if (x <= 0.0) return 0.0;
  guard(x);
  return sum_terms([x](Complex a, Complex r) { return a * expm1c(r * x) / r; });
}

double ScaleBasis::Z(double x) const { return 1.0 + q() * Wbar(x); }

double ScaleBasis::Zbar(double x) const {
  if (x <= 0.0) return x;
  guard(x);
  return x + q() * sum_terms([x](Complex a, Complex r) {
           return a * expm1_minus_z(r * x) / (r * r);
         });
}

double ScaleBasis::R(double y) const { return Zbar(y) - mu_ / q(); }

double ScaleBasis::imag_residue(double x) const {
  if (x < 0.0) return 0.0;
  guard(x);
  Complex acc = 0.0;
  for (const Term& t : terms_) {
    acc += t.coeff * std::exp(t.rate * x);
    if (t.paired) acc += std::conj(t.coeff) * std::exp(std::conj(t.rate) * x);
  }
  return std::abs(acc.imag()) / std::max(std::abs(acc.real()), 1e-300);
}

ScaleBasis::Scaled ScaleBasis::scaled(double x) const {
  const double qq = q();
  const double e0 = std::exp(-phi_ * x);
  const double linear = kappa_z_ * x + kappa_r_;
  Scaled s{};
  s.w = lead_;
  s.wp = lead_ * phi_;
  s.z = kappa_z_ * e0 + qq * lead_ / phi_;
  s.r = linear * e0 + qq * lead_ / (phi_ * phi_);
  s.z_rest = kappa_z_;
  s.r_rest = linear;
  const double inv_p = 1.0 / phi_;
  for (std::size_t j = 1; j < terms_.size(); ++j) {
    const Term& t = terms_[j];
    const Complex r = t.rate;
    const Complex ir = 1.0 / r;
    const Complex e_full = t.coeff * std::exp(r * x);
    const Complex e = t.coeff * std::exp((r - phi_) * x);
    const double k = t.paired ? 2.0 : 1.0;
    s.w += k * e.real();
    s.wp += k * (e * r).real();
    s.z += k * qq * (e * ir).real();
    s.r += k * qq * (e * ir * ir).real();
    s.z_rest += k * qq * (e_full * (ir - inv_p)).real();
    s.r_rest += k * qq * (e_full * (ir * ir - inv_p * inv_p)).real();
  }
  s.w = std::max(s.w, 0.0);
  return s;
}

double ScaleBasis::W_ratio(double a, double b) const {
  if (a < 0.0) return 0.0;
  const Scaled sa = scaled(a);
  const Scaled sb = scaled(b);
  return std::exp(-phi_ * (b - a)) * sa.w / sb.w;
}

double ScaleBasis::W_log_derivative(double x) const {
  const Scaled s = scaled(x);
  return s.wp / s.w;
}

double ScaleBasis::Z_over_W(double x) const {
  const Scaled s = scaled(x);
  return s.z / s.w;
}

double ScaleBasis::R_over_W(double x) const {
  const Scaled s = scaled(x);
  return s.r / s.w;
}

double ScaleBasis::R_over_Z(double x) const {
  if (phi_ * x <= 600.0) return R(x) / Z(x);
  const Scaled s = scaled(x);
  return s.r / s.z;
}

double ScaleBasis::Wbar_over_W(double x) const {
  if (phi_ * x <= 600.0) {
    const double w = W(x);
    return w > 0.0 ? Wbar(x) / w : 0.0;
  }
  const Scaled s = scaled(x);
  return (s.z - std::exp(-phi_ * x)) / (q() * s.w);
}

double ScaleBasis::Z_gap(double a, double b) const {
  const Scaled sa = scaled(a);
  const Scaled sb = scaled(b);
  const double ratio = std::exp(-phi_ * (b - a)) * sa.w / sb.w;
  return sa.z_rest - ratio * sb.z_rest;
}

double ScaleBasis::R_gap(double a, double b) const {
  const Scaled sa = scaled(a);
  const Scaled sb = scaled(b);
  const double ratio = std::exp(-phi_ * (b - a)) * sa.w / sb.w;
  return sa.r_rest - ratio * sb.r_rest;
}

double ScaleBasis::exit_up(double x, double b) const {
  if (!(b > 0.0) || x < 0.0 || x > b) {
    std::ostringstream os;
    os << "exit_up needs 0 <= x <= b, b > 0 (x = " << x << ", b = " << b << ")";
    fail(ErrorCode::Domain, os.str());
  }
  return Z_gap(b - x, b);
}

double ScaleBasis::exit_down(double x, double b) const {
  if (!(b > 0.0) || x < 0.0 || x > b) {
    std::ostringstream os;
    os << "exit_down needs 0 <= x <= b, b > 0 (x = " << x << ", b = " << b
       << ")";
    fail(ErrorCode::Domain, os.str());
  }
  return W_ratio(b - x, b);
}

double ScaleBasis::laplace_check(double s) const {
  if (!(s > phi_)) {
    std::ostringstream os;
    os << "Laplace transform of W diverges for s = " << s
       << " <= Phi(q) = " << phi_;
    fail(ErrorCode::Domain, os.str());
  }
  const double A =
      std::min(kExpLimit / phi_, 16.0 * std::log(10.0) / (s - phi_));
  auto integrand = [this, s](double x) { return std::exp(-s * x) * W(x); };
  const double body = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, A, 20, 1e-14);
  const double tail = sum_terms([A, s](Complex a, Complex r) {
    return a * std::exp((r - s) * A) / (s - r);
  });
  const double exact = 1.0 / (model_.psi(s) - q());
  return std::abs(body + tail - exact) / std::abs(exact);
}

ScaleBasis find_roots(const LevyModel& model) { return ScaleBasis(model); }

}  // namespace dualdiv
