#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "error.hpp"

namespace dualdiv {

namespace {

void check_config(const SimConfig& cfg) {
  if (cfg.paths < 1) fail(ErrorCode::Config, "paths must be >= 1");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    fail(ErrorCode::Config, "dt must be > 0");
  if (!(cfg.discount_floor > 0.0 && cfg.discount_floor < 1.0))
    fail(ErrorCode::Config, "discount_floor must lie in (0, 1)");
  if (cfg.threads < 1) fail(ErrorCode::Config, "threads must be >= 1");
}

double exponential(Rng& rng, double rate) {
  return -std::log(uniform_open0(rng)) / rate;
}

double standard_normal(Rng& rng) {
  const double u1 = uniform_open0(rng);
  const double u2 = uniform_open0(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

// Cumulative tables for the embedded jump chain of a phase-type law.
class PhaseSampler {
 public:
  explicit PhaseSampler(const PhaseTypeDist& dist)
      : m_(dist.phases()), mass_(dist.mass()) {
    const auto& a = dist.alpha();
    const auto& T = dist.generator();
    const auto& t = dist.exit_rates();
    start_.resize(static_cast<std::size_t>(m_));
    double acc = 0.0;
    for (int i = 0; i < m_; ++i) {
      acc += a(i);
      start_[static_cast<std::size_t>(i)] = acc;
    }
    rate_.resize(static_cast<std::size_t>(m_));
    next_.assign(static_cast<std::size_t>(m_) * (m_ + 1), 0.0);
    for (int i = 0; i < m_; ++i) {
      const double out = -T(i, i);
      rate_[static_cast<std::size_t>(i)] = out;
      double c = 0.0;
      for (int j = 0; j < m_; ++j) {
        if (j != i) c += T(i, j) / out;
        next_[idx(i, j)] = c;
      }
      c += t(i) / out;
      next_[idx(i, m_)] = c;
    }
  }

  double operator()(Rng& rng) const {
    double u = uniform_open0(rng);
    if (u > mass_) return 0.0;
    int phase = pick(start_.data(), m_, u);
    double time = 0.0;
    while (phase < m_) {
      time += exponential(rng, rate_[static_cast<std::size_t>(phase)]);
      u = uniform_open0(rng) * next_[idx(phase, m_)];
      phase = pick(&next_[idx(phase, 0)], m_ + 1, u);
    }
    return time;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * (m_ + 1) + j;
  }

  // First k with u <= cum[k], skipping zero-probability slots.
  static int pick(const double* cum, int n, double u) {
    double prev = 0.0;
    for (int k = 0; k < n; ++k) {
      if (cum[k] > prev && u <= cum[k]) return k;
      prev = cum[k];
    }
    for (int k = n - 1; k >= 0; --k)
      if (cum[k] > (k > 0 ? cum[k - 1] : 0.0)) return k;
    return n - 1;
  }

  int m_;
  double mass_;
  std::vector<double> start_;
  std::vector<double> rate_;
  std::vector<double> next_;
};

struct PathOutcome {
  double value = 0.0;
  double value2 = 0.0;
  bool truncated = false;
};

template <class PathFn>
void run_paths(const SimConfig& cfg, std::vector<PathOutcome>& out,
               PathFn&& path) {
  out.assign(static_cast<std::size_t>(cfg.paths), {});
  const auto n = static_cast<std::int64_t>(out.size());
  const int threads =
      static_cast<int>(std::clamp<std::int64_t>(cfg.threads, 1, n));
  auto work = [&](int t) {
    for (std::int64_t i = t; i < n; i += threads) {
      Rng rng = path_rng(cfg.seed, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = path(rng);
    }
  };
  if (threads == 1) {
    work(0);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
  for (auto& th : pool) th.join();
}

}  // namespace

Rng path_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

double uniform_open0(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double sample_phase_type(Rng& rng, const PhaseTypeDist& dist) {
  return PhaseSampler(dist)(rng);
}

SimResult summarize(const std::vector<double>& samples, std::int64_t truncated,
                    std::uint64_t seed) {
  SimResult r;
  r.paths = static_cast<std::int64_t>(samples.size());
  r.seed = seed;
  if (samples.empty()) return r;
  const double n = static_cast<double>(samples.size());
  r.mean = pairwise_sum(samples.data(), samples.size()) / n;
  if (samples.size() > 1) {
    std::vector<double> dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d = samples[i] - r.mean;
      dev[i] = d * d;
    }
    r.std_error =
        std::sqrt(pairwise_sum(dev.data(), dev.size()) / (n - 1.0) / n);
  }
  r.truncated_fraction = static_cast<double>(truncated) / n;
  return r;
}

SimResult simulate_value(const LevyModel& model, Policy policy, double beta,
                         double x, const SimConfig& cfg) {
  check_config(cfg);
  if (!(x >= 0.0) || !std::isfinite(x))
    fail(ErrorCode::Domain, "x must be finite and >= 0");
  if (!(policy.c1 >= 0.0) || !(policy.c2 > policy.c1))
    fail(ErrorCode::Domain, "policy needs 0 <= c1 < c2");
  if (!(beta > 0.0)) fail(ErrorCode::Domain, "beta must be > 0");

  const PhaseSampler jumps(model.jumps());
  const double d = model.drift_d();
  const double sigma = model.sigma();
  const double lambda = model.lambda();
  const double q = model.q();
  const double t_max = -std::log(cfg.discount_floor) / q;

  auto path = [&](Rng& rng) {
    PathOutcome out;
    double u = x;
    double t = 0.0;
    auto pay_if_triggered = [&] {
      if (u >= policy.c2) {
        out.value += std::exp(-q * t) * (u - policy.c1 - beta);
        u = policy.c1;
      }
    };
    pay_if_triggered();
    if (sigma == 0.0) {
      for (;;) {
        const double tau = exponential(rng, lambda);
        if (tau >= u / d) return out;  // drifts below zero before the jump
        t += tau;
        if (t > t_max) {
          out.truncated = true;
          return out;
        }
        u += -d * tau + jumps(rng);
        pay_if_triggered();
      }
    }
    const double sdt = std::sqrt(cfg.dt);
    for (;;) {
      const double next_jump = t + exponential(rng, lambda);
      while (t < next_jump) {
        const double h = std::min(cfg.dt, next_jump - t);
        u += -d * h + sigma * (h == cfg.dt ? sdt : std::sqrt(h)) *
                          standard_normal(rng);
        t += h;
        if (u < 0.0) return out;
        pay_if_triggered();
        if (t > t_max) {
          out.truncated = true;
          return out;
        }
      }
      u += jumps(rng);
      pay_if_triggered();
    }
  };

  std::vector<PathOutcome> outcomes;
  run_paths(cfg, outcomes, path);
  std::vector<double> values(outcomes.size());
  std::int64_t truncated = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    values[i] = outcomes[i].value;
    truncated += outcomes[i].truncated ? 1 : 0;
  }
  return summarize(values, truncated, cfg.seed);
}

std::pair<SimResult, SimResult> simulate_exit(const LevyModel& model, double x,
                                              double b, const SimConfig& cfg) {
  check_config(cfg);
  if (!(b > 0.0) || !(x >= 0.0) || !(x <= b))
    fail(ErrorCode::Domain, "exit estimates need 0 <= x <= b, b > 0");

  const PhaseSampler jumps(model.jumps());
  const double d = model.drift_d();
  const double sigma = model.sigma();
  const double lambda = model.lambda();
  const double q = model.q();
  const double t_max = -std::log(cfg.discount_floor) / q;

  // value = up functional, value2 = down functional.
  auto path = [&](Rng& rng) {
    PathOutcome out;
    double u = x;
    double t = 0.0;
    if (sigma == 0.0) {
      for (;;) {
        const double tau = exponential(rng, lambda);
        if (tau >= u / d) {
          out.value2 = std::exp(-q * (t + u / d));
          return out;
        }
        t += tau;
        if (t > t_max) {
          out.truncated = true;
          return out;
        }
        u += -d * tau + jumps(rng);
        if (u > b) {
          out.value = std::exp(-q * t);
          return out;
        }
      }
    }
    const double sdt = std::sqrt(cfg.dt);
    for (;;) {
      const double next_jump = t + exponential(rng, lambda);
      while (t < next_jump) {
        const double h = std::min(cfg.dt, next_jump - t);
        u += -d * h + sigma * (h == cfg.dt ? sdt : std::sqrt(h)) *
                          standard_normal(rng);
        t += h;
        if (u < 0.0) {
          out.value2 = std::exp(-q * t);
          return out;
        }
        if (u > b) {
          out.value = std::exp(-q * t);
          return out;
        }
        if (t > t_max) {
          out.truncated = true;
          return out;
        }
      }
      u += jumps(rng);
      if (u > b) {
        out.value = std::exp(-q * t);
        return out;
      }
    }
  };

  std::vector<PathOutcome> outcomes;
  run_paths(cfg, outcomes, path);
  std::vector<double> up(outcomes.size());
  std::vector<double> down(outcomes.size());
  std::int64_t truncated = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    up[i] = outcomes[i].value;
    down[i] = outcomes[i].value2;
    truncated += outcomes[i].truncated ? 1 : 0;
  }
  return {summarize(up, truncated, cfg.seed),
          summarize(down, truncated, cfg.seed)};
}

}  // namespace dualdiv
