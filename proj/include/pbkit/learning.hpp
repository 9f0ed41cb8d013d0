#pragma once

#include <cstdint>
#include <random>

#include "pbkit/metrics.hpp"
#include "pbkit/pb_core.hpp"

namespace pbkit {

struct sample_set {
  std::vector<long> draws;
  std::size_t n = 0;          // ambient trial count
  std::uint64_t seed = 0;
};

inline sample_set sample(const prob_params& params, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw std::domain_error("sample: need at least one draw");
  sample_set out;
  out.n = params.n();
  out.seed = seed;
  out.draws.reserve(m);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    long s = 0;
    for (double p : params.probs)
      if (u(rng) < p) ++s;
    out.draws.push_back(s);
  }
  return out;
}

enum class learner_branch { sparse, heavy };

struct learned_model {
  prob_params params{std::vector<double>{0.0}};
  learner_branch branch = learner_branch::sparse;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  std::size_t sample_size = 0;
  double window_tv = 0.0;  // sparse branch: fit quality against the empirical pmf
};

// The documented sample-size constant: m = (C/eps^2) * ln(1/delta).
constexpr double kLearnerSampleConstant = 100.0;
// Branch threshold on the empirical variance: below it the pmf is narrow
// enough for direct window fitting; above it moment matching rides on the
// mean/variance-matched shifted-Poisson regime.
constexpr double kLearnerVarianceThreshold = 10.0;

inline std::size_t learner_sample_size(double eps, double delta) {
  return static_cast<std::size_t>(std::ceil(kLearnerSampleConstant / (eps * eps) * std::log(1.0 / delta)));
}

namespace detail {

// (ones, count at p, p) -> parameter vector padded with zeros
inline std::vector<double> family_params(std::size_t n, std::size_t ones, std::size_t b, double p) {
  std::vector<double> out;
  out.reserve(n);
  out.insert(out.end(), ones, 1.0);
  out.insert(out.end(), b, std::clamp(p, 0.0, 1.0));
  if (out.size() < n) out.insert(out.end(), n - out.size(), 0.0);
  out.resize(n);
  return out;
}

inline std::vector<double> family_pmf(const std::vector<double>& ps) {
  std::vector<double> pmf{1.0};
  for (double p : ps) {
    std::vector<double> nxt(pmf.size() + 1, 0.0);
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      nxt[k] += pmf[k] * (1.0 - p);
      nxt[k + 1] += pmf[k] * p;
    }
    pmf = std::move(nxt);
  }
  return pmf;
}

}  // namespace detail

// Proper learner: always outputs a parameter vector. The sparse branch fits
// the empirical pmf on a mean-centred window over a (ones, b at p, zeros)
// family; the heavy branch matches mean and variance directly, mirroring the
// shifted-Poisson surrogate.
inline learned_model learn_pb(const sample_set& samples, double eps, double delta) {
  (void)delta;
  if (samples.draws.empty()) throw std::domain_error("learn_pb: empty sample");
  const std::size_t n = samples.n;
  learned_model out;
  out.sample_size = samples.draws.size();
  double mu = 0;
  for (long d : samples.draws) mu += static_cast<double>(d);
  mu /= static_cast<double>(samples.draws.size());
  double var = 0;
  for (long d : samples.draws) var += (static_cast<double>(d) - mu) * (static_cast<double>(d) - mu);
  var /= static_cast<double>(samples.draws.size());
  out.empirical_mean = mu;
  out.empirical_variance = var;

  if (var > kLearnerVarianceThreshold) {
    // match the mean exactly and get as close as the family allows in
    // variance, scanning the 0/1-split count
    out.branch = learner_branch::heavy;
    long best_a = 0, best_b = 1;
    double best_p = 1.0, best_gap = 1e300;
    for (long a = 0; a <= std::min<long>(static_cast<long>(std::floor(mu)), static_cast<long>(n) - 1); ++a) {
      double rest = mu - static_cast<double>(a);
      if (rest <= 1e-12) break;
      long bmax = static_cast<long>(n) - a;
      long bstar = rest > var ? static_cast<long>(std::llround(rest * rest / (rest - var))) : bmax;
      for (long b : {bstar - 1, bstar, bstar + 1, bmax}) {
        if (b < 1 || b > bmax) continue;
        if (static_cast<double>(b) < rest) continue;  // p would exceed one
        double p = rest / static_cast<double>(b);
        double gap = std::fabs(rest * (1.0 - p) - var);
        if (gap < best_gap) {
          best_gap = gap;
          best_a = a;
          best_b = b;
          best_p = p;
        }
      }
    }
    out.params = prob_params(detail::family_params(n, static_cast<std::size_t>(best_a),
                                                   static_cast<std::size_t>(best_b), best_p));
    return out;
  }

  out.branch = learner_branch::sparse;
  // empirical pmf, fitted over a window of half-width O(1/eps) around the mean
  std::vector<double> emp(n + 1, 0.0);
  for (long d : samples.draws) emp[static_cast<std::size_t>(std::clamp<long>(d, 0, static_cast<long>(n)))] += 1.0;
  for (auto& e : emp) e /= static_cast<double>(samples.draws.size());
  long half = static_cast<long>(std::ceil(1.0 / eps)) + static_cast<long>(std::ceil(3.0 * std::sqrt(std::max(var, 1e-12)))) + 1;
  long lo = std::clamp(static_cast<long>(std::llround(mu)) - half, 0L, static_cast<long>(n));
  long hi = std::clamp(static_cast<long>(std::llround(mu)) + half, 0L, static_cast<long>(n));

  auto window_tv = [&](const std::vector<double>& pmf) {
    double s = 0;
    for (long k = lo; k <= hi; ++k) {
      double a = k < static_cast<long>(pmf.size()) ? pmf[static_cast<std::size_t>(k)] : 0.0;
      s += std::fabs(a - emp[static_cast<std::size_t>(k)]);
    }
    // everything outside the window counts fully against the candidate
    double inside = 0;
    for (long k = lo; k <= hi && k < static_cast<long>(pmf.size()); ++k)
      inside += pmf[static_cast<std::size_t>(k)];
    s += 1.0 - inside;
    return 0.5 * s;
  };

  double best_tv = 2.0;
  std::vector<double> best = detail::family_params(n, 0, 0, 0.0);
  long a_center = std::clamp(static_cast<long>(std::floor(mu - var)), 0L, static_cast<long>(n));
  for (long a = std::max(0L, a_center - 4); a <= std::min<long>(static_cast<long>(n), a_center + 2); ++a) {
    double rest = mu - static_cast<double>(a);
    if (rest < 1e-12) {
      auto cand = detail::family_params(n, static_cast<std::size_t>(a), 0, 0.0);
      double tv = window_tv(detail::family_pmf(cand));
      if (tv < best_tv) {
        best_tv = tv;
        best = cand;
      }
      continue;
    }
    for (long b = std::max(1L, static_cast<long>(std::ceil(rest)) - 1); b <= static_cast<long>(n) - a; ++b) {
      double p0 = rest / static_cast<double>(b);
      for (double p : {p0, p0 * 0.9, std::min(1.0, p0 * 1.1), std::clamp(1.0 - var / rest, 1e-9, 1.0)}) {
        if (p <= 0 || p > 1) continue;
        auto cand = detail::family_params(n, static_cast<std::size_t>(a), static_cast<std::size_t>(b), p);
        double tv = window_tv(detail::family_pmf(cand));
        if (tv < best_tv) {
          best_tv = tv;
          best = cand;
        }
      }
    }
  }
  out.params = prob_params(best);
  out.window_tv = best_tv;
  return out;
}

struct eval_report {
  double success_rate = 0.0;
  double mean_tv = 0.0;
  std::size_t sample_size = 0;
  std::size_t trials = 0;
  double constant = kLearnerSampleConstant;
};

inline double exact_tv_to_truth(const learned_model& model, const prob_params& truth) {
  return tv_distance(pb_pmf(model.params).pmf, pb_pmf(truth).pmf);
}

// Seeded trials; each trial draws its own stream (seed + index) so parallel
// schedules cannot change the outcome.
inline eval_report evaluate_learner(const prob_params& truth, double eps, double delta,
                                    std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::domain_error("evaluate_learner: need at least one trial");
  eval_report out;
  out.trials = trials;
  out.sample_size = learner_sample_size(eps, delta);
  std::size_t ok = 0;
  double tv_sum = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto s = sample(truth, out.sample_size, seed + t);
    auto model = learn_pb(s, eps, delta);
    double tv = exact_tv_to_truth(model, truth);
    tv_sum += tv;
    if (tv <= eps) ++ok;
  }
  out.success_rate = static_cast<double>(ok) / static_cast<double>(trials);
  out.mean_tv = tv_sum / static_cast<double>(trials);
  return out;
}

struct separation_report {
  double accuracy = 0.0;   // learner-based classification accuracy
  std::size_t sample_size = 0;
  std::size_t trials = 0;
};

// Can the learner tell Bin(n, 1/2) from Bin(n, 1/2 + eps/sqrt(n)) with m
// samples? Each trial draws from one of the pair and classifies by the
// TV-closer truth to the learned model.
inline separation_report distinguish_test(std::size_t n, double eps, std::size_t m,
                                          std::size_t trials, std::uint64_t seed) {
  separation_report out;
  out.sample_size = m;
  out.trials = trials;
  prob_params a = binomial_params<double>(n, 0.5);
  prob_params b = binomial_params<double>(n, 0.5 + eps / std::sqrt(static_cast<double>(n)));
  auto pa = pb_pmf(a).pmf;
  auto pb_ = pb_pmf(b).pmf;
  std::mt19937_64 pick(seed ^ 0x9e3779b97f4a7c15ull);
  std::size_t correct = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    bool truth_is_b = (pick() & 1) != 0;
    auto s = sample(truth_is_b ? b : a, m, seed + t);
    auto model = learn_pb(s, eps, 0.1);
    auto learned = pb_pmf(model.params).pmf;
    double da = tv_distance(learned, pa);
    double db = tv_distance(learned, pb_);
    bool guess_b = db < da;
    if (guess_b == truth_is_b) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(trials);
  return out;
}

}  // namespace pbkit
