#pragma once

#include "pbkit/metrics.hpp"
#include "pbkit/pb_core.hpp"
#include "pbkit/poisson.hpp"

namespace pbkit {

// Every report pairs the exact distance with its published bound so test
// suites can assert the sandwich directly; truncation of the reference
// measure is carried as an explicit error bar.

struct poisson_report {
  double tv = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double truncation = 0.0;
};

inline poisson_report poisson_approx_report(const prob_params& params) {
  auto [mu, var] = mean_var(params);
  (void)var;
  poisson_report out;
  double sum_p2 = 0;
  for (double p : params.probs) sum_p2 += p * p;
  if (mu == 0.0) return out;
  auto poi = poisson_pmf(mu);
  out.tv = tv_distance(pb_pmf(params).pmf, poi.dist);
  out.truncation = poi.truncated_mass;
  out.lower = (1.0 / 32.0) * std::min(1.0, 1.0 / mu) * sum_p2;
  // (1-e^{-mu})/mu: tight for a single deterministic success
  out.upper = (1.0 - std::exp(-mu)) / mu * sum_p2;
  return out;
}

struct tp_report {
  double tv = 0.0;
  double bound = 0.0;
  double truncation = 0.0;
  long shift = 0;
  double rate = 0.0;
};

inline tp_report translated_poisson_report(const prob_params& params) {
  auto [mu, var] = mean_var(params);
  if (!(var > 0)) throw std::domain_error("translated_poisson_report: zero variance");
  tp_report out;
  double p3 = 0;
  for (double p : params.probs) p3 += p * p * p * (1.0 - p);
  out.bound = (2.0 + std::sqrt(p3)) / var;
  translated_poisson tp(mu, var);
  out.shift = tp.shift;
  out.rate = tp.rate;
  auto pm = tp.pmf();
  out.truncation = pm.truncated_mass;
  out.tv = tv_distance(pb_pmf(params).pmf, pm.dist);
  return out;
}

struct normal_report {
  double kolmogorov = 0.0;
  double shi_bound = 0.0;
  double pointwise_max = 0.0;   // against the density phi(z)/sigma
  double sigma_scaled_pointwise = 0.0;
};

inline normal_report normal_bound_report(const prob_params& params) {
  auto [mu, var] = mean_var(params);
  if (!(var > 0)) throw std::domain_error("normal_bound_report: zero variance");
  normal_report out;
  double sigma = std::sqrt(var);
  auto d = pb_pmf(params);
  out.kolmogorov = kolmogorov_vs_normal(d.pmf, normal_ref(mu, var));
  out.shi_bound = 0.7915 / sigma;
  for (std::size_t k = 0; k < d.pmf.masses.size(); ++k) {
    double z = (static_cast<double>(k) - mu) / sigma;
    out.pointwise_max = std::max(out.pointwise_max,
                                 std::fabs(d.pmf.masses[k] - normal_pdf(z) / sigma));
  }
  out.sigma_scaled_pointwise = sigma * out.pointwise_max;
  return out;
}

struct ehm_report {
  double tv = 0.0;
  double bound = 0.0;
};

inline ehm_report ehm_binomial_report(const prob_params& params) {
  auto [mu, var] = mean_var(params);
  (void)var;
  const double n = static_cast<double>(params.n());
  if (!(mu > 0) || !(mu < n)) throw std::domain_error("ehm_binomial_report: mean at a degenerate endpoint");
  const double q = mu / n;
  double spread = 0;
  for (double p : params.probs) spread += (p - q) * (p - q);
  ehm_report out;
  out.bound = (1.0 - std::pow(q, n + 1) - std::pow(1.0 - q, n + 1)) /
              ((n + 1.0) * (1.0 - q) * q) * spread;
  out.tv = tv_distance(pb_pmf(params).pmf,
                       pb_pmf(binomial_params<double>(params.n(), q)).pmf);
  return out;
}

struct choi_xia_result {
  std::vector<std::pair<long, double>> d_m;  // (m, TV against Bin(m, mu/m))
  double tv_poisson = 0.0;
  long m0 = -1;  // first m with the in-range tail increasing and below tv_poisson
};

inline choi_xia_result choi_xia_sequence(const prob_params& params, long m_lo, long m_hi) {
  auto [mu, var] = mean_var(params);
  (void)var;
  if (!(mu > 0)) throw std::domain_error("choi_xia_sequence: zero mean");
  choi_xia_result out;
  auto x = pb_pmf(params).pmf;
  auto poi = poisson_pmf(mu);
  out.tv_poisson = tv_distance(x, poi.dist);
  m_lo = std::max(m_lo, static_cast<long>(std::ceil(mu)));
  for (long m = m_lo; m <= m_hi; ++m) {
    auto bin = pb_pmf(binomial_params<double>(static_cast<std::size_t>(m), mu / static_cast<double>(m))).pmf;
    out.d_m.emplace_back(m, tv_distance(x, bin));
  }
  for (std::size_t i = 0; i < out.d_m.size(); ++i) {
    bool ok = true;
    for (std::size_t j = i; j < out.d_m.size(); ++j) {
      if (out.d_m[j].second >= out.tv_poisson) ok = false;
      if (j + 1 < out.d_m.size() && out.d_m[j].second >= out.d_m[j + 1].second) ok = false;
    }
    if (ok) {
      out.m0 = out.d_m[i].first;
      break;
    }
  }
  return out;
}

// (mu/t)^t ((n-mu)/(n-t))^{n-t}; dominates P(X >= t) for any PB with mean mu
// once t >= mu + 1. Convention 0^0 = 1 at t = n.
inline double binomial_tail_bound(long n, double mu, double t) {
  if (!(t > mu)) throw std::domain_error("binomial_tail_bound: need t > mu");
  if (t > static_cast<double>(n)) throw std::domain_error("binomial_tail_bound: t beyond n");
  double logv = t * (std::log(mu) - std::log(t));
  if (t < static_cast<double>(n))
    logv += (static_cast<double>(n) - t) *
            (std::log(static_cast<double>(n) - mu) - std::log(static_cast<double>(n) - t));
  return std::exp(logv);
}

// Matched-pair worst-case analysis: each pair contributes a Bernoulli with
// p_k = c_k1 pi_k + c_k2 (1 - pi_k); the tail is maximized at the box corner.
struct sensitivity_instance {
  std::vector<std::pair<int, int>> pairs;  // (c_k1, c_k2) in {0,1}^2
  double gamma = 1.0;
  long t = 0;
  double alpha = 0.05;
};

struct sensitivity_tail {
  double exact = 0.0;
  double tp_approx = 0.0;
  std::vector<double> worst_p;  // the maximizing Bernoulli parameters
};

inline sensitivity_tail sensitivity_worst_tail(const sensitivity_instance& inst) {
  if (inst.gamma < 1.0) throw std::domain_error("sensitivity_worst_tail: gamma must be >= 1");
  sensitivity_tail out;
  const double hi = inst.gamma / (1.0 + inst.gamma), lo = 1.0 / (1.0 + inst.gamma);
  for (auto [c1, c2] : inst.pairs) {
    // p is monotone in pi: increasing when c1 > c2, decreasing when c1 < c2
    double pi = c1 >= c2 ? hi : lo;
    out.worst_p.push_back(static_cast<double>(c1) * pi + static_cast<double>(c2) * (1.0 - pi));
  }
  if (inst.t > static_cast<long>(inst.pairs.size())) {
    out.exact = 0.0;
    out.tp_approx = 0.0;
    return out;
  }
  prob_params params(out.worst_p.empty() ? std::vector<double>{0.0} : out.worst_p);
  auto d = pb_pmf(params);
  double below = inst.t >= 1 ? pb_cdf(d, std::min<long>(inst.t - 1, static_cast<long>(params.n()))) : 0.0;
  out.exact = inst.t <= 0 ? 1.0 : 1.0 - below;
  // translated-Poisson surrogate: A = floor(sum p^2), lambda = sum p - A, K = t - A
  double sp = 0, sp2 = 0;
  for (double p : out.worst_p) {
    sp += p;
    sp2 += p * p;
  }
  long a = static_cast<long>(std::floor(sp2));
  double lambda = sp - static_cast<double>(a);
  out.tp_approx = lambda > 0 ? poisson_tail(lambda, inst.t - a) : (inst.t - a <= 0 ? 1.0 : 0.0);
  return out;
}

struct gamma_search {
  bool rejected_at_one = false;   // the null already exceeds the level
  bool unbounded = false;         // tail stays below alpha for every gamma probed
  double gamma_star = 1.0;
  double tail_at_star = 0.0;
  bool monotone = true;           // empirical monotonicity precheck
};

// Largest gamma whose worst-case tail stays within alpha, by bisection; the
// tail's monotonicity in gamma is checked on a grid first and the search
// falls back to a scan when it fails.
inline gamma_search sensitivity_max_gamma(std::vector<std::pair<int, int>> pairs, long t,
                                          double alpha, double gamma_hi = 1e6) {
  if (!(alpha > 0) || alpha > 1) throw std::domain_error("sensitivity_max_gamma: alpha in (0,1]");
  gamma_search out;
  auto tail_at = [&](double g) {
    sensitivity_instance inst{pairs, g, t, alpha};
    return sensitivity_worst_tail(inst).exact;
  };
  if (alpha >= 1.0) {
    out.unbounded = true;
    out.gamma_star = std::numeric_limits<double>::infinity();
    return out;
  }
  double t1 = tail_at(1.0);
  if (t1 > alpha) {
    out.rejected_at_one = true;
    out.tail_at_star = t1;
    return out;
  }
  double prev = t1;
  for (double g = 1.0; g <= 16.0; g *= 2.0) {
    double v = tail_at(g);
    if (v < prev - 1e-12) out.monotone = false;
    prev = v;
  }
  if (tail_at(gamma_hi) <= alpha) {
    out.unbounded = true;
    out.gamma_star = std::numeric_limits<double>::infinity();
    out.tail_at_star = tail_at(gamma_hi);
    return out;
  }
  double lo = 1.0, hi = gamma_hi;
  if (!out.monotone) {
    // coarse grid scan for the last admissible point
    double best = 1.0;
    for (double g = 1.0; g <= gamma_hi; g *= 1.01)
      if (tail_at(g) <= alpha) best = g;
    out.gamma_star = best;
    out.tail_at_star = tail_at(best);
    return out;
  }
  while (hi - lo > 1e-6) {
    double mid = 0.5 * (lo + hi);
    if (tail_at(mid) <= alpha)
      lo = mid;
    else
      hi = mid;
  }
  out.gamma_star = lo;
  out.tail_at_star = tail_at(lo);
  return out;
}

}  // namespace pbkit
