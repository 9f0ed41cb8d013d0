#pragma once

#include <cmath>

#include "pbkit/dist.hpp"

namespace pbkit {

constexpr double kPoissonTailCutoff = 1e-15;

struct truncated_dist {
  lattice_d dist;
  double truncated_mass = 0.0;  // reported as an error bar on derived distances
};

// Poisson(lambda) restricted to the atoms covering all but kPoissonTailCutoff
// of the mass.
inline truncated_dist poisson_pmf(double lambda, double cutoff = kPoissonTailCutoff) {
  if (lambda < 0) throw std::domain_error("poisson_pmf: negative rate");
  if (lambda == 0) return {lattice_d(0, 1, {1.0}), 0.0};
  std::vector<double> m;
  double term = std::exp(-lambda), cum = term;
  m.push_back(term);
  // walk right until the remaining tail is provably below the cutoff
  for (long k = 1;; ++k) {
    term *= lambda / static_cast<double>(k);
    m.push_back(term);
    cum += term;
    if (static_cast<double>(k) > lambda && 1.0 - cum < cutoff) break;
    if (k > 2000000) break;
  }
  return {lattice_d(0, 1, std::move(m)), std::max(0.0, 1.0 - cum)};
}

inline double poisson_cdf(double lambda, long k) {
  if (k < 0) return 0.0;
  double term = std::exp(-lambda), cum = term;
  for (long i = 1; i <= k; ++i) {
    term *= lambda / static_cast<double>(i);
    cum += term;
  }
  return std::min(1.0, cum);
}

// P(Poi(lambda) >= k), summed from the small side when that is the tail.
inline double poisson_tail(double lambda, long k) {
  if (k <= 0) return 1.0;
  if (static_cast<double>(k) <= lambda + 1) return 1.0 - poisson_cdf(lambda, k - 1);
  double logterm = -lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1);
  double term = std::exp(logterm), s = 0.0;
  for (long i = k; term > 0 && i < k + 3000000; ++i) {
    s += term;
    term *= lambda / static_cast<double>(i + 1);
    if (term < s * 1e-18) break;
  }
  return s;
}

// Integer-shifted Poisson matching the mean and almost matching the variance:
// X - shift ~ Poi(rate) with shift = floor(mu - sigma2), rate = sigma2 + frac.
struct translated_poisson {
  double mu = 0.0;
  double sigma2 = 1.0;
  long shift = 0;
  double rate = 1.0;

  translated_poisson(double m, double s2) : mu(m), sigma2(s2) {
    if (!(s2 > 0)) throw std::domain_error("translated_poisson: variance must be positive");
    double gamma = mu - sigma2;
    shift = static_cast<long>(std::floor(gamma));
    rate = sigma2 + (gamma - std::floor(gamma));
  }

  double mean() const { return static_cast<double>(shift) + rate; }
  double variance() const { return rate; }

  truncated_dist pmf(double cutoff = kPoissonTailCutoff) const {
    auto base = poisson_pmf(rate, cutoff);
    base.dist.offset = rational(shift);
    return base;
  }
  double tail(long t) const { return poisson_tail(rate, t - shift); }
};

}  // namespace pbkit
