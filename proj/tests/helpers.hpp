#pragma once

#include <random>

#include "pbkit/dist.hpp"

namespace test_helpers {

inline pbkit::prob_params random_params(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (auto& x : p) x = u(rng);
  return pbkit::prob_params(std::move(p));
}

// Random rational probabilities a/b with a <= b <= max_den, kept away from 0 and 1.
inline pbkit::prob_params_q random_params_q(std::mt19937_64& rng, std::size_t n,
                                            long max_den = 64, bool interior = true) {
  std::uniform_int_distribution<long> dend(2, max_den);
  std::vector<pbkit::rational> p(n);
  for (auto& x : p) {
    long b = dend(rng);
    std::uniform_int_distribution<long> numd(interior ? 1 : 0, interior ? b - 1 : b);
    x = pbkit::rational(numd(rng), b);
  }
  return pbkit::prob_params_q(std::move(p));
}

}  // namespace test_helpers
