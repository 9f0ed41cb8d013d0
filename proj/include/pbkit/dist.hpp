#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pbkit/rational.hpp"

namespace pbkit {

// Finitely supported distribution on the affine lattice offset + step*{0..m}.
// The lattice geometry is always exact rational; masses are T (double or rational).
template <class T>
struct lattice_dist {
  rational offset = 0;
  rational step = 1;
  std::vector<T> masses;

  lattice_dist() = default;
  lattice_dist(rational off, rational st, std::vector<T> m)
      : offset(std::move(off)), step(std::move(st)), masses(std::move(m)) {
    if (step <= 0) throw std::domain_error("lattice_dist: step must be positive");
    for (const auto& x : masses)
      if (x < T(0)) throw std::domain_error("lattice_dist: negative mass");
  }

  std::size_t size() const { return masses.size(); }
  rational point(std::size_t i) const { return offset + step * static_cast<long>(i); }

  T total_mass() const {
    T s(0);
    for (const auto& m : masses) s += m;
    return s;
  }

  static lattice_dist point_mass(rational at) { return lattice_dist(std::move(at), 1, {T(1)}); }
};

using lattice_d = lattice_dist<double>;
using lattice_q = lattice_dist<rational>;

inline lattice_d to_float_dist(const lattice_q& d) {
  std::vector<double> m(d.masses.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = to_double(d.masses[i]);
  return {d.offset, d.step, std::move(m)};
}

// Law of floor(j*X/k) for X supported on {0,1,...,m}.
template <class T>
lattice_dist<T> floor_pushforward(const lattice_dist<T>& d, long j, long k) {
  if (j <= 0 || k <= 0) throw std::domain_error("floor_pushforward: j and k must be positive");
  if (d.offset != 0 || d.step != 1)
    throw std::domain_error("floor_pushforward: input must live on the integer lattice");
  if (d.masses.empty()) return d;
  long top = static_cast<long>(d.masses.size()) - 1;
  long ymax = (j * top) / k;
  std::vector<T> out(static_cast<std::size_t>(ymax) + 1, T(0));
  for (long x = 0; x <= top; ++x) out[static_cast<std::size_t>((j * x) / k)] += d.masses[static_cast<std::size_t>(x)];
  return {0, 1, std::move(out)};
}

template <class T>
lattice_dist<T> scale_pushforward(const lattice_dist<T>& d, const rational& factor) {
  if (factor <= 0) throw std::domain_error("scale_pushforward: factor must be positive");
  return {d.offset * factor, d.step * factor, d.masses};
}

// Support points with positive mass, as sorted (point, mass) pairs.
template <class T>
std::vector<std::pair<rational, T>> support_atoms(const lattice_dist<T>& d) {
  std::vector<std::pair<rational, T>> out;
  out.reserve(d.masses.size());
  for (std::size_t i = 0; i < d.masses.size(); ++i)
    if (d.masses[i] > T(0)) out.emplace_back(d.point(i), d.masses[i]);
  return out;
}

// Union of both supports with aligned mass pairs; points are exact rationals.
template <class T>
std::vector<std::pair<T, T>> aligned_masses(const lattice_dist<T>& a, const lattice_dist<T>& b,
                                            std::vector<rational>* points = nullptr) {
  std::map<rational, std::pair<T, T>> acc;
  for (std::size_t i = 0; i < a.masses.size(); ++i)
    if (!(a.masses[i] == T(0))) acc[a.point(i)].first += a.masses[i];
  for (std::size_t i = 0; i < b.masses.size(); ++i)
    if (!(b.masses[i] == T(0))) acc[b.point(i)].second += b.masses[i];
  std::vector<std::pair<T, T>> out;
  out.reserve(acc.size());
  for (auto& [pt, ms] : acc) {
    if (points) points->push_back(pt);
    out.push_back(ms);
  }
  return out;
}

// Bernoulli success probabilities (p_1,...,p_n).
template <class T>
struct basic_prob_params {
  std::vector<T> probs;

  basic_prob_params() = default;
  explicit basic_prob_params(std::vector<T> p) : probs(std::move(p)) {
    if (probs.empty()) throw std::domain_error("prob_params: need at least one probability");
    for (const auto& x : probs)
      if (x < T(0) || x > T(1)) throw std::domain_error("prob_params: probability outside [0,1]");
  }

  std::size_t n() const { return probs.size(); }
};

using prob_params = basic_prob_params<double>;
using prob_params_q = basic_prob_params<rational>;

inline prob_params to_float_params(const prob_params_q& p) {
  std::vector<double> v(p.probs.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = to_double(p.probs[i]);
  return prob_params(std::move(v));
}

// Snaps float parameters to denominators <= max_den; reports the largest snap error.
inline std::pair<prob_params_q, double> to_rational_params(const prob_params& p,
                                                           std::uint64_t max_den = 1000000) {
  std::vector<rational> v(p.probs.size());
  double worst = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto s = snap_to_rational(p.probs[i], max_den);
    if (s.value < 0) s.value = 0;
    if (s.value > 1) s.value = 1;
    v[i] = s.value;
    worst = std::max(worst, s.error);
  }
  return {prob_params_q(std::move(v)), worst};
}

template <class T>
basic_prob_params<T> binomial_params(std::size_t n, const T& p) {
  return basic_prob_params<T>(std::vector<T>(n, p));
}

}  // namespace pbkit
