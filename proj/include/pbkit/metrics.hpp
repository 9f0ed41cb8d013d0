#pragma once

#include <cmath>
#include <tuple>

#include "pbkit/dist.hpp"
#include "pbkit/normal.hpp"

namespace pbkit {

// Transference plan between two finitely supported distributions; entries are
// (source atom index, target atom index, mass).
template <class T>
struct coupling {
  std::vector<std::pair<rational, T>> source;
  std::vector<std::pair<rational, T>> target;
  std::vector<std::tuple<std::size_t, std::size_t, T>> plan;

  bool marginals_ok(double tol = 1e-12) const {
    std::vector<T> rs(source.size(), T(0)), cs(target.size(), T(0));
    for (const auto& [i, j, m] : plan) {
      rs[i] += m;
      cs[j] += m;
    }
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if constexpr (std::is_same_v<T, rational>) {
        if (rs[i] != source[i].second) return false;
      } else {
        if (std::fabs(rs[i] - source[i].second) > tol) return false;
      }
    }
    for (std::size_t j = 0; j < cs.size(); ++j) {
      if constexpr (std::is_same_v<T, rational>) {
        if (cs[j] != target[j].second) return false;
      } else {
        if (std::fabs(cs[j] - target[j].second) > tol) return false;
      }
    }
    return true;
  }
};

template <class T>
T tv_distance(const lattice_dist<T>& a, const lattice_dist<T>& b) {
  auto pairs = aligned_masses(a, b);
  T s(0);
  for (const auto& [ma, mb] : pairs) s += ma > mb ? ma - mb : mb - ma;
  return s / T(2);
}

// The monotone (quantile) coupling, walking both cumulative distributions.
template <class T>
coupling<T> monotone_coupling(const lattice_dist<T>& a, const lattice_dist<T>& b) {
  coupling<T> out;
  out.source = support_atoms(a);
  out.target = support_atoms(b);
  if (out.source.empty() || out.target.empty())
    throw std::domain_error("monotone_coupling: empty distribution");
  std::size_t ia = 0, ib = 0;
  T ca = out.source[0].second, cb = out.target[0].second, prev(0);
  while (true) {
    T cur = ca < cb ? ca : cb;
    T seg = cur - prev;
    if (seg > T(0)) out.plan.emplace_back(ia, ib, seg);
    prev = cur;
    bool adv_a = !(cb < ca);   // ca <= cb
    bool adv_b = !(ca < cb);   // cb <= ca
    if (adv_a && adv_b) {
      ++ia;
      ++ib;
      if (ia >= out.source.size() || ib >= out.target.size()) break;
      ca += out.source[ia].second;
      cb += out.target[ib].second;
    } else if (adv_a) {
      ++ia;
      if (ia >= out.source.size()) break;
      ca += out.source[ia].second;
    } else {
      ++ib;
      if (ib >= out.target.size()) break;
      cb += out.target[ib].second;
    }
  }
  return out;
}

// sup_u |F_a^{-1}(u) - F_b^{-1}(u)|, exact on rational inputs.
template <class T>
rational winf(const lattice_dist<T>& a, const lattice_dist<T>& b) {
  auto c = monotone_coupling(a, b);
  rational best(0);
  for (const auto& [i, j, m] : c.plan) {
    (void)m;
    rational d = abs_r(c.source[i].first - c.target[j].first);
    if (d > best) best = d;
  }
  return best;
}

template <class T>
double wasserstein_p(const lattice_dist<T>& a, const lattice_dist<T>& b, double p) {
  if (p < 1) throw std::domain_error("wasserstein_p: p must be >= 1");
  auto c = monotone_coupling(a, b);
  double acc = 0;
  for (const auto& [i, j, m] : c.plan) {
    double d = std::fabs(to_double(c.source[i].first) - to_double(c.target[j].first));
    acc += to_double(m) * std::pow(d, p);
  }
  return std::pow(acc, 1.0 / p);
}

namespace detail {

// Edmonds-Karp max-flow on a dense capacity matrix; exact for rational T.
template <class T>
T max_flow(std::vector<std::vector<T>>& cap, int s, int t) {
  const int n = static_cast<int>(cap.size());
  T flow(0);
  while (true) {
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    parent[static_cast<std::size_t>(s)] = s;
    std::vector<int> queue{s};
    for (std::size_t qi = 0; qi < queue.size() && parent[static_cast<std::size_t>(t)] < 0; ++qi) {
      int u = queue[qi];
      for (int v = 0; v < n; ++v)
        if (parent[static_cast<std::size_t>(v)] < 0 && cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] > T(0)) {
          parent[static_cast<std::size_t>(v)] = u;
          queue.push_back(v);
        }
    }
    if (parent[static_cast<std::size_t>(t)] < 0) return flow;
    T aug = cap[static_cast<std::size_t>(parent[static_cast<std::size_t>(t)])][static_cast<std::size_t>(t)];
    for (int v = t; v != s; v = parent[static_cast<std::size_t>(v)]) {
      int u = parent[static_cast<std::size_t>(v)];
      if (cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] < aug)
        aug = cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
    }
    if constexpr (std::is_same_v<T, double>) {
      if (aug < 1e-15) return flow;
    }
    for (int v = t; v != s; v = parent[static_cast<std::size_t>(v)]) {
      int u = parent[static_cast<std::size_t>(v)];
      cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] -= aug;
      cap[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] += aug;
    }
    flow += aug;
  }
}

// Can the whole mass move with every pairing kept within distance t?
template <class T>
bool coupling_feasible_within(const std::vector<std::pair<rational, T>>& sa,
                              const std::vector<std::pair<rational, T>>& sb, const rational& t) {
  const int na = static_cast<int>(sa.size()), nb = static_cast<int>(sb.size());
  const int N = na + nb + 2, S = 0, D = N - 1;
  std::vector<std::vector<T>> cap(static_cast<std::size_t>(N), std::vector<T>(static_cast<std::size_t>(N), T(0)));
  T total(0);
  for (int i = 0; i < na; ++i) {
    cap[0][static_cast<std::size_t>(1 + i)] = sa[static_cast<std::size_t>(i)].second;
    total += sa[static_cast<std::size_t>(i)].second;
  }
  for (int j = 0; j < nb; ++j)
    cap[static_cast<std::size_t>(1 + na + j)][static_cast<std::size_t>(D)] = sb[static_cast<std::size_t>(j)].second;
  bool any_row_empty = false;
  for (int i = 0; i < na; ++i) {
    bool row = false;
    for (int j = 0; j < nb; ++j)
      if (abs_r(sa[static_cast<std::size_t>(i)].first - sb[static_cast<std::size_t>(j)].first) <= t) {
        cap[static_cast<std::size_t>(1 + i)][static_cast<std::size_t>(1 + na + j)] = total;  // effectively unbounded
        row = true;
      }
    if (!row) any_row_empty = true;
  }
  if (any_row_empty) return false;
  T flow = max_flow(cap, S, D);
  if constexpr (std::is_same_v<T, rational>)
    return flow == total;
  else
    return flow >= total - 1e-12;
}

}  // namespace detail

constexpr std::size_t kWinfOracleLimit = 60;

// Independent check of the quantile value: the smallest pairwise distance t
// whose bounded-displacement coupling is feasible, decided by max-flow.
template <class T>
rational winf_oracle(const lattice_dist<T>& a, const lattice_dist<T>& b) {
  auto sa = support_atoms(a), sb = support_atoms(b);
  if (sa.size() > kWinfOracleLimit || sb.size() > kWinfOracleLimit)
    throw std::length_error("winf_oracle: support too large");
  if (sa.empty() || sb.empty()) throw std::domain_error("winf_oracle: empty distribution");
  std::vector<rational> cands;
  for (const auto& [xa, ma] : sa)
    for (const auto& [xb, mb] : sb) cands.push_back(abs_r(xa - xb));
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  std::size_t lo = 0, hi = cands.size() - 1;
  if (!detail::coupling_feasible_within(sa, sb, cands[hi]))
    throw std::runtime_error("winf_oracle: no feasible coupling at the diameter");
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (detail::coupling_feasible_within(sa, sb, cands[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return cands[lo];
}

// sup_x |F_a(x) - F_b(x)| over the union support.
template <class T>
T kolmogorov_distance(const lattice_dist<T>& a, const lattice_dist<T>& b) {
  auto pairs = aligned_masses(a, b);
  T ca(0), cb(0), best(0);
  for (const auto& [ma, mb] : pairs) {
    ca += ma;
    cb += mb;
    T d = ca > cb ? ca - cb : cb - ca;
    if (d > best) best = d;
  }
  return best;
}

// max over support points of |F(k) - Phi((k-mean)/sigma)|.
inline double kolmogorov_vs_normal(const lattice_d& dist, const normal_ref& ref) {
  double cum = 0, worst = 0;
  for (std::size_t i = 0; i < dist.masses.size(); ++i) {
    cum += dist.masses[i];
    double x = to_double(dist.point(i));
    worst = std::max(worst, std::fabs(cum - ref.cdf(x)));
  }
  return worst;
}

// integral of |F_dist - Phi| dx, analytic between consecutive support points.
inline double l1_vs_normal(const lattice_d& dist, const normal_ref& ref) {
  const double sigma = ref.sigma(), mu = ref.mean;
  auto anti = [&](double x) {  // antiderivative of Phi((x-mu)/sigma)
    double z = (x - mu) / sigma;
    return sigma * (z * normal_cdf(z) + normal_pdf(z));
  };
  auto atoms = support_atoms(dist);
  if (atoms.empty()) throw std::domain_error("l1_vs_normal: empty distribution");
  double total = 0, cum = 0;
  // left tail: F = 0 up to the first atom
  total += anti(to_double(atoms.front().first));
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    cum += atoms[i].second;
    double a = to_double(atoms[i].first), b = to_double(atoms[i + 1].first);
    double c = std::min(1.0, cum);
    double cross = (c <= 0.0) ? a : (c >= 1.0 ? b : mu + sigma * normal_quantile(c));
    cross = std::clamp(cross, a, b);
    // below the crossing F >= Phi, above it Phi >= F
    total += (c * (cross - a) - (anti(cross) - anti(a)));
    total += ((anti(b) - anti(cross)) - c * (b - cross));
  }
  // right tail: F = 1 beyond the last atom
  double xl = to_double(atoms.back().first);
  total += mu - (xl - anti(xl));
  return total;
}

inline double binary_entropy(double lambda) {
  if (lambda <= 0.0 || lambda >= 1.0) return 0.0;
  return -lambda * std::log2(lambda) - (1.0 - lambda) * std::log2(1.0 - lambda);
}

// Unique solution of H(lambda) = rhs on [0, 1/2).
inline double entropy_solve(double rhs) {
  if (!(rhs > 0.0) || !(rhs < 1.0)) throw std::domain_error("entropy_solve: rhs must be in (0,1)");
  double lo = 0.0, hi = 0.5;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < rhs)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct linear_error_bound {
  double bound = 0.0;
  double lambda = 0.0;
  bool upper_branch = false;  // true: solved from log2(p); false: from log2(1-p)
};

// Scaled-binomial approximation floor: any Bin(2n, p) target stays at least
// 3*lambda_p*n away in the sup-displacement metric, with lambda_p from the
// binary-entropy equation of the matching tail.
inline linear_error_bound linearerr_bound(double p, long n) {
  if (p < 0 || p > 1) throw std::domain_error("linearerr_bound: p must be in [0,1]");
  linear_error_bound out;
  if (p == 0.0 || p == 1.0) {
    // a point-mass target sits a full half-support away
    out.bound = 2.0 * static_cast<double>(n);
    out.lambda = 0.0;
    out.upper_branch = p == 1.0;
    return out;
  }
  if (p >= 0.5) {
    out.upper_branch = true;
    out.lambda = entropy_solve(2.0 / 3.0 * std::log2(p) + 1.0);
  } else {
    out.upper_branch = false;
    out.lambda = entropy_solve(2.0 / 3.0 * std::log2(1.0 - p) + 1.0);
  }
  out.bound = 3.0 * out.lambda * static_cast<double>(n);
  return out;
}

}  // namespace pbkit
