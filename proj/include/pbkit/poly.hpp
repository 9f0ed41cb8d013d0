#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <optional>
#include <vector>

#include "pbkit/dist.hpp"

namespace pbkit {

// Dense polynomial with exact rational coefficients, low-to-high.
struct rational_poly {
  std::vector<rational> c;

  rational_poly() = default;
  explicit rational_poly(std::vector<rational> coeffs) : c(std::move(coeffs)) { trim(); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  long degree() const { return static_cast<long>(c.size()) - 1; }
  const rational& lead() const { return c.back(); }
  rational at(std::size_t i) const { return i < c.size() ? c[i] : rational(0); }

  rational eval(const rational& x) const {
    rational acc(0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
  }
  double eval_d(double x) const {
    double acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + to_double(c[i]);
    return acc;
  }

  rational_poly derivative() const {
    if (c.size() <= 1) return rational_poly();
    std::vector<rational> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * rational(static_cast<long>(i));
    return rational_poly(std::move(d));
  }

  static rational_poly from_ints(std::initializer_list<long> v) {
    std::vector<rational> c;
    for (long x : v) c.emplace_back(x);
    return rational_poly(std::move(c));
  }
};

inline rational_poly operator+(const rational_poly& a, const rational_poly& b) {
  std::vector<rational> c(std::max(a.c.size(), b.c.size()), rational(0));
  for (std::size_t i = 0; i < a.c.size(); ++i) c[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) c[i] += b.c[i];
  return rational_poly(std::move(c));
}

inline rational_poly operator-(const rational_poly& a, const rational_poly& b) {
  std::vector<rational> c(std::max(a.c.size(), b.c.size()), rational(0));
  for (std::size_t i = 0; i < a.c.size(); ++i) c[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) c[i] -= b.c[i];
  return rational_poly(std::move(c));
}

inline rational_poly operator*(const rational_poly& a, const rational_poly& b) {
  if (a.is_zero() || b.is_zero()) return rational_poly();
  std::vector<rational> c(a.c.size() + b.c.size() - 1, rational(0));
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) c[i + j] += a.c[i] * b.c[j];
  return rational_poly(std::move(c));
}

inline rational_poly operator*(const rational_poly& a, const rational& s) {
  std::vector<rational> c(a.c);
  for (auto& x : c) x *= s;
  return rational_poly(std::move(c));
}

// Remainder of a by b; exact division steps.
inline rational_poly poly_rem(const rational_poly& a, const rational_poly& b) {
  if (b.is_zero()) throw std::domain_error("poly_rem: division by zero polynomial");
  std::vector<rational> r(a.c);
  const long db = b.degree();
  while (static_cast<long>(r.size()) - 1 >= db) {
    while (!r.empty() && r.back() == 0) r.pop_back();
    if (static_cast<long>(r.size()) - 1 < db) break;
    rational q = r.back() / b.lead();
    std::size_t shift = r.size() - 1 - static_cast<std::size_t>(db);
    for (long i = 0; i <= db; ++i) r[shift + static_cast<std::size_t>(i)] -= q * b.c[static_cast<std::size_t>(i)];
    r.pop_back();
  }
  return rational_poly(std::move(r));
}

// Divides out the positive content so coefficients become coprime integers;
// only positive factors are removed, signs are untouched.
inline rational_poly primitive_part(const rational_poly& p) {
  if (p.is_zero()) return p;
  bigint l = 1;
  for (const auto& q : p.c) l = lcm(l, den(q));
  bigint g = 0;
  for (const auto& q : p.c) g = gcd(g, num(q) * (l / den(q)));
  if (g == 0) return p;
  std::vector<rational> c(p.c.size());
  for (std::size_t i = 0; i < p.c.size(); ++i) c[i] = p.c[i] * rational(l, g);
  return rational_poly(std::move(c));
}

inline rational_poly poly_gcd(rational_poly a, rational_poly b) {
  a = primitive_part(a);
  b = primitive_part(b);
  while (!b.is_zero()) {
    auto r = primitive_part(poly_rem(a, b));
    a = std::move(b);
    b = std::move(r);
  }
  // normalize to positive leading coefficient
  if (!a.is_zero() && a.lead() < 0) a = a * rational(-1);
  return a;
}

// Exact quotient; the remainder is required to vanish.
inline rational_poly poly_div_exact(const rational_poly& p, const rational_poly& g) {
  if (g.is_zero()) throw std::domain_error("poly_div_exact: division by zero polynomial");
  if (p.is_zero()) return rational_poly();
  if (p.degree() < g.degree()) throw std::domain_error("poly_div_exact: not divisible");
  std::vector<rational> q(p.c.size() - g.c.size() + 1, rational(0));
  std::vector<rational> r(p.c);
  for (std::size_t k = q.size(); k-- > 0;) {
    rational coef = r[k + g.c.size() - 1] / g.lead();
    q[k] = coef;
    for (std::size_t i = 0; i < g.c.size(); ++i) r[k + i] -= coef * g.c[i];
  }
  return rational_poly(std::move(q));
}

inline rational_poly square_free_part(const rational_poly& p) {
  if (p.degree() <= 1) return primitive_part(p);
  auto g = poly_gcd(p, p.derivative());
  if (g.degree() == 0) return primitive_part(p);
  return primitive_part(poly_div_exact(p, g));
}

// Yun decomposition: pairwise-coprime square-free factors with multiplicities.
inline std::vector<std::pair<rational_poly, int>> square_free_decomposition(const rational_poly& p) {
  std::vector<std::pair<rational_poly, int>> out;
  if (p.degree() < 1) return out;
  auto g = poly_gcd(p, p.derivative());
  if (g.degree() == 0) {
    out.emplace_back(primitive_part(p), 1);
    return out;
  }
  rational_poly c = poly_div_exact(p, g);
  rational_poly d = poly_div_exact(p.derivative(), g) - c.derivative();
  int i = 1;
  while (c.degree() > 0) {
    auto h = poly_gcd(c, d);
    if (h.degree() > 0) out.emplace_back(h, i);
    c = poly_div_exact(c, h);
    d = (d.is_zero() ? rational_poly() : poly_div_exact(d, h)) - c.derivative();
    ++i;
  }
  return out;
}

namespace detail {

inline int sign_of(const rational& q) { return q == 0 ? 0 : (q > 0 ? 1 : -1); }

struct sturm_chain_t {
  std::vector<rational_poly> seq;

  int variations_at_neg_inf() const {
    int prev = 0, v = 0;
    for (const auto& p : seq) {
      int s = sign_of(p.lead());
      if (p.degree() % 2 == 1) s = -s;
      if (s != 0 && prev != 0 && s != prev) ++v;
      if (s != 0) prev = s;
    }
    return v;
  }
  int variations_at_pos_inf() const {
    int prev = 0, v = 0;
    for (const auto& p : seq) {
      int s = sign_of(p.lead());
      if (s != 0 && prev != 0 && s != prev) ++v;
      if (s != 0) prev = s;
    }
    return v;
  }
  int variations_at(const rational& x) const {
    int prev = 0, v = 0;
    for (const auto& p : seq) {
      int s = sign_of(p.eval(x));
      if (s != 0 && prev != 0 && s != prev) ++v;
      if (s != 0) prev = s;
    }
    return v;
  }
};

inline sturm_chain_t sturm_chain(const rational_poly& squarefree) {
  sturm_chain_t ch;
  ch.seq.push_back(primitive_part(squarefree));
  if (squarefree.degree() >= 1) {
    ch.seq.push_back(primitive_part(squarefree.derivative()));
    while (ch.seq.back().degree() >= 1) {
      auto r = poly_rem(ch.seq[ch.seq.size() - 2], ch.seq.back());
      if (r.is_zero()) break;
      r = primitive_part(r);
      ch.seq.push_back(r * rational(-1));
    }
  }
  return ch;
}

}  // namespace detail

// Number of distinct real roots, by exact sign-variation counting.
inline long count_distinct_real_roots(const rational_poly& p) {
  if (p.is_zero()) throw std::domain_error("count_distinct_real_roots: zero polynomial");
  auto sf = square_free_part(p);
  if (sf.degree() < 1) return 0;
  auto ch = detail::sturm_chain(sf);
  return ch.variations_at_neg_inf() - ch.variations_at_pos_inf();
}

// Distinct real roots in the half-open interval (a, b].
inline long count_real_roots_in(const rational_poly& p, const rational& a, const rational& b) {
  auto sf = square_free_part(p);
  if (sf.degree() < 1) return 0;
  auto ch = detail::sturm_chain(sf);
  return ch.variations_at(a) - ch.variations_at(b);
}

// Certified: true iff every root (with multiplicity) is real. All arithmetic
// is exact rational; repeated roots are handled by the square-free reduction.
inline bool is_real_rooted(const rational_poly& p) {
  if (p.is_zero()) throw std::domain_error("is_real_rooted: zero polynomial");
  auto sf = square_free_part(p);
  if (sf.degree() < 1) return true;
  return count_distinct_real_roots(p) == sf.degree();
}

struct newton_result {
  bool ok = true;
  long first_violated = -1;  // index i of the failing inequality
};

// a_i^2 >= a_{i-1} a_{i+1} (1+1/i)(1+1/(n-i)) over the nonzero-coefficient
// window; necessary for real-rootedness of nonnegative polynomials.
inline newton_result newton_check(const rational_poly& p) {
  if (p.is_zero()) return {true, -1};
  std::size_t lo = 0;
  while (lo < p.c.size() && p.c[lo] == 0) ++lo;
  const long n = p.degree() - static_cast<long>(lo);
  for (long i = 1; i <= n - 1; ++i) {
    const rational& am = p.c[lo + static_cast<std::size_t>(i) - 1];
    const rational& a0 = p.c[lo + static_cast<std::size_t>(i)];
    const rational& ap = p.c[lo + static_cast<std::size_t>(i) + 1];
    rational lhs = a0 * a0;
    rational rhs = am * ap * rational(i + 1, i) * rational(n - i + 1, n - i);
    if (lhs < rhs) return {false, static_cast<long>(lo) + i};
  }
  return {true, -1};
}

// a_i^2 > 4 a_{i-1} a_{i+1} for all interior i; sufficient for real roots when
// all coefficients are positive.
inline bool kurtz_check(const rational_poly& p) {
  std::size_t lo = 0;
  while (lo < p.c.size() && p.c[lo] == 0) ++lo;
  for (std::size_t i = lo; i < p.c.size(); ++i)
    if (p.c[i] <= 0) return false;
  for (std::size_t i = lo + 1; i + 1 < p.c.size(); ++i)
    if (!(p.c[i] * p.c[i] > rational(4) * p.c[i - 1] * p.c[i + 1])) return false;
  return true;
}

// f(z) = sum_j x^j g_j(z^k): component j collects coefficients with index = j mod k.
inline std::vector<rational_poly> stride_decompose(const rational_poly& p, long k) {
  if (k < 1) throw std::domain_error("stride_decompose: k must be >= 1");
  std::vector<rational_poly> out;
  out.reserve(static_cast<std::size_t>(k));
  for (long j = 0; j < k; ++j) {
    std::vector<rational> c;
    for (std::size_t idx = static_cast<std::size_t>(j); idx < p.c.size(); idx += static_cast<std::size_t>(k))
      c.push_back(p.c[idx]);
    out.emplace_back(std::move(c));
  }
  return out;
}

inline rational_poly stride_reassemble(const std::vector<rational_poly>& gs) {
  const long k = static_cast<long>(gs.size());
  std::vector<rational> c;
  for (long j = 0; j < k; ++j)
    for (std::size_t t = 0; t < gs[static_cast<std::size_t>(j)].c.size(); ++t) {
      std::size_t idx = t * static_cast<std::size_t>(k) + static_cast<std::size_t>(j);
      if (c.size() <= idx) c.resize(idx + 1, rational(0));
      c[idx] = gs[static_cast<std::size_t>(j)].c[t];
    }
  return rational_poly(std::move(c));
}

// --- numeric roots ---

namespace detail {

inline std::vector<std::complex<double>> companion_roots(const rational_poly& p) {
  const long d = p.degree();
  if (d < 1) return {};
  std::vector<double> c(static_cast<std::size_t>(d) + 1);
  double scale = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = to_double(p.c[i]);
    scale = std::max(scale, std::fabs(c[i]));
  }
  if (scale > 0)
    for (auto& x : c) x /= scale;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (long i = 0; i < d; ++i) {
    if (i + 1 < d) m(i + 1, i) = 1.0;
    m(i, d - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(d)];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(d));
  for (long i = 0; i < d; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  // Newton polish against the exact coefficients
  for (auto& z : roots) {
    for (int it = 0; it < 4; ++it) {
      std::complex<double> f(0, 0), fp(0, 0);
      for (std::size_t i = c.size(); i-- > 0;) {
        fp = fp * z + f;
        f = f * z + c[i];
      }
      if (std::abs(fp) == 0.0) break;
      std::complex<double> step = f / fp;
      z -= step;
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
    }
  }
  return roots;
}

}  // namespace detail

struct root_diagnostics_t {
  std::vector<double> real_roots;
  std::vector<std::complex<double>> complex_pairs;  // one entry per conjugate pair (Im > 0)
  double max_im = 0.0;
  bool all_real = false;  // certified by exact sign-variation counting
  bool hurwitz = false;
  double newton_residual = 0.0;  // max |p/p'| step at the reported roots
};

struct hurwitz_result {
  bool stable = false;
  bool certified = true;  // false when the exact table hit a zero pivot
};

// Exact Routh table; all roots in the open left half-plane iff the first
// column keeps one sign. A zero pivot drops to numeric roots, uncertified.
inline hurwitz_result hurwitz_check(const rational_poly& p);

inline root_diagnostics_t root_diagnostics(const rational_poly& p) {
  if (p.degree() < 1) throw std::domain_error("root_diagnostics: need degree >= 1");
  root_diagnostics_t out;
  out.all_real = is_real_rooted(p);
  // roots come from the square-free factors, where they are simple and the
  // polish converges quadratically; multiplicities repeat them
  std::vector<std::complex<double>> roots;
  for (const auto& [factor, mult] : square_free_decomposition(p)) {
    auto fr = detail::companion_roots(factor);
    for (const auto& z : fr) {
      for (int m = 0; m < mult; ++m) roots.push_back(z);
      std::complex<double> f(0, 0), fp(0, 0);
      for (std::size_t i = factor.c.size(); i-- > 0;) {
        fp = fp * z + f;
        f = f * z + to_double(factor.c[i]);
      }
      if (std::abs(fp) > 0) out.newton_residual = std::max(out.newton_residual, std::abs(f / fp));
    }
  }
  if (out.all_real) {
    out.max_im = 0.0;
    for (const auto& z : roots) out.real_roots.push_back(z.real());
    std::sort(out.real_roots.begin(), out.real_roots.end());
  } else {
    for (const auto& z : roots) {
      double tol = 1e-9 * (1.0 + std::abs(z));
      if (std::fabs(z.imag()) <= tol)
        out.real_roots.push_back(z.real());
      else if (z.imag() > 0)
        out.complex_pairs.push_back(z);
      out.max_im = std::max(out.max_im, z.imag());
    }
    std::sort(out.real_roots.begin(), out.real_roots.end());
  }
  out.hurwitz = hurwitz_check(p).stable;
  return out;
}

inline hurwitz_result hurwitz_check(const rational_poly& in) {
  if (in.is_zero()) throw std::domain_error("hurwitz_check: zero polynomial");
  rational_poly p = in;
  if (p.lead() < 0) p = p * rational(-1);
  const long n = p.degree();
  if (n == 0) return {true, true};
  // positivity of every coefficient is necessary
  for (long i = 0; i <= n; ++i)
    if (p.at(static_cast<std::size_t>(i)) <= 0) return {false, true};
  // rows indexed from the top: (a_n, a_{n-2}, ...) and (a_{n-1}, a_{n-3}, ...)
  std::vector<rational> r1, r2;
  for (long i = n; i >= 0; i -= 2) r1.push_back(p.at(static_cast<std::size_t>(i)));
  for (long i = n - 1; i >= 0; i -= 2) r2.push_back(p.at(static_cast<std::size_t>(i)));
  int sign_changes = 0;
  int prev_sign = 1;  // a_n > 0 after normalization
  for (long row = 0; row + 1 <= n; ++row) {
    if (r2.empty() || r2[0] == 0) {
      // zero pivot: fall back to numeric classification, uncertified
      auto roots = detail::companion_roots(in);
      bool stable = true;
      for (const auto& z : roots)
        if (z.real() >= -1e-12 * (1.0 + std::abs(z))) stable = false;
      return {stable, false};
    }
    int s = detail::sign_of(r2[0]);
    if (s != prev_sign) ++sign_changes;
    prev_sign = s;
    std::vector<rational> next;
    for (std::size_t i = 0; i + 1 < r1.size() || i + 1 < r2.size(); ++i) {
      rational a = i + 1 < r1.size() ? r1[i + 1] : rational(0);
      rational b = i + 1 < r2.size() ? r2[i + 1] : rational(0);
      next.push_back((r2[0] * a - r1[0] * b) / r2[0]);
    }
    while (!next.empty() && next.back() == 0) next.pop_back();
    r1 = std::move(r2);
    r2 = std::move(next);
    if (r2.empty() && row + 2 <= n) {
      // premature termination also means a degenerate table
      auto roots = detail::companion_roots(in);
      bool stable = true;
      for (const auto& z : roots)
        if (z.real() >= -1e-12 * (1.0 + std::abs(z))) stable = false;
      return {stable, false};
    }
  }
  return {sign_changes == 0, true};
}

// Pairwise weak interlacing of the (real) roots of consecutive entries, with
// the orientation fixed by the stride examples: for equal degrees the second
// list leads, i.e. s_i <= r_i <= s_{i+1}.
struct interlacing_result {
  bool ok = false;               // all members real-rooted
  long non_real_index = -1;      // which member failed, when ok is false
  bool interlace = false;
};

inline interlacing_result interlacing_check(const std::vector<rational_poly>& gs) {
  interlacing_result res;
  std::vector<std::vector<double>> roots(gs.size());
  for (std::size_t j = 0; j < gs.size(); ++j) {
    if (gs[j].is_zero() || gs[j].degree() < 1) continue;  // unconstrained member
    if (!is_real_rooted(gs[j])) {
      res.non_real_index = static_cast<long>(j);
      return res;
    }
    auto d = detail::companion_roots(gs[j]);
    for (const auto& z : d) roots[j].push_back(z.real());
    std::sort(roots[j].begin(), roots[j].end());
  }
  res.ok = true;
  const double tol = 1e-9;
  auto leq = [&](double a, double b) { return a <= b + tol * (1.0 + std::fabs(a) + std::fabs(b)); };
  for (std::size_t j = 0; j + 1 < gs.size(); ++j) {
    const auto& r = roots[j];
    const auto& s = roots[j + 1];
    if (r.empty() || s.empty()) continue;
    long dr = static_cast<long>(r.size()), ds = static_cast<long>(s.size());
    bool okpair = true;
    if (dr == ds) {
      for (long i = 0; i < dr; ++i) {
        if (!leq(s[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(i)])) okpair = false;
        if (i + 1 < ds && !leq(r[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i) + 1])) okpair = false;
      }
    } else if (ds == dr - 1) {
      for (long i = 0; i < dr; ++i) {
        if (i < ds && !leq(r[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i)])) okpair = false;
        if (i >= 1 && !leq(s[static_cast<std::size_t>(i) - 1], r[static_cast<std::size_t>(i)])) okpair = false;
      }
    } else if (ds == dr + 1) {
      for (long i = 0; i < ds; ++i) {
        if (i < dr && !leq(s[static_cast<std::size_t>(i)], r[static_cast<std::size_t>(i)])) okpair = false;
        if (i >= 1 && !leq(r[static_cast<std::size_t>(i) - 1], s[static_cast<std::size_t>(i)])) okpair = false;
      }
    } else {
      okpair = false;
    }
    if (!okpair) {
      res.interlace = false;
      return res;
    }
  }
  res.interlace = true;
  return res;
}

// --- PGF bridge ---

inline rational_poly pgf_of(const prob_params_q& params) {
  rational_poly f(std::vector<rational>{rational(1)});
  for (const auto& p : params.probs)
    f = f * rational_poly(std::vector<rational>{rational(1) - p, p});
  return f;
}

template <class T>
rational_poly poly_from_masses(const lattice_dist<T>& d) {
  std::vector<rational> c(d.masses.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if constexpr (std::is_same_v<T, rational>)
      c[i] = d.masses[i];
    else
      c[i] = snap_to_rational(d.masses[i], 1000000000000ull).value;
  }
  return rational_poly(std::move(c));
}

struct pgf_recovery {
  bool ok = false;
  prob_params params{std::vector<double>{0.0}};  // placeholder when !ok
  double reconstruction_error = 0.0;             // max pmf deviation of the recovered vector
  root_diagnostics_t diagnostics;
};

// Real roots r of a nonnegative real-rooted PGF map to p = 1/(1-r); a degree
// deficit against target_n contributes zero-probability coordinates.
inline pgf_recovery pb_from_pgf(const rational_poly& in, long target_n = -1) {
  pgf_recovery out;
  if (in.is_zero()) throw std::domain_error("pb_from_pgf: zero polynomial");
  for (const auto& a : in.c)
    if (a < 0) throw std::domain_error("pb_from_pgf: coefficients must be nonnegative");
  rational total = in.eval(rational(1));
  rational_poly f = in * (rational(1) / total);
  out.diagnostics = root_diagnostics(f);
  if (!out.diagnostics.all_real) return out;
  std::vector<double> ps;
  for (double r : out.diagnostics.real_roots) ps.push_back(1.0 / (1.0 - r));
  if (target_n > f.degree())
    ps.insert(ps.end(), static_cast<std::size_t>(target_n - f.degree()), 0.0);
  std::sort(ps.begin(), ps.end());
  for (auto& p : ps) p = std::clamp(p, 0.0, 1.0);
  out.params = prob_params(ps);
  // reconstruction check against the normalized coefficients
  std::vector<double> pmf{1.0};
  for (double p : ps) {
    std::vector<double> nxt(pmf.size() + 1, 0.0);
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      nxt[k] += pmf[k] * (1.0 - p);
      nxt[k + 1] += pmf[k] * p;
    }
    pmf = std::move(nxt);
  }
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    double want = k < f.c.size() ? to_double(f.c[k]) : 0.0;
    out.reconstruction_error = std::max(out.reconstruction_error, std::fabs(pmf[k] - want));
  }
  out.ok = true;
  return out;
}

// All minors of order <= window of the Toeplitz matrix (a_{j-i}); a full-size
// window decides the PF property, smaller windows are necessary-only.
inline bool toeplitz_pf_check(const std::vector<rational>& a, int window) {
  if (window < 1 || window > 6) throw std::length_error("toeplitz_pf_check: window must be 1..6");
  const int m = static_cast<int>(a.size()) + 2;  // small zero padding margin
  auto entry = [&](int i, int j) -> rational {
    int k = j - i;
    return (k >= 0 && k < static_cast<int>(a.size())) ? a[static_cast<std::size_t>(k)] : rational(0);
  };
  std::vector<int> rows, cols;
  // iterate over all k-subsets of rows and columns for k = 1..window
  for (int k = 1; k <= std::min(window, m); ++k) {
    std::vector<int> ri(static_cast<std::size_t>(k)), ci(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) ri[static_cast<std::size_t>(i)] = i;
    while (true) {
      for (int i = 0; i < k; ++i) ci[static_cast<std::size_t>(i)] = i;
      while (true) {
        // Bareiss-free small determinant via fraction-friendly Gaussian elimination
        std::vector<std::vector<rational>> d(static_cast<std::size_t>(k),
                                             std::vector<rational>(static_cast<std::size_t>(k)));
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j)
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                entry(ri[static_cast<std::size_t>(i)], ci[static_cast<std::size_t>(j)]);
        rational det(1);
        bool singular = false;
        for (int col = 0; col < k && !singular; ++col) {
          int piv = -1;
          for (int r = col; r < k; ++r)
            if (d[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
              piv = r;
              break;
            }
          if (piv < 0) {
            singular = true;
            break;
          }
          if (piv != col) {
            std::swap(d[static_cast<std::size_t>(piv)], d[static_cast<std::size_t>(col)]);
            det = -det;
          }
          det *= d[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
          for (int r = col + 1; r < k; ++r) {
            rational factor = d[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                              d[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            for (int cc = col; cc < k; ++cc)
              d[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
                  factor * d[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)];
          }
        }
        if (singular) det = 0;
        if (det < 0) return false;
        // next column subset
        int pos = k - 1;
        while (pos >= 0 && ci[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
        if (pos < 0) break;
        ++ci[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < k; ++i) ci[static_cast<std::size_t>(i)] = ci[static_cast<std::size_t>(i) - 1] + 1;
      }
      int pos = k - 1;
      while (pos >= 0 && ri[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
      if (pos < 0) break;
      ++ri[static_cast<std::size_t>(pos)];
      for (int i = pos + 1; i < k; ++i) ri[static_cast<std::size_t>(i)] = ri[static_cast<std::size_t>(i) - 1] + 1;
    }
  }
  return true;
}

struct factorization_probe {
  bool success = false;
  std::vector<std::vector<double>> factors;  // coefficient lists, low-to-high
  int unplaced = 0;
};

// Tries to split a positive-coefficient polynomial into positive factors of
// degree <= maxdeg by pairing numeric roots: negative reals give linears,
// left-half-plane conjugate pairs give quadratics, and right-half-plane pairs
// are matched with a compatible real root into a cubic. Exploratory only.
inline factorization_probe positive_factorization_probe(const rational_poly& p, int maxdeg) {
  factorization_probe out;
  if (p.degree() < 1) {
    out.success = true;
    return out;
  }
  auto roots = detail::companion_roots(p);
  std::vector<double> reals;
  std::vector<std::complex<double>> pairs;
  for (const auto& z : roots) {
    double tol = 1e-9 * (1.0 + std::abs(z));
    if (std::fabs(z.imag()) <= tol)
      reals.push_back(z.real());
    else if (z.imag() > 0)
      pairs.push_back(z);
  }
  std::sort(reals.begin(), reals.end());
  std::vector<bool> used(reals.size(), false);
  for (double r : reals)
    if (r >= 0) ++out.unplaced;  // positive-coefficient polynomials should not get here
  for (const auto& z : pairs) {
    double a = z.real(), m = std::norm(z);
    if (a < 0 && maxdeg >= 2) {
      out.factors.push_back({m, -2 * a, 1.0});
      continue;
    }
    if (maxdeg >= 3) {
      // need a real root r with -m/(2a) < r < -2a so the cubic stays positive
      bool placed = false;
      for (std::size_t i = 0; i < reals.size() && !placed; ++i) {
        if (used[i] || reals[i] >= 0) continue;
        double r = reals[i];
        double c2 = -2 * a - r, c1 = m + 2 * a * r, c0 = -r * m;
        if (c2 > 0 && c1 > 0 && c0 > 0) {
          out.factors.push_back({c0, c1, c2, 1.0});
          used[i] = true;
          placed = true;
        }
      }
      if (!placed) ++out.unplaced;
    } else {
      ++out.unplaced;
    }
  }
  for (std::size_t i = 0; i < reals.size(); ++i)
    if (!used[i] && reals[i] < 0) out.factors.push_back({-reals[i], 1.0});
  out.success = (out.unplaced == 0);
  return out;
}

}  // namespace pbkit
