#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pbkit/dist.hpp"

namespace pbkit {

enum class pmf_method { brute_force, convolution, recursion_cl, recursion_glr, dft };

inline const char* to_string(pmf_method m) {
  switch (m) {
    case pmf_method::brute_force: return "brute_force";
    case pmf_method::convolution: return "convolution";
    case pmf_method::recursion_cl: return "recursion_cl";
    case pmf_method::recursion_glr: return "recursion_glr";
    case pmf_method::dft: return "dft";
  }
  return "?";
}

template <class T>
struct pb_dist {
  basic_prob_params<T> params;
  lattice_dist<T> pmf;  // offset 0, step 1, length n+1
};

using pb_dist_d = pb_dist<double>;
using pb_dist_q = pb_dist<rational>;

// The alternating-sign recursion loses significance when partial sums dwarf the
// result; when that happens the computation is redone at higher precision and
// the flag below reports it.
struct cl_diagnostics {
  bool loss_of_significance = false;
  double max_partial_ratio = 0.0;   // clamped at 1e300; see ratio_log10
  double ratio_log10 = 0.0;
  int precision_digits = 16;
  std::string recommendation;
};

namespace detail {

template <class T>
struct stripped {
  std::vector<T> interior;  // p_i strictly inside (0,1)
  std::size_t ones = 0;     // deterministic successes: shift the support
  std::size_t n = 0;
};

template <class T>
stripped<T> strip_deterministic(const basic_prob_params<T>& params) {
  stripped<T> s;
  s.n = params.n();
  for (const auto& p : params.probs) {
    if (p == T(1))
      ++s.ones;
    else if (!(p == T(0)))
      s.interior.push_back(p);
  }
  return s;
}

template <class T>
lattice_dist<T> embed(const stripped<T>& s, std::vector<T> inner) {
  std::vector<T> out(s.n + 1, T(0));
  for (std::size_t k = 0; k < inner.size(); ++k) out[k + s.ones] = inner[k];
  return {0, 1, std::move(out)};
}

template <class T>
std::vector<T> pmf_convolve(const std::vector<T>& ps) {
  std::vector<T> pmf(ps.size() + 1, T(0));
  pmf[0] = T(1);
  std::size_t used = 0;
  for (const auto& p : ps) {
    for (std::size_t k = used + 1; k-- > 0;) {
      pmf[k + 1] += pmf[k] * p;
      pmf[k] *= (T(1) - p);
    }
    ++used;
  }
  return pmf;
}

template <class T>
std::vector<T> pmf_brute_force(const std::vector<T>& ps) {
  std::vector<T> out(ps.size() + 1, T(0));
  std::function<void(std::size_t, std::size_t, T)> walk = [&](std::size_t i, std::size_t count, T prod) {
    if (i == ps.size()) {
      out[count] += prod;
      return;
    }
    walk(i + 1, count, prod * (T(1) - ps[i]));
    walk(i + 1, count + 1, prod * ps[i]);
  };
  walk(0, 0, T(1));
  return out;
}

// R(k,B) = R(k,B') + w_m R(k-1,B') over elements one at a time, in odds space,
// with power-of-two renormalisation so intermediate values never overflow.
inline std::vector<double> pmf_glr(const std::vector<double>& ps) {
  const std::size_t n = ps.size();
  std::vector<double> r(n + 1, 0.0);
  r[0] = 1.0;
  long exp2_acc = 0;
  double log2_p0 = 0.0, kahan = 0.0;
  for (const auto& p : ps) {
    double t = std::log2(1.0 - p) - kahan;
    double sum = log2_p0 + t;
    kahan = (sum - log2_p0) - t;
    log2_p0 = sum;
  }
  std::size_t used = 0;
  for (const auto& p : ps) {
    double w = p / (1.0 - p);
    for (std::size_t k = used + 2; k-- > 1;) r[k] += w * r[k - 1];
    ++used;
    double mx = 0;
    for (std::size_t k = 0; k <= used; ++k) mx = std::max(mx, r[k]);
    if (mx > 0x1p900) {
      for (auto& v : r) v *= 0x1p-900;
      exp2_acc += 900;
    }
  }
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k)
    if (r[k] > 0) out[k] = std::exp2(std::log2(r[k]) + static_cast<double>(exp2_acc) + log2_p0);
  return out;
}

template <class T>
std::vector<T> pmf_glr_exact(const std::vector<T>& ps) {
  const std::size_t n = ps.size();
  std::vector<T> r(n + 1, T(0));
  r[0] = T(1);
  T p0(1);
  std::size_t used = 0;
  for (const auto& p : ps) {
    T w = p / (T(1) - p);
    for (std::size_t k = used + 2; k-- > 1;) r[k] += w * r[k - 1];
    p0 *= (T(1) - p);
    ++used;
  }
  for (auto& v : r) v *= p0;
  return r;
}

// log2 of the elementary-symmetric values e_k(w)*prod(1-p) computed through the
// stable positive recursion; -inf entries mark exact zeros. Used both for the
// precision estimate below and nowhere else.
inline std::vector<double> log2_pmf_stable(const std::vector<double>& ps) {
  auto v = pmf_glr(ps);
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    out[k] = v[k] > 0 ? std::log2(v[k]) : -std::numeric_limits<double>::infinity();
  // redo in renormalised space when the direct values underflowed
  bool under = false;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] == 0.0) under = true;
  if (!under) return out;
  const std::size_t n = ps.size();
  std::vector<double> r(n + 1, 0.0);
  r[0] = 1.0;
  double e2 = 0, s0 = 0;
  for (double p : ps) s0 += std::log2(1.0 - p);
  std::size_t used = 0;
  for (double p : ps) {
    double w = p / (1.0 - p);
    for (std::size_t k = used + 2; k-- > 1;) r[k] += w * r[k - 1];
    ++used;
    double mx = 0;
    for (std::size_t k = 0; k <= used; ++k) mx = std::max(mx, r[k]);
    while (mx > 0x1p512) {
      for (auto& x : r) x *= 0x1p-512;
      mx *= 0x1p-512;
      e2 += 512;
    }
    while (mx > 0 && mx < 0x1p-512) {
      for (auto& x : r) x *= 0x1p512;
      mx *= 0x1p512;
      e2 -= 512;
    }
  }
  for (std::size_t k = 0; k <= n; ++k)
    out[k] = r[k] > 0 ? std::log2(r[k]) + e2 + s0 : -std::numeric_limits<double>::infinity();
  return out;
}

// Worst base-2 cancellation of the alternating recursion over k <= kmax,
// bounded from the stable magnitudes above. Drives the precision choice.
inline double cl_cancellation_bits(const std::vector<double>& ps, std::size_t kmax) {
  const std::size_t n = ps.size();
  if (n == 0) return 0;
  std::vector<double> lw(n);
  double lwmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    lw[i] = std::log2(ps[i]) - std::log2(1.0 - ps[i]);
    lwmax = std::max(lwmax, lw[i]);
  }
  std::vector<double> lt(kmax + 1, 0.0);  // log2 of sum_j (w_j/wmax)^i, in [0, log2 n]
  for (std::size_t i = 1; i <= kmax; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp2(static_cast<double>(i) * (lw[j] - lwmax));
    lt[i] = std::log2(s);
  }
  auto lp = log2_pmf_stable(ps);
  double s0 = 0;
  for (double p : ps) s0 += std::log2(1.0 - p);
  std::vector<double> lr(kmax + 1);  // log2 of R(k)/wmax^k
  for (std::size_t k = 0; k <= kmax; ++k) lr[k] = lp[k] - s0 - static_cast<double>(k) * lwmax;
  double bits = 0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    if (!std::isfinite(lr[k])) continue;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= k; ++i)
      if (std::isfinite(lr[k - i])) top = std::max(top, lt[i] + lr[k - i]);
    bits = std::max(bits, top - lr[k]);
  }
  return bits + 2.0 * std::log2(static_cast<double>(n) + 1) + 30.0;
}

// One pass of the alternating recursion at floating type F, for k = 0..kmax
// only. Returns recombined pmf values and the worst partial-sum ratio seen.
template <class F>
std::vector<double> pmf_cl_pass(const std::vector<double>& ps, std::size_t kmax,
                                double& max_ratio_log10) {
  const std::size_t n = ps.size();
  max_ratio_log10 = 0.0;
  if (n == 0) return {1.0};
  kmax = std::min(kmax, n);
  const F one(1), two(2);
  const F log2e = one / log(two);
  std::vector<F> wt(n);
  F wmax(0);
  {
    std::vector<F> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = F(ps[i]) / (one - F(ps[i]));
      if (w[i] > wmax) wmax = w[i];
    }
    for (std::size_t i = 0; i < n; ++i) wt[i] = w[i] / wmax;
  }
  std::vector<F> t(kmax + 1, F(0));
  {
    // each scaled power sum is >= 1 (the maximal odds contributes 1^i), so
    // terms below its ulp can be dropped; the active set shrinks fast
    F cutoff = F(1);
    for (int d = 0; d < std::numeric_limits<F>::digits10 + 25; ++d) cutoff /= F(10);
    std::vector<F> pw(n, one);
    std::vector<std::size_t> active(n);
    for (std::size_t j = 0; j < n; ++j) active[j] = j;
    for (std::size_t i = 1; i <= kmax; ++i) {
      F s(0);
      std::size_t keep = 0;
      for (std::size_t idx = 0; idx < active.size(); ++idx) {
        std::size_t j = active[idx];
        pw[j] *= wt[j];
        s += pw[j];
        if (pw[j] >= cutoff) active[keep++] = j;
      }
      active.resize(keep);
      t[i] = s;
    }
  }
  std::vector<F> r(kmax + 1, F(0));
  r[0] = one;
  for (std::size_t k = 1; k <= kmax; ++k) {
    F s(0), mx(0);
    int sign = 1;
    for (std::size_t i = 1; i <= k; ++i) {
      F term = t[i] * r[k - i];
      if (sign > 0)
        s += term;
      else
        s -= term;
      sign = -sign;
      F a = s < 0 ? F(-s) : s;
      if (a > mx) mx = a;
    }
    r[k] = s / F(static_cast<unsigned>(k));
    if (r[k] != 0 && mx != 0) {
      F aq = r[k] < 0 ? F(-r[k]) : r[k];
      double bits = static_cast<double>(log(mx / aq) * log2e);
      max_ratio_log10 = std::max(max_ratio_log10, bits * 0.3010299956639812);
    }
  }
  // recombine pmf_k = r_k * wmax^k * prod(1-p_i); the wide-exponent type
  // absorbs the dynamic range, only the final double cast can underflow
  (void)log2e;
  (void)two;
  F p0(1);
  for (std::size_t i = 0; i < n; ++i) p0 *= one - F(ps[i]);
  std::vector<double> out(kmax + 1, 0.0);
  F scale = p0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    if (r[k] > 0) out[k] = static_cast<double>(r[k] * scale);
    scale *= wmax;
  }
  return out;
}

template <>
inline std::vector<double> pmf_cl_pass<double>(const std::vector<double>& ps, std::size_t kmax,
                                               double& max_ratio_log10) {
  const std::size_t n = ps.size();
  max_ratio_log10 = 0.0;
  if (n == 0) return {1.0};
  kmax = std::min(kmax, n);
  std::vector<double> wt(n);
  double wmax = 0;
  for (std::size_t i = 0; i < n; ++i) wmax = std::max(wmax, ps[i] / (1.0 - ps[i]));
  for (std::size_t i = 0; i < n; ++i) wt[i] = ps[i] / (1.0 - ps[i]) / wmax;
  std::vector<double> t(kmax + 1, 0.0), pw(n, 1.0);
  for (std::size_t i = 1; i <= kmax; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      pw[j] *= wt[j];
      s += pw[j];
    }
    t[i] = s;
  }
  std::vector<double> r(kmax + 1, 0.0);
  r[0] = 1.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    double s = 0, mx = 0;
    int sign = 1;
    for (std::size_t i = 1; i <= k; ++i) {
      s += sign * t[i] * r[k - i];
      sign = -sign;
      mx = std::max(mx, std::fabs(s));
    }
    r[k] = s / static_cast<double>(k);
    if (r[k] != 0 && mx > 0)
      max_ratio_log10 = std::max(max_ratio_log10, std::log10(mx / std::fabs(r[k])));
  }
  double log2wmax = std::log2(wmax), s0 = 0;
  for (std::size_t i = 0; i < n; ++i) s0 += std::log2(1.0 - ps[i]);
  std::vector<double> out(kmax + 1, 0.0);
  for (std::size_t k = 0; k <= kmax; ++k)
    if (r[k] > 0) out[k] = std::exp2(std::log2(r[k]) + k * log2wmax + s0);
  return out;
}

// Runs the alternating recursion for k <= kmax at the smallest precision that
// covers the instance's cancellation, escalating if the measured ratio says the
// estimate was optimistic.
inline std::vector<double> pmf_cl_lower_half(const std::vector<double>& ps, std::size_t kmax,
                                             cl_diagnostics& diag) {
  namespace mp = boost::multiprecision;
  using f50 = mp::number<mp::gmp_float<50>>;
  using f100 = mp::number<mp::gmp_float<100>>;
  using f200 = mp::number<mp::gmp_float<200>>;
  using f400 = mp::number<mp::gmp_float<400>>;
  using f800 = mp::number<mp::gmp_float<800>>;
  using f1600 = mp::number<mp::gmp_float<1600>>;
  const double digits_needed = cl_cancellation_bits(ps, kmax) * 0.3010299956639812 + 13.0;
  static constexpr int kRungs[] = {15, 50, 100, 200, 400, 800, 1600};
  int start = 0;
  while (start < 6 && kRungs[start] < digits_needed) ++start;
  double ratio = 0;
  for (int rung = start; rung < 7; ++rung) {
    std::vector<double> out;
    switch (kRungs[rung]) {
      case 15: out = pmf_cl_pass<double>(ps, kmax, ratio); break;
      case 50: out = pmf_cl_pass<f50>(ps, kmax, ratio); break;
      case 100: out = pmf_cl_pass<f100>(ps, kmax, ratio); break;
      case 200: out = pmf_cl_pass<f200>(ps, kmax, ratio); break;
      case 400: out = pmf_cl_pass<f400>(ps, kmax, ratio); break;
      case 800: out = pmf_cl_pass<f800>(ps, kmax, ratio); break;
      default: out = pmf_cl_pass<f1600>(ps, kmax, ratio); break;
    }
    diag.ratio_log10 = std::max(diag.ratio_log10, ratio);
    diag.max_partial_ratio = std::pow(10.0, std::min(diag.ratio_log10, 300.0));
    diag.precision_digits = std::max(diag.precision_digits, kRungs[rung]);
    if (ratio > 6.0 && !diag.loss_of_significance) {
      diag.loss_of_significance = true;
      diag.recommendation = "recursion_glr";
    }
    if (ratio <= kRungs[rung] - 13.0 || rung == 6) return out;
  }
  return {};
}

// The recursion's cancellation grows with the index k, so the upper half of the
// support is computed from the mirrored parameter vector: P(X=k) for
// X ~ PB(p) equals P(X'=n-k) for X' ~ PB(1-p).
inline std::vector<double> pmf_cl_adaptive(const std::vector<double>& ps, cl_diagnostics& diag) {
  const std::size_t n = ps.size();
  if (n == 0) return {1.0};
  const std::size_t khalf = n / 2;
  auto lower = pmf_cl_lower_half(ps, khalf, diag);
  std::vector<double> flipped(n);
  for (std::size_t i = 0; i < n; ++i) flipped[i] = 1.0 - ps[i];
  auto upper = pmf_cl_lower_half(flipped, n - khalf - 1, diag);
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t k = 0; k <= khalf; ++k) out[k] = lower[k];
  for (std::size_t k = khalf + 1; k <= n; ++k) out[k] = upper[n - k];
  return out;
}

template <class T>
std::vector<T> pmf_cl_exact(const std::vector<T>& ps) {
  const std::size_t n = ps.size();
  std::vector<T> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = ps[i] / (T(1) - ps[i]);
  std::vector<T> t(n + 1, T(0)), pw(n, T(1));
  for (std::size_t i = 1; i <= n; ++i) {
    T s(0);
    for (std::size_t j = 0; j < n; ++j) {
      pw[j] *= w[j];
      s += pw[j];
    }
    t[i] = s;
  }
  std::vector<T> r(n + 1, T(0));
  r[0] = T(1);
  for (std::size_t k = 1; k <= n; ++k) {
    T s(0);
    int sign = 1;
    for (std::size_t i = 1; i <= k; ++i) {
      if (sign > 0)
        s += t[i] * r[k - i];
      else
        s -= t[i] * r[k - i];
      sign = -sign;
    }
    r[k] = s / T(static_cast<long>(k));
  }
  T p0(1);
  for (const auto& p : ps) p0 *= (T(1) - p);
  for (auto& v : r) v *= p0;
  return r;
}

// --- discrete Fourier path (float only) ---

inline std::vector<std::complex<double>> characteristic_points(const std::vector<double>& ps,
                                                               std::size_t n) {
  // x_j = prod_k (1 - p_k + p_k e^{i w j}), w = 2 pi/(n+1); includes all p_k.
  const std::size_t m = n + 1;
  std::vector<std::complex<double>> x(m);
  const double omega = 2.0 * std::acos(-1.0) / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::complex<double> e = std::polar(1.0, omega * static_cast<double>(j));
    std::complex<double> prod(1.0, 0.0);
    for (double p : ps) prod *= (1.0 - p) + p * e;
    x[j] = prod;
  }
  return x;
}

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);
std::vector<std::complex<double>> dft_bluestein(const std::vector<std::complex<double>>& a,
                                                bool inverse);

inline void fft_pow2_impl(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = std::acos(-1.0);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2 * pi / static_cast<double>(len) * (inverse ? -1 : 1);
    std::complex<double> wl = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        auto u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) { fft_pow2_impl(a, inverse); }

// Chirp-z trick: DFT of arbitrary length through a power-of-two convolution.
inline std::vector<std::complex<double>> dft_bluestein_impl(const std::vector<std::complex<double>>& a,
                                                            bool inverse) {
  const std::size_t n = a.size();
  const double pi = std::acos(-1.0);
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2/2 mod n kept exact through 2n periodicity of the half-angle
    unsigned long long kk = (static_cast<unsigned long long>(k) * k) % (2ull * n);
    chirp[k] = std::polar(1.0, sign * pi * static_cast<double>(kk) / static_cast<double>(n));
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<std::complex<double>> x(m, {0, 0}), y(m, {0, 0});
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = std::conj(chirp[k]);
    if (k > 0) y[m - k] = std::conj(chirp[k]);
  }
  fft_pow2(x, false);
  fft_pow2(y, false);
  for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
  fft_pow2(x, true);
  for (auto& v : x) v /= static_cast<double>(m);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = x[k] * chirp[k];
  return out;
}

inline std::vector<std::complex<double>> dft_bluestein(const std::vector<std::complex<double>>& a,
                                                       bool inverse) {
  return dft_bluestein_impl(a, inverse);
}

// P(X=k) = (1/(n+1)) sum_j exp(-i w k j) x_j. The quadratic evaluation is the
// contract; the transform acceleration is only used for large n.
inline std::vector<double> pmf_dft(const std::vector<double>& ps, std::size_t n,
                                   bool allow_fft = true) {
  const std::size_t m = n + 1;
  auto x = characteristic_points(ps, n);
  std::vector<double> out(m, 0.0);
  if (allow_fft && m > 512) {
    auto f = dft_bluestein(x, false);
    for (std::size_t k = 0; k < m; ++k) out[k] = std::max(0.0, f[k].real() / static_cast<double>(m));
    return out;
  }
  const double omega = 2.0 * std::acos(-1.0) / static_cast<double>(m);
  std::vector<std::complex<double>> root(m);
  for (std::size_t r = 0; r < m; ++r) root[r] = std::polar(1.0, -omega * static_cast<double>(r));
  for (std::size_t k = 0; k < m; ++k) {
    std::complex<double> s(0, 0);
    for (std::size_t j = 0; j < m; ++j) s += root[(k * j) % m] * x[j];
    out[k] = std::max(0.0, s.real() / static_cast<double>(m));
  }
  return out;
}

}  // namespace detail

constexpr std::size_t kBruteForceLimit = 20;

template <class T>
pb_dist<T> pb_pmf(const basic_prob_params<T>& params, pmf_method method,
                  cl_diagnostics* diag = nullptr) {
  auto s = detail::strip_deterministic(params);
  std::vector<T> inner;
  switch (method) {
    case pmf_method::brute_force:
      if (params.n() > kBruteForceLimit)
        throw std::length_error("pb_pmf: brute force limited to n <= 20");
      inner = detail::pmf_brute_force(s.interior);
      break;
    case pmf_method::convolution:
      inner = detail::pmf_convolve(s.interior);
      break;
    case pmf_method::recursion_glr:
      if constexpr (std::is_same_v<T, double>)
        inner = detail::pmf_glr(s.interior);
      else
        inner = detail::pmf_glr_exact(s.interior);
      break;
    case pmf_method::recursion_cl:
      if constexpr (std::is_same_v<T, double>) {
        cl_diagnostics local;
        inner = detail::pmf_cl_adaptive(s.interior, local);
        if (diag) *diag = local;
      } else {
        inner = detail::pmf_cl_exact(s.interior);
      }
      break;
    case pmf_method::dft:
      if constexpr (std::is_same_v<T, double>) {
        // the transform sees the original parameters; deterministic coordinates
        // are harmless there (factor is exactly e^{i w j} or 1)
        std::vector<double> all(params.probs.begin(), params.probs.end());
        return {params, lattice_dist<T>(0, 1, detail::pmf_dft(all, params.n()))};
      } else {
        throw std::domain_error("pb_pmf: dft path is float-only");
      }
  }
  return {params, detail::embed(s, std::move(inner))};
}

template <class T>
pb_dist<T> pb_pmf(const basic_prob_params<T>& params) {
  return pb_pmf(params, pmf_method::convolution);
}

template <class T>
T pb_cdf(const pb_dist<T>& dist, long k) {
  long n = static_cast<long>(dist.pmf.masses.size()) - 1;
  if (k < 0 || k > n) throw std::domain_error("pb_cdf: k out of range");
  T s(0);
  for (long i = 0; i <= k; ++i) s += dist.pmf.masses[static_cast<std::size_t>(i)];
  return s;
}

// CDF through the closed-form Fourier sum; cross-check for the prefix path.
inline double pb_cdf_fourier(const prob_params& params, long k) {
  const std::size_t n = params.n();
  if (k < 0 || k > static_cast<long>(n)) throw std::domain_error("pb_cdf_fourier: k out of range");
  const std::size_t m = n + 1;
  auto x = detail::characteristic_points(params.probs, n);
  const double omega = 2.0 * std::acos(-1.0) / static_cast<double>(m);
  std::complex<double> s(static_cast<double>(k + 1), 0.0);  // j = 0 term, x_0 = 1
  for (std::size_t j = 1; j < m; ++j) {
    std::complex<double> denomin = 1.0 - std::polar(1.0, -omega * static_cast<double>(j));
    unsigned long long kj = (static_cast<unsigned long long>(k + 1) * j) % m;
    std::complex<double> numer = 1.0 - std::polar(1.0, -omega * static_cast<double>(kj));
    s += numer / denomin * x[j];
  }
  return std::clamp(s.real() / static_cast<double>(m), 0.0, 1.0);
}

template <class T>
std::pair<T, T> mean_var(const basic_prob_params<T>& params) {
  T mu(0), var(0);
  for (const auto& p : params.probs) {
    mu += p;
    var += p * (T(1) - p);
  }
  return {mu, var};
}

// Same variance through the dispersion identity n*pbar*(1-pbar) - sum (p_i-pbar)^2.
template <class T>
T variance_dispersion_form(const basic_prob_params<T>& params) {
  T n(static_cast<long>(params.n()));
  T mu(0);
  for (const auto& p : params.probs) mu += p;
  T pbar = mu / n;
  T spread(0);
  for (const auto& p : params.probs) spread += (p - pbar) * (p - pbar);
  return n * pbar * (T(1) - pbar) - spread;
}

struct mode_result {
  bool two_modes = false;
  long mode = 0;        // the single mode, or the lower of the pair
  int branch = 0;       // 1, 2, 3 in display order
};

// Mode location: the mode differs from the mean by at most one, located by a
// three-branch test on mu.
inline mode_result darroch_mode(const prob_params& params) {
  auto [mu, var] = mean_var(params);
  (void)var;
  const long n = static_cast<long>(params.n());
  if (mu <= 0.0) return {false, 0, 1};
  if (mu >= static_cast<double>(n)) return {false, n, 3};
  long k = static_cast<long>(std::floor(mu));
  if (mu < static_cast<double>(k) + 1.0 / static_cast<double>(k + 2)) return {false, k, 1};
  double upper = static_cast<double>(k + 1) - 1.0 / static_cast<double>(n - k + 1);
  if (mu <= upper) return {true, k, 2};
  return {false, k + 1, 3};
}

}  // namespace pbkit
