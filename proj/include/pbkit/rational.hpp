#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbkit {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

inline double to_double(const rational& q) { return q.template convert_to<double>(); }
inline double to_double(double x) { return x; }

inline rational make_rational(long long num, long long den) {
  if (den == 0) throw std::domain_error("rational: zero denominator");
  return rational(num, den);
}

inline bigint num(const rational& q) { return boost::multiprecision::numerator(q); }
inline bigint den(const rational& q) { return boost::multiprecision::denominator(q); }

inline bigint floor_big(const rational& q) {
  bigint n = num(q), d = den(q);
  bigint f = n / d;
  if (n < 0 && f * d != n) --f;
  return f;
}

inline bigint ceil_big(const rational& q) {
  bigint n = num(q), d = den(q);
  bigint c = n / d;
  if (n > 0 && c * d != n) ++c;
  return c;
}

inline long long to_ll(const bigint& v) { return v.template convert_to<long long>(); }

inline rational abs_r(const rational& q) { return q < 0 ? rational(-q) : q; }

inline bigint binomial_coefficient(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  bigint r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= (n - i);
    r /= (i + 1);
  }
  return r;
}

inline rational pow2_r(long exp) {
  bigint one = 1;
  if (exp >= 0) return rational(one << exp, 1);
  return rational(one, one << (-exp));
}

// Parses "a/b", an integer, or a plain decimal like "-0.125".
inline rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::domain_error("parse_rational: empty string");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    bigint n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) throw std::domain_error("parse_rational: zero denominator");
    return rational(n, d);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return rational(bigint(s), 1);
  std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
  bool neg = !head.empty() && head[0] == '-';
  if (head == "-" || head.empty()) head = neg ? "-0" : "0";
  bigint scale = 1;
  for (size_t i = 0; i < tail.size(); ++i) scale *= 10;
  bigint whole(head);
  bigint frac = tail.empty() ? bigint(0) : bigint(tail);
  bigint n = abs(whole) * scale + frac;
  if (neg || whole < 0) n = -n;
  return rational(n, scale);
}

inline std::string format_rational(const rational& q) {
  if (den(q) == 1) return num(q).str();
  return num(q).str() + "/" + den(q).str();
}

struct snapped_rational {
  rational value;
  double error = 0.0;  // |value - input|
};

// Best rational approximation with denominator <= max_den (continued fractions).
inline snapped_rational snap_to_rational(double x, std::uint64_t max_den = 1000000) {
  if (!std::isfinite(x)) throw std::domain_error("snap_to_rational: non-finite input");
  bool neg = x < 0;
  double v = std::fabs(x);
  // convergents p/q of the continued fraction of v
  std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(frac);
    if (fl > 9e18) break;
    std::uint64_t a = static_cast<std::uint64_t>(fl);
    if (q0 != 0 && a > (max_den - q0) / (q1 == 0 ? 1 : q1) && q1 != 0) break;
    std::uint64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double rem = frac - fl;
    if (rem < 1e-18) break;
    frac = 1.0 / rem;
  }
  rational best(p1, q1 == 0 ? 1 : q1);
  // try the semiconvergent closest under the cap as well
  if (q1 != 0 && q0 != 0) {
    std::uint64_t amax = (max_den - q0) / q1;
    if (amax > 0) {
      rational semi(bigint(amax) * p1 + p0, bigint(amax) * q1 + q0);
      if (std::fabs(to_double(semi) - v) < std::fabs(to_double(best) - v)) best = semi;
    }
  }
  if (neg) best = -best;
  return {best, std::fabs(to_double(best) - x)};
}

inline rational rational_gcd(const rational& a, const rational& b) {
  // gcd on the lattice generated by a and b: gcd(an*bd, bn*ad)/(ad*bd)
  bigint g = gcd(num(a) * den(b), num(b) * den(a));
  return rational(g, den(a) * den(b));
}

}  // namespace pbkit
