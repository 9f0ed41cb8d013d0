#pragma once

#include <cmath>
#include <stdexcept>

namespace pbkit {

inline double normal_pdf(double z) { return 0.3989422804014327 * std::exp(-0.5 * z * z); }

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865476); }

// Acklam's rational approximation refined by one Halley step.
inline double normal_quantile(double u) {
  if (u <= 0.0 || u >= 1.0) throw std::domain_error("normal_quantile: u must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (u < plow) {
    double q = std::sqrt(-2 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (u <= phigh) {
    double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log(1 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  double e = normal_cdf(x) - u;
  double v = e * 2.5066282746310002 * std::exp(0.5 * x * x);
  x = x - v / (1 + x * v / 2);
  return x;
}

struct normal_ref {
  double mean = 0.0;
  double variance = 1.0;

  normal_ref() = default;
  normal_ref(double m, double v) : mean(m), variance(v) {
    if (!(v > 0)) throw std::domain_error("normal_ref: variance must be positive");
  }
  double sigma() const { return std::sqrt(variance); }
  double cdf(double x) const { return normal_cdf((x - mean) / sigma()); }
  double pdf(double x) const { return normal_pdf((x - mean) / sigma()) / sigma(); }
};

}  // namespace pbkit
