#pragma once

#include "pbkit/metrics.hpp"
#include "pbkit/pb_core.hpp"

namespace pbkit {

enum class order_relation { stochastically_larger, stochastically_smaller, equal, crossing, incomparable };

inline const char* to_string(order_relation r) {
  switch (r) {
    case order_relation::stochastically_larger: return "stochastically_larger";
    case order_relation::stochastically_smaller: return "stochastically_smaller";
    case order_relation::equal: return "equal";
    case order_relation::crossing: return "crossing";
    case order_relation::incomparable: return "incomparable";
  }
  return "?";
}

struct order_report {
  order_relation relation = order_relation::incomparable;
  std::vector<rational> crossing_points;
  std::vector<std::pair<rational, double>> detail;  // (point, F_a - F_b)
};

constexpr double kOrderTol = 1e-12;  // |delta| below this counts as equality

// Pointwise CDF comparison on the union support. "Larger" means the first
// argument's CDF never exceeds the second's.
inline order_report stochastic_dominance(const lattice_d& a, const lattice_d& b) {
  order_report out;
  std::vector<rational> pts;
  auto pairs = aligned_masses(a, b, &pts);
  double ca = 0, cb = 0;
  bool a_below = true, b_below = true;
  int last_sign = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ca += pairs[i].first;
    cb += pairs[i].second;
    double diff = ca - cb;
    out.detail.emplace_back(pts[i], diff);
    int sign = std::fabs(diff) < kOrderTol ? 0 : (diff > 0 ? 1 : -1);
    if (sign > 0) a_below = false;
    if (sign < 0) b_below = false;
    if (sign != 0 && last_sign != 0 && sign != last_sign) out.crossing_points.push_back(pts[i]);
    if (sign != 0) last_sign = sign;
  }
  if (a_below && b_below)
    out.relation = order_relation::equal;
  else if (a_below)
    out.relation = order_relation::stochastically_larger;
  else if (b_below)
    out.relation = order_relation::stochastically_smaller;
  else
    out.relation = order_relation::crossing;
  return out;
}

// Ascending-order-statistic partial sums of x dominated by those of y with
// equal totals.
inline bool majorize(std::vector<double> x, std::vector<double> y, double tol = kOrderTol) {
  if (x.size() != y.size()) throw std::domain_error("majorize: length mismatch");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    if (sx > sy + tol) return false;
  }
  sx += x.back();
  sy += y.back();
  return std::fabs(sx - sy) <= tol * (1.0 + std::fabs(sx));
}

// E(X - k)_+ for an integer-supported distribution.
inline double stop_loss(const lattice_d& d, double k) {
  double s = 0;
  for (std::size_t i = 0; i < d.masses.size(); ++i) {
    double x = to_double(d.point(i));
    if (x > k) s += d.masses[i] * (x - k);
  }
  return s;
}

struct hoeffding_report {
  order_report report;            // PB(p) against Bin(n, pbar)
  bool part1_ok = true;           // CDF comparisons split at n*pbar
  bool convex_order = true;       // stop-loss dominance with equal means
  bool equality_case = false;     // all stop-losses equal (homogeneous p)
  double max_stop_loss_gap = 0.0; // max_k E(Xbar-k)_+ - E(X-k)_+
};

// The mean-matched binomial is the most spread out: its lower tail dominates
// below the mean, its upper tail above, and it is maximal in convex order.
inline hoeffding_report hoeffding_compare(const prob_params& params) {
  hoeffding_report out;
  const long n = static_cast<long>(params.n());
  auto [mu, var] = mean_var(params);
  (void)var;
  const double pbar = mu / static_cast<double>(n);
  auto x = pb_pmf(params).pmf;
  auto xbar = pb_pmf(binomial_params<double>(params.n(), pbar)).pmf;
  out.report = stochastic_dominance(x, xbar);
  double cx = 0, cb = 0;
  for (long k = 0; k <= n; ++k) {
    cx += x.masses[static_cast<std::size_t>(k)];
    cb += xbar.masses[static_cast<std::size_t>(k)];
    if (static_cast<double>(k) <= mu - 1.0 && cx > cb + 1e-9) out.part1_ok = false;
    if (static_cast<double>(k) >= mu && cx < cb - 1e-9) out.part1_ok = false;
  }
  bool all_equal = true;
  for (long k = 0; k <= n; ++k) {
    double gap = stop_loss(xbar, static_cast<double>(k)) - stop_loss(x, static_cast<double>(k));
    out.max_stop_loss_gap = std::max(out.max_stop_loss_gap, gap);
    if (gap < -1e-9) out.convex_order = false;
    if (std::fabs(gap) > kOrderTol) all_equal = false;
  }
  out.equality_case = all_equal;
  return out;
}

struct gleser_report {
  bool applicable = false;  // requires the majorization precondition
  order_report report;
  bool cdf_pattern_ok = true;   // split at n*pbar -/+ 2
  bool variance_ok = true;      // Var(X) <= Var(X')
};

// Majorization refines the spread comparison: p majorizing q makes PB(p) the
// less dispersed lattice law away from a two-step window around the mean.
inline gleser_report gleser_compare(const prob_params& p, const prob_params& q) {
  gleser_report out;
  if (p.n() != q.n()) throw std::domain_error("gleser_compare: length mismatch");
  if (!majorize(p.probs, q.probs)) return out;  // reported as not applicable
  out.applicable = true;
  const long n = static_cast<long>(p.n());
  auto [mup, varp] = mean_var(p);
  auto [muq, varq] = mean_var(q);
  (void)muq;
  auto dx = pb_pmf(p).pmf;
  auto dq = pb_pmf(q).pmf;
  out.report = stochastic_dominance(dx, dq);
  double cx = 0, cy = 0;
  for (long k = 0; k <= n; ++k) {
    cx += dx.masses[static_cast<std::size_t>(k)];
    cy += dq.masses[static_cast<std::size_t>(k)];
    if (static_cast<double>(k) <= mup - 2.0 && cx > cy + 1e-9) out.cdf_pattern_ok = false;
    if (static_cast<double>(k) >= mup + 2.0 && cx < cy - 1e-9) out.cdf_pattern_ok = false;
  }
  out.variance_ok = varp <= varq + 1e-12;
  return out;
}

struct bsc_report {
  double gm_success = 0.0;       // geometric mean of the p_i
  double gm_failure = 0.0;       // geometric mean of the 1 - p_i
  bool dominates_bin_predicted = false;
  bool dominated_by_bin_predicted = false;
  bool dominates_bin_observed = false;
  bool dominated_by_bin_observed = false;
  bool consistent = true;
};

// Geometric-mean tests: X dominates Bin(n,q) iff q <= gm(p); X is dominated
// iff q >= 1 - gm(1-p). Both directions verified against the CDFs.
inline bsc_report bsc_conditions(const prob_params& params, double bin_p) {
  bsc_report out;
  const double n = static_cast<double>(params.n());
  double lg_s = 0, lg_f = 0;
  bool zero_s = false, zero_f = false;
  for (double p : params.probs) {
    if (p == 0.0)
      zero_s = true;
    else
      lg_s += std::log(p);
    if (p == 1.0)
      zero_f = true;
    else
      lg_f += std::log(1.0 - p);
  }
  out.gm_success = zero_s ? 0.0 : std::exp(lg_s / n);
  out.gm_failure = zero_f ? 0.0 : std::exp(lg_f / n);
  out.dominates_bin_predicted = bin_p <= out.gm_success + kOrderTol;
  out.dominated_by_bin_predicted = bin_p >= 1.0 - out.gm_failure - kOrderTol;
  auto x = pb_pmf(params).pmf;
  auto y = pb_pmf(binomial_params<double>(params.n(), bin_p)).pmf;
  auto rep = stochastic_dominance(x, y);
  out.dominates_bin_observed = rep.relation == order_relation::stochastically_larger ||
                               rep.relation == order_relation::equal;
  out.dominated_by_bin_observed = rep.relation == order_relation::stochastically_smaller ||
                                  rep.relation == order_relation::equal;
  out.consistent = out.dominates_bin_observed == out.dominates_bin_predicted &&
                   out.dominated_by_bin_observed == out.dominated_by_bin_predicted;
  return out;
}

}  // namespace pbkit
