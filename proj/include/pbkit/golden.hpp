#pragma once

#include <random>
#include <sstream>

#include "pbkit/approx.hpp"
#include "pbkit/metrics.hpp"
#include "pbkit/ordering.hpp"
#include "pbkit/transport.hpp"

namespace pbkit {

// The built-in reference suite behind `pbkit paper-check`: reproduces the
// published exact values and certificates and re-verifies every bound
// sandwich on seeded random instances. Each check is pass/fail with a short
// detail string.

struct check_result {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace golden {

inline check_result check_appendix_table() {
  check_result r{"appendix_table", true, ""};
  auto rows = reproduce_appendix();
  const rational expect[] = {rational(1, 3), rational(1, 3), rational(1, 3),
                             rational(2, 3), rational(2, 3), rational(2, 3)};
  std::ostringstream os;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool ok = rows[i].acc == expect[i] && rows[i].search_value_matches &&
              rows[i].witness_real_rooted && rows[i].witness_distance_matches &&
              rows[i].forced_infeasibility_matches;
    if (i == 4) ok = ok && rows[i].kurtz_certified;
    if (!ok) r.pass = false;
    os << "n=" << rows[i].n << ":" << (ok ? "ok" : "FAIL") << " ";
  }
  r.detail = os.str();
  return r;
}

inline check_result check_degree_fixtures() {
  check_result r{"degree_5_7_9_fixtures", false, ""};
  auto rep = section4_fixtures_check();
  r.pass = rep.all_ok();
  std::ostringstream os;
  for (const auto& e : rep.entries)
    os << e.source_trials << ":" << (e.real_rooted && e.winf_two_thirds ? "ok" : "FAIL") << " ";
  r.detail = os.str();
  return r;
}

inline check_result check_imaginary_part_bound() {
  check_result r{"floor_two_thirds_imaginary_bound", true, ""};
  std::ostringstream os;
  for (long n = 2; n <= 5; ++n) {
    auto d = pb_pmf(binomial_params<rational>(static_cast<std::size_t>(3 * n), rational(1, 2))).pmf;
    auto f = floor_pushforward(d, 2, 3);
    auto diag = root_diagnostics(poly_from_masses(f));
    double bound = std::sqrt((9.0 * n * n - 9.0 * n - 1.0) / 2.0);
    bool ok = diag.max_im >= bound - 1e-8 && diag.newton_residual < 1e-8;
    if (!ok) r.pass = false;
    os << "n=" << n << ": max_im=" << diag.max_im << " bound=" << bound << " ";
  }
  r.detail = os.str();
  return r;
}

inline check_result check_stride_counterexamples() {
  check_result r{"stride3_counterexample_pair", false, ""};
  rational_poly q3(std::vector<rational>{rational(1, 3), rational(3, 2), rational(2), rational(1),
                                         rational(1), rational(1)});
  rational_poly p3 = rational_poly::from_ints({25, 25, 51, 3, 4, 4});
  auto in_q3 = interlacing_check(stride_decompose(q3, 3));
  auto in_p3 = interlacing_check(stride_decompose(p3, 3));
  bool q3_ok = in_q3.ok && in_q3.interlace;
  bool p3_ok = in_p3.ok && !in_p3.interlace;
  r.pass = q3_ok && p3_ok;
  r.detail = std::string("first:") + (q3_ok ? "interlaces" : "FAIL") +
             " second:" + (p3_ok ? "does-not-interlace" : "FAIL");
  return r;
}

inline check_result check_hurwitz_on_random_instances(std::uint64_t seed, int count = 200) {
  check_result r{"floor_two_thirds_hurwitz", true, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> nd(2, 16), dend(2, 64);
  int done = 0;
  for (int t = 0; t < count; ++t) {
    std::vector<rational> ps(static_cast<std::size_t>(nd(rng)));
    for (auto& p : ps) {
      long b = dend(rng);
      std::uniform_int_distribution<long> numd(1, b - 1);
      p = rational(numd(rng), b);
    }
    auto d = pb_pmf(prob_params_q(ps)).pmf;
    auto f = floor_pushforward(d, 2, 3);
    auto h = hurwitz_check(poly_from_masses(f));
    if (!h.stable) {
      r.pass = false;
      r.detail = "instance " + std::to_string(t) + " not stable";
      return r;
    }
    ++done;
  }
  r.detail = std::to_string(done) + " instances stable";
  return r;
}

inline check_result check_bound_sandwiches(std::uint64_t seed, int count = 120) {
  check_result r{"bound_sandwiches", true, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> nd(2, 30);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  std::ostringstream why;
  for (int t = 0; t < count; ++t) {
    std::vector<double> p(nd(rng));
    for (auto& x : p) x = u(rng);
    prob_params params(p);
    auto [mu, var] = mean_var(params);
    if (mu > 1e-9) {
      auto pr = poisson_approx_report(params);
      if (pr.tv > pr.upper + 1e-9 + pr.truncation || pr.tv < pr.lower - 1e-9 - pr.truncation) {
        ++violations;
        why << "poisson@" << t << " ";
      }
    }
    if (var > 1e-9) {
      auto tp = translated_poisson_report(params);
      if (tp.tv > tp.bound + 1e-9 + tp.truncation) {
        ++violations;
        why << "tp@" << t << " ";
      }
      auto nb = normal_bound_report(params);
      if (nb.kolmogorov > nb.shi_bound + 1e-9) {
        ++violations;
        why << "shi@" << t << " ";
      }
      double d1 = l1_vs_normal(pb_pmf(params).pmf, normal_ref(mu, var));
      if (d1 > 1.0 / std::sqrt(var) + 1e-9) {
        ++violations;
        why << "goldstein@" << t << " ";
      }
    }
    if (mu > 1e-9 && mu < static_cast<double>(params.n()) - 1e-9) {
      auto er = ehm_binomial_report(params);
      if (er.tv > er.bound + 1e-9) {
        ++violations;
        why << "ehm@" << t << " ";
      }
    }
    auto d = pb_pmf(params);
    long n = static_cast<long>(params.n());
    for (long k = static_cast<long>(std::ceil(mu)) + 1; k <= n; ++k) {
      double tail = 1.0 - pb_cdf(d, k - 1);
      if (tail > binomial_tail_bound(n, mu, static_cast<double>(k)) + 1e-9) {
        ++violations;
        why << "tail@" << t << " ";
      }
    }
  }
  r.pass = violations == 0;
  r.detail = violations == 0 ? std::to_string(count) + " instances, no violations" : why.str();
  return r;
}

inline check_result check_entropy_reference() {
  check_result r{"entropy_lambda_eq", false, ""};
  double lam = entropy_solve(1.0 - 2.0 / 3.0 * std::log2(std::exp(1.0)));
  r.pass = std::fabs(lam - 0.0041) <= 5e-4;
  std::ostringstream os;
  os << "lambda_eq=" << lam;
  r.detail = os.str();
  return r;
}

inline std::vector<check_result> run_all(std::uint64_t seed = 20240801) {
  std::vector<check_result> out;
  out.push_back(check_appendix_table());
  out.push_back(check_degree_fixtures());
  out.push_back(check_imaginary_part_bound());
  out.push_back(check_stride_counterexamples());
  out.push_back(check_hurwitz_on_random_instances(seed));
  out.push_back(check_bound_sandwiches(seed + 1));
  out.push_back(check_entropy_reference());
  return out;
}

}  // namespace golden
}  // namespace pbkit
