#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pbkit/pb_core.hpp"

using namespace pbkit;

namespace {

prob_params random_params(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (auto& x : p) x = u(rng);
  return prob_params(std::move(p));
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

const pmf_method kAllMethods[] = {pmf_method::brute_force, pmf_method::convolution,
                                  pmf_method::recursion_cl, pmf_method::recursion_glr,
                                  pmf_method::dft};
const pmf_method kScalableMethods[] = {pmf_method::convolution, pmf_method::recursion_cl,
                                       pmf_method::recursion_glr, pmf_method::dft};

}  // namespace

TEST_CASE("pmf of two fair coins") {
  prob_params p({0.5, 0.5});
  for (auto m : kAllMethods) {
    auto d = pb_pmf(p, m);
    REQUIRE(d.pmf.masses.size() == 3);
    CHECK_THAT(d.pmf.masses[0], Catch::Matchers::WithinAbs(0.25, 1e-12));
    CHECK_THAT(d.pmf.masses[1], Catch::Matchers::WithinAbs(0.50, 1e-12));
    CHECK_THAT(d.pmf.masses[2], Catch::Matchers::WithinAbs(0.25, 1e-12));
  }
}

TEST_CASE("pmf of (0.3, 0.5) against subset enumeration") {
  // (1-.3)(1-.5), .3*.5+.7*.5 etc. enumerated by hand over the four subsets
  prob_params p({0.3, 0.5});
  for (auto m : kAllMethods) {
    auto d = pb_pmf(p, m);
    CHECK_THAT(d.pmf.masses[0], Catch::Matchers::WithinAbs(0.35, 1e-12));
    CHECK_THAT(d.pmf.masses[1], Catch::Matchers::WithinAbs(0.50, 1e-12));
    CHECK_THAT(d.pmf.masses[2], Catch::Matchers::WithinAbs(0.15, 1e-12));
  }
}

TEST_CASE("recursion agrees with the brute-force oracle at n = 12") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_params(rng, 12);
    auto oracle = pb_pmf(p, pmf_method::brute_force);
    auto cl = pb_pmf(p, pmf_method::recursion_cl);
    CHECK(max_abs_diff(oracle.pmf.masses, cl.pmf.masses) < 1e-10);
  }
}

TEST_CASE("all five methods agree for small n") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> nd(1, 20);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = random_params(rng, nd(rng));
    auto ref = pb_pmf(p, pmf_method::brute_force);
    for (auto m : kAllMethods) {
      auto d = pb_pmf(p, m);
      CHECK(max_abs_diff(ref.pmf.masses, d.pmf.masses) < 1e-10);
    }
  }
}

TEST_CASE("scalable methods agree at n = 500") {
  std::mt19937_64 rng(500);
  auto p = random_params(rng, 500);
  auto ref = pb_pmf(p, pmf_method::convolution);
  for (auto m : kScalableMethods) {
    auto d = pb_pmf(p, m);
    CHECK(max_abs_diff(ref.pmf.masses, d.pmf.masses) < 1e-10);
  }
}

TEST_CASE("alternating recursion reports loss of significance on hard instances") {
  std::mt19937_64 rng(99);
  auto p = random_params(rng, 300);
  cl_diagnostics diag;
  auto d = pb_pmf(p, pmf_method::recursion_cl, &diag);
  CHECK(diag.loss_of_significance);
  CHECK(diag.recommendation == "recursion_glr");
  CHECK(diag.precision_digits > 16);
  auto ref = pb_pmf(p, pmf_method::convolution);
  CHECK(max_abs_diff(ref.pmf.masses, d.pmf.masses) < 1e-10);
}

TEST_CASE("deterministic coordinates shift and drop") {
  prob_params p({1.0, 0.0, 0.5, 1.0});
  for (auto m : kAllMethods) {
    auto d = pb_pmf(p, m);
    REQUIRE(d.pmf.masses.size() == 5);
    CHECK_THAT(d.pmf.masses[2], Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(d.pmf.masses[3], Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(d.pmf.masses[0] + d.pmf.masses[1] + d.pmf.masses[4],
               Catch::Matchers::WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("brute force refuses n > 20") {
  std::vector<double> p(21, 0.5);
  CHECK_THROWS_AS(pb_pmf(prob_params(p), pmf_method::brute_force), std::length_error);
}

TEST_CASE("invalid probability rejected") {
  CHECK_THROWS_AS(prob_params({0.5, 1.5}), std::domain_error);
  CHECK_THROWS_AS(prob_params(std::vector<double>{}), std::domain_error);
}

TEST_CASE("rational mode reproduces binomial coefficients exactly") {
  for (std::size_t n : {1u, 2u, 5u, 10u, 16u}) {
    auto params = binomial_params<rational>(n, rational(1, 2));
    for (auto m : {pmf_method::convolution, pmf_method::recursion_cl, pmf_method::recursion_glr}) {
      auto d = pb_pmf(params, m);
      for (std::size_t k = 0; k <= n; ++k) {
        rational expect(binomial_coefficient(n, k), bigint(1) << n);
        REQUIRE(d.pmf.masses[k] == expect);
      }
    }
  }
}

TEST_CASE("rational and float paths tell the same story") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> numd(0, 64);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<rational> q(8);
    std::vector<double> f(8);
    for (int i = 0; i < 8; ++i) {
      int a = numd(rng);
      q[i] = rational(a, 64);
      f[i] = a / 64.0;
    }
    auto dq = pb_pmf(prob_params_q(q), pmf_method::convolution);
    auto df = pb_pmf(prob_params(f), pmf_method::convolution);
    for (std::size_t k = 0; k < df.pmf.masses.size(); ++k)
      CHECK_THAT(to_double(dq.pmf.masses[k]), Catch::Matchers::WithinAbs(df.pmf.masses[k], 1e-12));
  }
}

TEST_CASE("cdf prefix path") {
  auto d = pb_pmf(prob_params({0.5, 0.5}));
  CHECK_THAT(pb_cdf(d, 1), Catch::Matchers::WithinAbs(0.75, 1e-12));
  auto d2 = pb_pmf(prob_params({0.3, 0.5}));
  CHECK_THAT(pb_cdf(d2, 0), Catch::Matchers::WithinAbs(0.35, 1e-12));
  CHECK_THAT(pb_cdf(d2, 2), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(pb_cdf(d2, 3), std::domain_error);
  CHECK_THROWS_AS(pb_cdf(d2, -1), std::domain_error);
}

TEST_CASE("cdf fourier path equals prefix sums") {
  std::mt19937_64 rng(1010);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_params(rng, 10);
    auto d = pb_pmf(p);
    double prev = -1;
    for (long k = 0; k <= 10; ++k) {
      double prefix = pb_cdf(d, k);
      double fourier = pb_cdf_fourier(p, k);
      CHECK_THAT(prefix, Catch::Matchers::WithinAbs(fourier, 1e-10));
      CHECK(prefix >= prev - 1e-12);
      prev = prefix;
    }
    CHECK_THAT(pb_cdf(d, 10), Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("dft direct evaluation matches the transform acceleration") {
  std::mt19937_64 rng(600);
  auto p = random_params(rng, 600);
  auto direct = detail::pmf_dft(p.probs, p.n(), /*allow_fft=*/false);
  auto fast = detail::pmf_dft(p.probs, p.n(), /*allow_fft=*/true);
  CHECK(max_abs_diff(direct, fast) < 1e-11);
}

TEST_CASE("mean and variance") {
  auto [m1, v1] = mean_var(prob_params({0.5, 0.5}));
  CHECK_THAT(m1, Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(v1, Catch::Matchers::WithinAbs(0.5, 1e-15));
  auto [m2, v2] = mean_var(prob_params({0.3, 0.5}));
  CHECK_THAT(m2, Catch::Matchers::WithinAbs(0.8, 1e-15));
  CHECK_THAT(v2, Catch::Matchers::WithinAbs(0.46, 1e-15));
  // dispersion identity
  std::mt19937_64 rng(42);
  for (int t = 0; t < 25; ++t) {
    auto p = random_params(rng, 17);
    auto [mu, var] = mean_var(p);
    (void)mu;
    CHECK_THAT(var, Catch::Matchers::WithinAbs(variance_dispersion_form(p), 1e-12));
  }
  // fixed mean: homogeneous parameters maximize the variance
  auto [mh, vh] = mean_var(prob_params({0.5, 0.5}));
  auto [ms, vs] = mean_var(prob_params({0.2, 0.8}));
  (void)mh;
  (void)ms;
  CHECK(vh > vs);
}

TEST_CASE("mode rule on reference cases") {
  auto r1 = darroch_mode(prob_params({0.5, 0.5, 0.5, 0.5}));
  CHECK_FALSE(r1.two_modes);
  CHECK(r1.mode == 2);
  CHECK(r1.branch == 1);

  auto r2 = darroch_mode(prob_params({0.1, 0.2, 0.9}));
  CHECK(r2.mode == 1);

  auto d2 = pb_pmf(prob_params({0.1, 0.2, 0.9}));
  CHECK_THAT(d2.pmf.masses[0], Catch::Matchers::WithinAbs(0.072, 1e-12));
}

TEST_CASE("mode rule always contains the argmax") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> nd(1, 25);
  bool middle_branch_seen = false;
  for (int trial = 0; trial < 300; ++trial) {
    auto p = random_params(rng, nd(rng));
    auto d = pb_pmf(p);
    auto r = darroch_mode(p);
    if (r.two_modes) middle_branch_seen = true;
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < d.pmf.masses.size(); ++k)
      if (d.pmf.masses[k] > d.pmf.masses[argmax]) argmax = k;
    if (r.two_modes)
      CHECK((argmax == static_cast<std::size_t>(r.mode) ||
             argmax == static_cast<std::size_t>(r.mode + 1)));
    else
      CHECK(argmax == static_cast<std::size_t>(r.mode));
  }
  CHECK(middle_branch_seen);
}

TEST_CASE("degenerate endpoints of the mode rule") {
  auto r0 = darroch_mode(prob_params({0.0, 0.0}));
  CHECK(r0.mode == 0);
  auto rn = darroch_mode(prob_params({1.0, 1.0}));
  CHECK(rn.mode == 2);
}

TEST_CASE("floor pushforward") {
  // identity
  auto d = pb_pmf(binomial_params<rational>(3, rational(1, 2))).pmf;
  auto id = floor_pushforward(d, 1, 1);
  REQUIRE(id.masses == d.masses);

  // Bin(3,1/2), floor(2X/3): x=0..3 -> y=(0,0,1,2)
  auto f = floor_pushforward(d, 2, 3);
  REQUIRE(f.masses.size() == 3);
  CHECK(f.masses[0] == rational(1, 2));
  CHECK(f.masses[1] == rational(3, 8));
  CHECK(f.masses[2] == rational(1, 8));

  CHECK_THROWS_AS(floor_pushforward(d, 0, 3), std::domain_error);
  CHECK_THROWS_AS(floor_pushforward(d, 2, 0), std::domain_error);
}

TEST_CASE("floor(2X/3) closed-form masses for symmetric binomials") {
  // even positions aggregate two adjacent binomial weights, odd positions one
  for (long n = 1; n <= 4; ++n) {
    auto d = pb_pmf(binomial_params<rational>(3 * n, rational(1, 2))).pmf;
    auto f = floor_pushforward(d, 2, 3);
    rational denom(1, bigint(1) << (3 * n));
    for (long k = 0; 2 * k < static_cast<long>(f.masses.size()); ++k) {
      rational expect = rational(binomial_coefficient(3 * n + 1, 3 * k + 1)) * denom;
      CHECK(f.masses[2 * k] == expect);
      if (2 * k + 1 < static_cast<long>(f.masses.size())) {
        rational odd = rational(binomial_coefficient(3 * n, 3 * k + 2)) * denom;
        CHECK(f.masses[2 * k + 1] == odd);
      }
    }
    CHECK(f.total_mass() == rational(1));
  }
}

TEST_CASE("scale pushforward") {
  auto d = pb_pmf(binomial_params<rational>(2, rational(1, 2))).pmf;
  auto s = scale_pushforward(d, rational(2, 3));
  CHECK(s.offset == rational(0));
  CHECK(s.step == rational(2, 3));
  CHECK(s.point(2) == rational(4, 3));
  CHECK(s.masses == d.masses);

  auto s1 = scale_pushforward(d, rational(1));
  CHECK(s1.step == d.step);

  auto d9 = pb_pmf(binomial_params<rational>(9, rational(1, 2))).pmf;
  auto s9 = scale_pushforward(d9, rational(2, 3));
  CHECK(s9.point(9) == rational(6));
}

TEST_CASE("ultra-logconcavity of computed pmfs") {
  // necessary coefficient condition for the generating polynomial to be
  // real-rooted; spot-checked in floats here, certified in the poly suite
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_params(rng, 15);
    auto d = pb_pmf(p);
    const auto& a = d.pmf.masses;
    std::size_t n = a.size() - 1;
    for (std::size_t i = 1; i < n; ++i) {
      double lhs = a[i] * a[i];
      double rhs = a[i - 1] * a[i + 1] * (1.0 + 1.0 / i) * (1.0 + 1.0 / (n - i));
      CHECK(lhs >= rhs - 1e-12);
    }
  }
}
