#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "pbkit/learning.hpp"

using namespace pbkit;
using test_helpers::random_params;

TEST_CASE("sampler basics") {
  CHECK_THROWS_AS(sample(prob_params({0.5}), 0, 1), std::domain_error);
  auto zeros = sample(prob_params({0.0, 0.0, 0.0}), 100, 42);
  for (long d : zeros.draws) CHECK(d == 0);
  auto ones = sample(prob_params({1.0, 1.0}), 100, 42);
  for (long d : ones.draws) CHECK(d == 2);
  // reproducible under the recorded seed
  auto s1 = sample(prob_params({0.3, 0.7}), 50, 7);
  auto s2 = sample(prob_params({0.3, 0.7}), 50, 7);
  CHECK(s1.draws == s2.draws);
  auto s3 = sample(prob_params({0.3, 0.7}), 50, 8);
  CHECK(s1.draws != s3.draws);
}

TEST_CASE("empirical pmf concentrates on the exact pmf") {
  // multinomial bands at three sigma, m = 1e6
  const std::size_t m = 1000000;
  auto s = sample(prob_params({0.5, 0.5}), m, 99);
  std::vector<double> emp(3, 0.0);
  for (long d : s.draws) emp[static_cast<std::size_t>(d)] += 1.0;
  const double expect[] = {0.25, 0.5, 0.25};
  for (int k = 0; k < 3; ++k) {
    double freq = emp[static_cast<std::size_t>(k)] / static_cast<double>(m);
    double band = 3.0 * std::sqrt(expect[k] * (1 - expect[k]) / static_cast<double>(m));
    CHECK(std::fabs(freq - expect[k]) <= band + 1e-12);
  }
}

TEST_CASE("learner is proper and recovers degenerate truths") {
  auto s = sample(prob_params(std::vector<double>(5, 0.0)), 200, 3);
  auto model = learn_pb(s, 0.1, 0.1);
  auto d = pb_pmf(model.params);
  CHECK_THAT(d.pmf.masses[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
  for (double p : model.params.probs) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK_THROWS_AS(learn_pb(sample_set{}, 0.1, 0.1), std::domain_error);
}

TEST_CASE("both branches trigger on the designed threshold") {
  std::mt19937_64 rng(5);
  // variance of Bin(20, 1/2) is 5: sparse
  auto s_small = sample(binomial_params<double>(20, 0.5), 5000, 11);
  CHECK(learn_pb(s_small, 0.1, 0.1).branch == learner_branch::sparse);
  // variance of Bin(60, 1/2) is 15: heavy
  auto s_big = sample(binomial_params<double>(60, 0.5), 5000, 12);
  CHECK(learn_pb(s_big, 0.1, 0.1).branch == learner_branch::heavy);
  (void)rng;
}

TEST_CASE("learner meets the tv target on a fair binomial") {
  auto report = evaluate_learner(binomial_params<double>(20, 0.5), 0.1, 0.1, 20, 777);
  CHECK(report.sample_size == learner_sample_size(0.1, 0.1));
  CHECK(report.success_rate >= 0.95);
  CHECK(report.mean_tv < 0.05);
}

TEST_CASE("learner meets the tv target on random truths") {
  std::mt19937_64 rng(31337);
  double worst = 1.0;
  for (int inst = 0; inst < 5; ++inst) {
    auto truth = random_params(rng, 20);
    auto report = evaluate_learner(truth, 0.1, 0.1, 10, 1000 + static_cast<std::uint64_t>(inst));
    worst = std::min(worst, report.success_rate);
  }
  CHECK(worst >= 0.9);
}

TEST_CASE("heavy branch moment matching is close in distribution") {
  auto truth = binomial_params<double>(80, 0.6);  // variance 19.2
  auto s = sample(truth, 20000, 21);
  auto model = learn_pb(s, 0.1, 0.1);
  REQUIRE(model.branch == learner_branch::heavy);
  CHECK(exact_tv_to_truth(model, truth) < 0.1);
  auto [mu, var] = mean_var(model.params);
  CHECK_THAT(mu, Catch::Matchers::WithinAbs(model.empirical_mean, 0.51));
  CHECK(var <= model.empirical_variance + 1.0);
}

TEST_CASE("consistency: medians improve along a sample-size sweep") {
  auto truth = prob_params({0.9, 0.8, 0.5, 0.5, 0.4, 0.3, 0.2, 0.1, 0.6, 0.7});
  std::vector<double> med;
  for (std::size_t m : {100u, 1000u, 10000u, 100000u}) {
    std::vector<double> tvs;
    for (std::uint64_t s = 0; s < 5; ++s) {
      auto model = learn_pb(sample(truth, m, 500 + s), 0.1, 0.1);
      tvs.push_back(exact_tv_to_truth(model, truth));
    }
    std::sort(tvs.begin(), tvs.end());
    med.push_back(tvs[2]);
  }
  CHECK(med.back() < med.front());
  CHECK(med[3] <= med[1] + 0.01);
  CHECK(med[2] <= med[0] + 0.01);
}

TEST_CASE("separation fails at a tenth of the required rate") {
  // m = 1/(10 eps^2) = 10 samples cannot reliably tell the pair apart
  auto rep = distinguish_test(20, 0.1, 10, 200, 4242);
  CHECK(rep.accuracy < 0.8);
  // sanity: with plenty of samples the same harness does separate them
  auto rich = distinguish_test(20, 0.1, 20000, 30, 4242);
  CHECK(rich.accuracy >= 0.9);
}
