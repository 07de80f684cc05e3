#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "odmds/errors.hpp"
#include "odmds/stats.hpp"
#include "oracles.hpp"

using namespace odmds;

TEST_CASE("binomial test") {
  const auto a = binomial_test(60, 23);
  CHECK(a.p_value > 5.965e-05);
  CHECK(a.p_value < 5.975e-05);
  CHECK(a.n == 83);
  const auto b = binomial_test(69, 27);
  CHECK(b.p_value > 2.145e-05);
  CHECK(b.p_value < 2.155e-05);
  CHECK(binomial_test(5, 5).p_value == doctest::Approx(1.0));
  CHECK(binomial_test(3, 9).p_value == doctest::Approx(binomial_test(9, 3).p_value));
  // 0 of 4: 2 * (1/16).
  CHECK(binomial_test(0, 4).p_value == doctest::Approx(0.125));
  CHECK_THROWS_AS(binomial_test(0, 0), InvalidArgument);
}

TEST_CASE("paired t-test degenerate cases") {
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> b = {2, 3, 4, 5};
  const auto same = paired_t_test(a, a);
  CHECK(same.p_value == 1.0);
  CHECK(same.statistic == 0.0);
  const auto shift = paired_t_test(a, b);
  CHECK(shift.p_value == 0.0);
  CHECK(shift.statistic == -std::numeric_limits<double>::infinity());
  CHECK(paired_t_test(b, a).statistic == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(paired_t_test(a, std::vector<double>{1, 2}), LengthMismatch);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1}, std::vector<double>{2}),
                  InvalidArgument);
}

TEST_CASE("paired t-test matches the textbook oracle") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + rng() % 20;
    const double shift = (trial % 3) * 0.4;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = noise(rng);
      b[i] = noise(rng) + shift;
    }
    const auto got = paired_t_test(a, b);
    const auto want = oracle::paired_t(a, b);
    CHECK(got.statistic == doctest::Approx(want.t).epsilon(1e-9));
    CHECK(std::fabs(got.p_value - want.p) < 1e-9);
  }
}

TEST_CASE("fleiss kappa") {
  CHECK(fleiss_kappa({{2, 1}, {1, 2}}) == doctest::Approx(-1.0 / 3.0));
  CHECK(fleiss_kappa({{3, 0}, {0, 3}, {3, 0}}) == 1.0);
  CHECK(fleiss_kappa({{4, 0}}) == 1.0);
  CHECK(fleiss_kappa({{2, 0}, {0, 2}, {1, 1}, {1, 1}}) == doctest::Approx(0.0));
  // Textbook example with 10 items, 14 raters, 5 categories.
  const std::vector<std::vector<std::size_t>> wiki = {
      {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
      {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
      {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7}};
  CHECK(fleiss_kappa(wiki) == doctest::Approx(0.20993).epsilon(1e-4));
  CHECK_THROWS_AS(fleiss_kappa({{2, 1}, {1, 1}}), RaggedMatrix);
  CHECK_THROWS_AS(fleiss_kappa({{1, 0}}), RaggedMatrix);
}

TEST_CASE("descriptive helpers") {
  const std::vector<double> xs = {1, 2, 3, 4};
  CHECK(mean(xs) == 2.5);
  CHECK(sample_stddev(xs) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(standard_error(xs) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2));
  CHECK(standard_error(std::vector<double>{1}) == 0);
}
