#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace odmds {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// Two-sided paired t-test on a - b. Zero-variance differences: a zero mean
// gives statistic 0 and p = 1; a nonzero mean gives statistic +/-inf and
// p = 0. Throws LengthMismatch on unequal lengths, InvalidArgument when
// fewer than two pairs are given.
TestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Exact two-sided binomial test of successes out of successes + failures
// against p0 = 0.5. Sums the probabilities of all outcomes no more likely
// than the observed one. statistic holds the observed success proportion.
TestResult binomial_test(std::size_t successes, std::size_t failures);

// Fleiss' kappa for an items x categories matrix of rating counts. Every row
// must sum to the same rater count r >= 2 (RaggedMatrix otherwise). Perfect
// agreement yields 1.0.
double fleiss_kappa(const std::vector<std::vector<std::size_t>>& ratings);

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> xs);
// sample_stddev / sqrt(n); 0 for fewer than two values.
double standard_error(std::span<const double> xs);

}  // namespace odmds
