#include "odmds/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "odmds/errors.hpp"

namespace odmds {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return sample_stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw LengthMismatch("paired t-test needs equal-length samples (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  if (a.size() < 2) throw InvalidArgument("paired t-test needs n >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double n = static_cast<double>(d.size());
  const double md = mean(d);
  const double sd = sample_stddev(d);
  TestResult r;
  r.n = d.size();
  if (sd == 0.0) {
    if (md == 0.0) {
      r.statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.statistic = md > 0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.statistic = md / (sd / std::sqrt(n));
  boost::math::students_t dist(n - 1.0);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(
                        dist, std::fabs(r.statistic)));
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

TestResult binomial_test(std::size_t successes, std::size_t failures) {
  const std::size_t n = successes + failures;
  if (n == 0) throw InvalidArgument("binomial test needs at least one trial");
  const double dn = static_cast<double>(n);
  auto log_pmf = [&](std::size_t k) {
    const double dk = static_cast<double>(k);
    return std::lgamma(dn + 1) - std::lgamma(dk + 1) -
           std::lgamma(dn - dk + 1) + dn * std::log(0.5);
  };
  const double observed = log_pmf(successes);
  // Relative tolerance so outcomes equal to the observed one up to rounding
  // are counted as "as extreme".
  const double threshold = observed + std::log1p(1e-7);
  double p = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double lp = log_pmf(k);
    if (lp <= threshold) p += std::exp(lp);
  }
  TestResult r;
  r.statistic = static_cast<double>(successes) / dn;
  r.p_value = std::clamp(p, 0.0, 1.0);
  r.n = n;
  return r;
}

double fleiss_kappa(const std::vector<std::vector<std::size_t>>& ratings) {
  if (ratings.empty()) throw RaggedMatrix("no items to rate");
  const std::size_t categories = ratings.front().size();
  if (categories == 0) throw RaggedMatrix("no categories");
  std::size_t raters = 0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (ratings[i].size() != categories)
      throw RaggedMatrix("row " + std::to_string(i) +
                         " has a different number of categories");
    std::size_t row = 0;
    for (auto c : ratings[i]) row += c;
    if (i == 0) raters = row;
    if (row != raters)
      throw RaggedMatrix("row " + std::to_string(i) + " sums to " +
                         std::to_string(row) + ", expected " +
                         std::to_string(raters));
  }
  if (raters < 2) throw RaggedMatrix("need at least two raters per item");

  const double n_items = static_cast<double>(ratings.size());
  const double r = static_cast<double>(raters);
  std::vector<double> col(categories, 0.0);
  double p_bar = 0.0;
  for (const auto& row : ratings) {
    double sq = 0.0;
    for (std::size_t j = 0; j < categories; ++j) {
      const double c = static_cast<double>(row[j]);
      sq += c * c;
      col[j] += c;
    }
    p_bar += (sq - r) / (r * (r - 1.0));
  }
  p_bar /= n_items;
  double p_e = 0.0;
  for (double c : col) {
    const double pj = c / (n_items * r);
    p_e += pj * pj;
  }
  if (p_e >= 1.0) return 1.0;  // a single category used throughout
  return (p_bar - p_e) / (1.0 - p_e);
}

}  // namespace odmds
