#pragma once

// Brute-force reference computations used to check the library. They work
// from raw text and plain loops and share no code path with the library
// beyond the tokenizer.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "odmds/corpus.hpp"
#include "odmds/embedding_store.hpp"
#include "odmds/text.hpp"

namespace odmds::oracle {

struct Ranked {
  std::string doc_id;
  double score;
};

inline std::vector<Ranked> sort_and_cut(std::vector<Ranked> all,
                                        std::size_t cutoff) {
  std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (all.size() > cutoff) all.resize(cutoff);
  return all;
}

// Scores every document by scanning its tokens directly.
inline std::vector<Ranked> bm25(const std::vector<Document>& docs,
                                const std::string& query, std::size_t cutoff,
                                double k1 = 1.2, double b = 0.75) {
  std::vector<std::vector<std::string>> toks;
  double total = 0;
  for (const auto& d : docs) {
    toks.push_back(text::tokenize(d.text));
    total += static_cast<double>(toks.back().size());
  }
  const double n = static_cast<double>(docs.size());
  const double avgdl = total / n;
  std::map<std::string, double> qtf;
  for (const auto& t : text::tokenize(query)) qtf[t] += 1;
  std::vector<Ranked> all;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double score = 0.0;
    for (const auto& [term, count] : qtf) {
      double tf = 0;
      for (const auto& t : toks[i]) tf += t == term;
      if (tf == 0) continue;
      double df = 0;
      for (const auto& other : toks)
        df += std::find(other.begin(), other.end(), term) != other.end();
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double len_ratio = static_cast<double>(toks[i].size()) / avgdl;
      const double norm = k1 * (1.0 - b + b * len_ratio);
      score += count * idf * (tf * (k1 + 1.0)) / (tf + norm);
    }
    all.push_back({docs[i].doc_id, score});
  }
  return sort_and_cut(std::move(all), cutoff);
}

inline std::vector<Ranked> dense(const EmbeddingStore& store,
                                 const std::string& example_id,
                                 std::size_t cutoff) {
  const auto& q = *store.query(example_id);
  std::vector<Ranked> all;
  for (const auto& [id, v] : store.docs()) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += static_cast<double>(v[i]) * static_cast<double>(q[i]);
    all.push_back({id, s});
  }
  return sort_and_cut(std::move(all), cutoff);
}

inline std::size_t intersection_size(const std::set<std::string>& a,
                                     const std::set<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out.size();
}

inline std::size_t difference_size(const std::set<std::string>& a,
                                   const std::set<std::string>& b) {
  std::vector<std::string> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out.size();
}

// Error tally by greedily pairing one spurious with one missing document
// until either side runs out.
struct Tally {
  std::size_t additions, deletions, replacements;
};
inline Tally pair_off(const std::set<std::string>& retrieved,
                      const std::set<std::string>& gold) {
  std::vector<std::string> extra;
  std::vector<std::string> missing;
  for (const auto& r : retrieved)
    if (!gold.count(r)) extra.push_back(r);
  for (const auto& g : gold)
    if (!retrieved.count(g)) missing.push_back(g);
  Tally t{0, 0, 0};
  while (!extra.empty() && !missing.empty()) {
    extra.pop_back();
    missing.pop_back();
    ++t.replacements;
  }
  t.additions = extra.size();
  t.deletions = missing.size();
  return t;
}

// Student t density.
inline double t_pdf(double x, double df) {
  const double lnorm = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) -
                       0.5 * std::log(df * M_PI);
  return std::exp(lnorm - (df + 1) / 2 * std::log1p(x * x / df));
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double eps, double whole,
                               double fa, double fb, double fm, int depth) {
  const double m = (a + b) / 2;
  const double lm = (a + m) / 2;
  const double rm = (m + b) / 2;
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson(f, a, m, eps / 2, left, fa, fm, flm, depth - 1) +
         adaptive_simpson(f, m, b, eps / 2, right, fm, fb, frm, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double eps = 1e-14) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f((a + b) / 2);
  return adaptive_simpson(f, a, b, eps, (b - a) / 6 * (fa + 4 * fm + fb), fa,
                          fb, fm, 60);
}

struct TTest {
  double t;
  double p;
};

// Paired t-test from the textbook formulas; the p-value integrates the t
// density numerically.
inline TTest paired_t(const std::vector<double>& a,
                      const std::vector<double>& b) {
  const std::size_t n = a.size();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d;
    sum_sq += d * d;
  }
  const double dn = static_cast<double>(n);
  const double m = sum / dn;
  const double var = (sum_sq - dn * m * m) / (dn - 1);
  const double t = m / std::sqrt(var / dn);
  const double df = dn - 1;
  const double central =
      integrate([df](double x) { return t_pdf(x, df); }, 0.0, std::fabs(t));
  return {t, std::max(0.0, 1.0 - 2.0 * central)};
}

}  // namespace odmds::oracle
