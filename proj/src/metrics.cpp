#include "odmds/metrics.hpp"

#include <algorithm>
#include <map>

#include "odmds/errors.hpp"
#include "odmds/porter_stemmer.hpp"

namespace odmds {

namespace {

RougeScore make_score(double overlap, double cand_total, double ref_total) {
  RougeScore s;
  s.precision = cand_total > 0 ? overlap / cand_total : 0.0;
  s.recall = ref_total > 0 ? overlap / ref_total : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

std::map<std::vector<std::string>, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, int n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  const auto un = static_cast<std::size_t>(n);
  if (tokens.size() < un) return counts;
  for (std::size_t i = 0; i + un <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + i,
                                      tokens.begin() + i + un)];
  return counts;
}

}  // namespace

double RougeTriple::rouge_avg_f1() const {
  return rouge_avg(rouge1.f1, rouge2.f1, rougeL.f1);
}

std::string preprocess(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    const bool ws = c == ' ' || c == '\n' || c == '\t' || c == '\r' ||
                    c == '\f' || c == '\v';
    if (ws) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> rouge_tokens(std::string_view text, bool stem) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (stem && cur.size() > 3) cur = porter_stem(cur);
    tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : text) {
    char lc = (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c;
    if ((lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9'))
      cur.push_back(lc);
    else
      flush();
  }
  flush();
  return tokens;
}

RougeScore rouge_n_tokens(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference, int n) {
  if (n < 1) throw InvalidArgument("ROUGE-N needs n >= 1");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  std::size_t cand_total = 0;
  std::size_t ref_total = 0;
  std::size_t overlap = 0;
  for (const auto& [g, c] : cand) cand_total += c;
  for (const auto& [g, c] : ref) {
    ref_total += c;
    if (auto it = cand.find(g); it != cand.end())
      overlap += std::min(c, it->second);
  }
  return make_score(static_cast<double>(overlap),
                    static_cast<double>(cand_total),
                    static_cast<double>(ref_total));
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l_tokens(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference) {
  return make_score(static_cast<double>(lcs_length(candidate, reference)),
                    static_cast<double>(candidate.size()),
                    static_cast<double>(reference.size()));
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference,
                   int n, bool stem) {
  return rouge_n_tokens(rouge_tokens(candidate, stem),
                        rouge_tokens(reference, stem), n);
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference,
                   bool stem) {
  return rouge_l_tokens(rouge_tokens(candidate, stem),
                        rouge_tokens(reference, stem));
}

double rouge_avg(double rouge1_f1, double rouge2_f1, double rougeL_f1) {
  return (rouge1_f1 + rouge2_f1 + rougeL_f1) / 3.0;
}

RougeTriple score_summary(std::string_view candidate,
                          std::string_view reference, bool stem) {
  const auto cand = rouge_tokens(preprocess(candidate), stem);
  const auto ref = rouge_tokens(preprocess(reference), stem);
  return RougeTriple{rouge_n_tokens(cand, ref, 1), rouge_n_tokens(cand, ref, 2),
                     rouge_l_tokens(cand, ref)};
}

}  // namespace odmds
