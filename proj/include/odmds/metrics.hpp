#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace odmds {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

struct RougeTriple {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;

  double rouge_avg_f1() const;
  friend bool operator==(const RougeTriple&, const RougeTriple&) = default;
};

// Strips leading/trailing whitespace, turns newlines and tabs into spaces and
// collapses runs of spaces.
std::string preprocess(std::string_view text);

// Lowercase, non-[a-z0-9] runs become separators; with `stem`, tokens longer
// than three characters are Porter-stemmed.
std::vector<std::string> rouge_tokens(std::string_view text, bool stem);

// Clipped n-gram overlap. Scores are in [0, 1]; empty sides give zeros.
RougeScore rouge_n(std::string_view candidate, std::string_view reference,
                   int n, bool stem = true);

// LCS over the whole text as one token sequence.
RougeScore rouge_l(std::string_view candidate, std::string_view reference,
                   bool stem = true);

double rouge_avg(double rouge1_f1, double rouge2_f1, double rougeL_f1);

// Preprocesses both texts, then computes ROUGE-1/2/L.
RougeTriple score_summary(std::string_view candidate,
                          std::string_view reference, bool stem = true);

// Token-level helpers, exposed for callers that tokenize once.
RougeScore rouge_n_tokens(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference, int n);
RougeScore rouge_l_tokens(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference);
std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

}  // namespace odmds
