#include "odmds/baselines.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "odmds/errors.hpp"
#include "odmds/metrics.hpp"
#include "odmds/perturbation.hpp"
#include "odmds/text.hpp"

namespace odmds {

std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::kRandomSummary:
      return "random_summary";
    case BaselineKind::kAllLead:
      return "all_lead";
    case BaselineKind::kOracleDocument:
      return "oracle_document";
    case BaselineKind::kOracleLead:
      return "oracle_lead";
    case BaselineKind::kBackgroundAbstract:
      return "background_abstract";
  }
  return "unknown";
}

BaselineKind parse_baseline_kind(std::string_view s) {
  for (auto k : kAllBaselines)
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown baseline '" + std::string(s) + "'");
}

std::string random_summary(const Example& example, const Dataset& dataset,
                           std::uint64_t seed) {
  if (dataset.examples().size() < 2)
    throw InvalidArgument("random summary baseline needs >= 2 examples");
  const auto target = text::tokenize(example.reference_summary).size();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::vector<const Example*> ties;
  for (const auto& other : dataset.examples()) {
    if (other.example_id == example.example_id) continue;
    const auto len = text::tokenize(other.reference_summary).size();
    const std::size_t dist = len > target ? len - target : target - len;
    if (dist < best) {
      best = dist;
      ties.clear();
    }
    if (dist == best) ties.push_back(&other);
  }
  std::sort(ties.begin(), ties.end(), [](const Example* a, const Example* b) {
    return a->example_id < b->example_id;
  });
  std::size_t pick = 0;
  if (ties.size() > 1) {
    std::mt19937_64 rng(derive_seed(seed, example.example_id));
    pick = uniform_below(rng, ties.size());
  }
  return ties[pick]->reference_summary;
}

std::string all_lead(const Example& example) {
  std::vector<std::string> leads;
  for (const auto& d : example.input_docs) {
    auto s = text::first_sentence(d.text);
    if (!s.empty()) leads.push_back(std::move(s));
  }
  return text::join(leads, " ");
}

OracleDocument oracle_document(const Example& example) {
  if (example.input_docs.empty())
    throw InvalidArgument("example has no input documents");
  const auto ref = rouge_tokens(preprocess(example.reference_summary), true);
  const Document* best = nullptr;
  double best_f1 = -1.0;
  for (const auto& d : example.input_docs) {
    const double f1 =
        rouge_n_tokens(rouge_tokens(preprocess(d.text), true), ref, 1).f1;
    if (f1 > best_f1 || (f1 == best_f1 && d.doc_id < best->doc_id)) {
      best = &d;
      best_f1 = f1;
    }
  }
  return {best->doc_id, best->text};
}

std::string oracle_lead(const Example& example, bool first_line_is_title) {
  const auto doc = oracle_document(example);
  return first_line_is_title ? text::first_line(doc.text)
                             : text::first_sentence(doc.text);
}

std::string background_abstract(const Example& example) {
  if (!example.additional_input)
    throw MissingField("example '" + example.example_id +
                       "' has no additional_input");
  return *example.additional_input;
}

std::string run_baseline_kind(BaselineKind kind, const Example& example,
                              const Dataset& dataset,
                              const DatasetConfig& config, std::uint64_t seed) {
  switch (kind) {
    case BaselineKind::kRandomSummary:
      return random_summary(example, dataset, seed);
    case BaselineKind::kAllLead:
      return all_lead(example);
    case BaselineKind::kOracleDocument:
      return oracle_document(example).text;
    case BaselineKind::kOracleLead:
      return oracle_lead(example, config.first_line_is_title);
    case BaselineKind::kBackgroundAbstract:
      return background_abstract(example);
  }
  throw InvalidArgument("unknown baseline");
}

}  // namespace odmds
