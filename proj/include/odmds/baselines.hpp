#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "odmds/corpus.hpp"

namespace odmds {

enum class BaselineKind {
  kRandomSummary,
  kAllLead,
  kOracleDocument,
  kOracleLead,
  kBackgroundAbstract,
};

inline constexpr BaselineKind kAllBaselines[] = {
    BaselineKind::kRandomSummary, BaselineKind::kAllLead,
    BaselineKind::kOracleDocument, BaselineKind::kOracleLead,
    BaselineKind::kBackgroundAbstract,
};

std::string_view to_string(BaselineKind k);
BaselineKind parse_baseline_kind(std::string_view s);

// Reference summary of the other example whose reference has the closest
// token count. Exact-distance ties are ordered by example_id and one is
// drawn with `seed`.
std::string random_summary(const Example& example, const Dataset& dataset,
                           std::uint64_t seed);

std::string all_lead(const Example& example);

struct OracleDocument {
  std::string doc_id;
  std::string text;
};

// Input document with the highest ROUGE-1 F1 against the reference; ties by
// doc_id.
OracleDocument oracle_document(const Example& example);

// First sentence of the oracle document, or its first line when
// `first_line_is_title` is set.
std::string oracle_lead(const Example& example,
                        bool first_line_is_title = false);

// Throws MissingField when the example has no additional input.
std::string background_abstract(const Example& example);

std::string run_baseline_kind(BaselineKind kind, const Example& example,
                              const Dataset& dataset,
                              const DatasetConfig& config, std::uint64_t seed);

}  // namespace odmds
