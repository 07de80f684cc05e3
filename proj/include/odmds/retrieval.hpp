#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "odmds/corpus.hpp"
#include "odmds/embedding_store.hpp"

namespace odmds {

struct Query {
  std::string example_id;
  std::string text;
};

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

// Documents ordered by non-increasing score, ties by ascending doc_id.
struct RankedRetrieval {
  std::string example_id;
  std::vector<ScoredDoc> ranked;
  std::string retriever_id;

  std::vector<std::string> top_ids(std::size_t k) const;
};

// Uses the reference summary, or the additional input when the dataset is
// configured to query with it. Throws MissingField if that input is absent.
Query build_pseudo_query(const Example& example, const DatasetConfig& config);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// Okapi BM25 with idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)). Each distinct
// query term contributes once per occurrence in the query. Query terms not in
// the index contribute nothing. Throws EmptyQuery if the query has no tokens.
RankedRetrieval bm25_rank(const DocumentIndex& index, const Query& query,
                          std::size_t cutoff, const Bm25Params& params = {});

// Dot-product ranking of every document vector against the query vector
// stored for `example_id`. Throws MissingVector.
RankedRetrieval dense_rank(const EmbeddingStore& store,
                           std::string_view example_id, std::size_t cutoff);

enum class TopK { kMax, kMean, kOracle };

std::string_view to_string(TopK k);
TopK parse_top_k(std::string_view s);

// max: largest document count in the dataset. mean: mean document count of
// the example's split, rounded half up. oracle: the example's own count.
std::size_t resolve_k(TopK strategy, const Dataset& dataset,
                      const Example& example);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// Set semantics. Throws EmptyGold when gold is empty and InvalidArgument
// when retrieved is empty.
PrecisionRecall retrieval_pr_at_k(const std::set<std::string>& retrieved,
                                  const std::set<std::string>& gold);

struct ErrorTally {
  std::size_t additions = 0;
  std::size_t deletions = 0;
  std::size_t replacements = 0;

  friend bool operator==(const ErrorTally&, const ErrorTally&) = default;
};

// One spurious and one missing document pair up as a replacement.
ErrorTally count_retrieval_errors(const std::set<std::string>& retrieved,
                                  const std::set<std::string>& gold);

// CSV with header example_id,rank,doc_id,score; ranks are 1-based.
void write_rankings_csv(const std::vector<RankedRetrieval>& runs,
                        std::ostream& out);
std::vector<RankedRetrieval> read_rankings_csv(std::istream& in);

}  // namespace odmds
