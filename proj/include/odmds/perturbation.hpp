#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "odmds/corpus.hpp"
#include "odmds/embedding_store.hpp"

namespace odmds {

enum class PerturbationKind {
  kAddition,
  kDeletion,
  kReplacement,
  kDuplication,
  kSorting,
  kBacktranslation,
};

enum class Selection { kRandom, kOracle };

std::string_view to_string(PerturbationKind k);
std::string_view to_string(Selection s);
PerturbationKind parse_perturbation_kind(std::string_view s);
Selection parse_selection(std::string_view s);

inline constexpr PerturbationKind kAllPerturbationKinds[] = {
    PerturbationKind::kAddition,    PerturbationKind::kDeletion,
    PerturbationKind::kReplacement, PerturbationKind::kDuplication,
    PerturbationKind::kSorting,     PerturbationKind::kBacktranslation,
};

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kAddition;
  double fraction = 0.0;
  Selection selection = Selection::kRandom;
  std::uint64_t seed = 0;

  friend bool operator==(const PerturbationSpec&,
                         const PerturbationSpec&) = default;
};

nlohmann::json to_json(const PerturbationSpec& spec);
PerturbationSpec perturbation_spec_from_json(const nlohmann::json& j);

enum class Provenance { kKept, kAdded, kDuplicated, kTransformed };
std::string_view to_string(Provenance p);

struct PerturbedExample {
  std::string example_id;
  std::vector<Document> perturbed_docs;
  PerturbationSpec applied;
  std::vector<Provenance> provenance;  // parallel to perturbed_docs
  std::vector<std::string> removed_doc_ids;
};

// Cosine similarity of unigram count vectors under the index tokenizer.
// Returns 0 when either side has no tokens.
double lexical_similarity(std::string_view doc_text,
                          std::string_view reference_text);

// Similarity of a document to an example's reference summary. The lexical
// scorer needs nothing else; the embedding scorer takes the dot product of
// the document vector with the example's query vector in the store.
class SimilarityScorer {
 public:
  enum class Kind { kLexicalUnigramCosine, kEmbeddingDot };

  static SimilarityScorer lexical();
  static SimilarityScorer embedding(const EmbeddingStore& store);

  Kind kind() const { return kind_; }

  double similarity(const Document& doc, const Example& example) const;

  // Similarity of every index document to the example's reference, indexed
  // by index position. The lexical path reads term counts from the postings
  // and gives the same values as similarity().
  std::vector<double> similarities(const DocumentIndex& index,
                                   const Example& example) const;

 private:
  SimilarityScorer(Kind kind, const EmbeddingStore* store)
      : kind_(kind), store_(store) {}

  Kind kind_;
  const EmbeddingStore* store_;
};

// Produces the replacement text for a backtranslated document.
class DocumentTransformer {
 public:
  virtual ~DocumentTransformer() = default;
  virtual std::string transform(std::string_view text) const = 0;
};

class IdentityTransformer : public DocumentTransformer {
 public:
  std::string transform(std::string_view text) const override {
    return std::string(text);
  }
};

// round-half-up(fraction * set_size), capped at set_size, and at
// set_size - 1 for deletion so the input never becomes empty.
std::size_t n_from_fraction(double fraction, std::size_t set_size,
                            PerturbationKind kind);

// Mixes a run seed with an example id; stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt);

// Uniform integer in [0, bound) from a standard-defined engine, so results
// do not depend on the standard library's distributions.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

// Picks n of the example's documents. Random: seeded sample without
// replacement, in draw order. Oracle: the n least similar to the reference,
// ascending, ties by doc_id.
std::vector<Document> select_targets(const Example& example, std::size_t n,
                                     Selection selection,
                                     const SimilarityScorer& scorer,
                                     std::uint64_t seed);

// Picks n documents from the index excluding the example's own. Random:
// seeded sample in draw order. Oracle: the n most similar to the reference,
// descending, ties by doc_id. Throws PoolExhausted.
std::vector<Document> select_pool_docs(const DocumentIndex& index,
                                       const Example& example, std::size_t n,
                                       Selection selection,
                                       const SimilarityScorer& scorer,
                                       std::uint64_t seed);

// Applies one perturbation to the example's ground-truth documents. Kept
// documents stay in their original order; added and duplicated documents
// follow in selection order. Backtranslation needs a transformer
// (TransformerUnavailable otherwise).
PerturbedExample apply(const PerturbationSpec& spec, const Example& example,
                       const DocumentIndex& index,
                       const SimilarityScorer& scorer,
                       const DocumentTransformer* transformer = nullptr);

}  // namespace odmds
