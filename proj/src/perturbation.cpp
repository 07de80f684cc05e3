#include "odmds/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "odmds/errors.hpp"
#include "odmds/text.hpp"

namespace odmds {

using nlohmann::json;

std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::kAddition:
      return "addition";
    case PerturbationKind::kDeletion:
      return "deletion";
    case PerturbationKind::kReplacement:
      return "replacement";
    case PerturbationKind::kDuplication:
      return "duplication";
    case PerturbationKind::kSorting:
      return "sorting";
    case PerturbationKind::kBacktranslation:
      return "backtranslation";
  }
  return "unknown";
}

std::string_view to_string(Selection s) {
  return s == Selection::kRandom ? "random" : "oracle";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kKept:
      return "kept";
    case Provenance::kAdded:
      return "added";
    case Provenance::kDuplicated:
      return "duplicated";
    case Provenance::kTransformed:
      return "transformed";
  }
  return "unknown";
}

PerturbationKind parse_perturbation_kind(std::string_view s) {
  for (auto k : kAllPerturbationKinds)
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown perturbation kind '" + std::string(s) + "'");
}

Selection parse_selection(std::string_view s) {
  if (s == "random") return Selection::kRandom;
  if (s == "oracle") return Selection::kOracle;
  throw InvalidArgument("unknown selection '" + std::string(s) + "'");
}

json to_json(const PerturbationSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"fraction", spec.fraction},
          {"selection", to_string(spec.selection)},
          {"seed", spec.seed}};
}

PerturbationSpec perturbation_spec_from_json(const json& j) {
  PerturbationSpec spec;
  spec.kind = parse_perturbation_kind(j.at("kind").get<std::string>());
  spec.fraction = j.value("fraction", 0.0);
  spec.selection = parse_selection(j.value("selection", std::string("random")));
  spec.seed = j.value("seed", std::uint64_t{0});
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0))
    throw InvalidArgument("perturbation fraction must lie in [0, 1]");
  return spec;
}

namespace {

double cosine_from_counts(std::uint64_t dot, std::uint64_t sq_a,
                          std::uint64_t sq_b) {
  if (sq_a == 0 || sq_b == 0) return 0.0;
  const double c = static_cast<double>(dot) /
                   std::sqrt(static_cast<double>(sq_a) *
                             static_cast<double>(sq_b));
  return std::clamp(c, 0.0, 1.0);
}

std::map<std::string, std::uint64_t, std::less<>> term_counts(
    std::string_view s) {
  std::map<std::string, std::uint64_t, std::less<>> counts;
  for (auto& t : text::tokenize(s)) ++counts[std::move(t)];
  return counts;
}

std::uint64_t squared_norm(
    const std::map<std::string, std::uint64_t, std::less<>>& counts) {
  std::uint64_t sq = 0;
  for (const auto& [t, c] : counts) sq += c * c;
  return sq;
}

std::vector<float> const& require_query(const EmbeddingStore& store,
                                        const Example& example) {
  const auto* q = store.query(example.example_id);
  if (!q)
    throw MissingVector("no query vector for example '" + example.example_id +
                        "'");
  return *q;
}

std::vector<float> const& require_doc(const EmbeddingStore& store,
                                      const std::string& doc_id) {
  const auto* d = store.doc(doc_id);
  if (!d) throw MissingVector("no vector for document '" + doc_id + "'");
  return *d;
}

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Draws n distinct values from [0, m) in draw order (sparse Fisher-Yates).
std::vector<std::size_t> sample_indices(std::size_t m, std::size_t n,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::unordered_map<std::size_t, std::size_t> swapped;
  auto at = [&](std::size_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + uniform_below(rng, m - i);
    const std::size_t vi = at(i);
    const std::size_t vj = at(j);
    out.push_back(vj);
    swapped[j] = vi;
    swapped[i] = vj;
  }
  return out;
}

constexpr std::uint64_t kTargetStream = 1;
constexpr std::uint64_t kPoolStream = 2;
constexpr std::uint64_t kShuffleStream = 3;

}  // namespace

double lexical_similarity(std::string_view doc_text,
                          std::string_view reference_text) {
  const auto a = term_counts(doc_text);
  const auto b = term_counts(reference_text);
  std::uint64_t dot = 0;
  for (const auto& [t, c] : a)
    if (auto it = b.find(t); it != b.end()) dot += c * it->second;
  return cosine_from_counts(dot, squared_norm(a), squared_norm(b));
}

SimilarityScorer SimilarityScorer::lexical() {
  return SimilarityScorer(Kind::kLexicalUnigramCosine, nullptr);
}

SimilarityScorer SimilarityScorer::embedding(const EmbeddingStore& store) {
  return SimilarityScorer(Kind::kEmbeddingDot, &store);
}

double SimilarityScorer::similarity(const Document& doc,
                                    const Example& example) const {
  if (kind_ == Kind::kLexicalUnigramCosine)
    return lexical_similarity(doc.text, example.reference_summary);
  return dot(require_doc(*store_, doc.doc_id), require_query(*store_, example));
}

std::vector<double> SimilarityScorer::similarities(
    const DocumentIndex& index, const Example& example) const {
  std::vector<double> sims(index.size(), 0.0);
  if (kind_ == Kind::kEmbeddingDot) {
    const auto& q = require_query(*store_, example);
    for (std::size_t pos = 0; pos < index.size(); ++pos)
      sims[pos] = dot(require_doc(*store_, index.document(pos).doc_id), q);
    return sims;
  }
  const auto ref = term_counts(example.reference_summary);
  const std::uint64_t ref_sq = squared_norm(ref);
  std::vector<std::uint64_t> dots(index.size(), 0);
  for (const auto& [term, count] : ref) {
    const auto* plist = index.postings(term);
    if (!plist) continue;
    for (const auto& p : *plist) dots[p.doc] += count * p.tf;
  }
  for (std::size_t pos = 0; pos < index.size(); ++pos)
    sims[pos] = cosine_from_counts(dots[pos], index.doc_squared_norm(pos),
                                   ref_sq);
  return sims;
}

std::size_t n_from_fraction(double fraction, std::size_t set_size,
                            PerturbationKind kind) {
  if (set_size < 1) throw InvalidArgument("document set is empty");
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InvalidArgument("fraction must lie in [0, 1]");
  // The epsilon keeps products such as 0.3 * 5 from rounding down.
  const double scaled = fraction * static_cast<double>(set_size);
  auto n = static_cast<std::size_t>(std::floor(scaled + 0.5 + 1e-9));
  n = std::min(n, set_size);
  if (kind == PerturbationKind::kDeletion) n = std::min(n, set_size - 1);
  return n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt) {
  // FNV-1a over the salt, then mixed with the seed.
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : salt) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return mix(seed ^ mix(h));
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below needs a positive bound");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

std::vector<Document> select_targets(const Example& example, std::size_t n,
                                     Selection selection,
                                     const SimilarityScorer& scorer,
                                     std::uint64_t seed) {
  const auto& docs = example.input_docs;
  if (n > docs.size())
    throw InvalidArgument("cannot select " + std::to_string(n) +
                          " targets from " + std::to_string(docs.size()) +
                          " documents");
  std::vector<Document> out;
  out.reserve(n);
  if (selection == Selection::kRandom) {
    for (std::size_t i : sample_indices(docs.size(), n, seed))
      out.push_back(docs[i]);
    return out;
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i)
    scored.emplace_back(scorer.similarity(docs[i], example), i);
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return docs[a.second].doc_id < docs[b.second].doc_id;
  });
  for (std::size_t i = 0; i < n; ++i) out.push_back(docs[scored[i].second]);
  return out;
}

std::vector<Document> select_pool_docs(const DocumentIndex& index,
                                       const Example& example, std::size_t n,
                                       Selection selection,
                                       const SimilarityScorer& scorer,
                                       std::uint64_t seed) {
  std::vector<std::size_t> excluded;
  for (const auto& d : example.input_docs)
    if (auto pos = index.position(d.doc_id)) excluded.push_back(*pos);
  std::sort(excluded.begin(), excluded.end());
  const std::size_t pool_size = index.size() - excluded.size();
  if (n > pool_size)
    throw PoolExhausted("need " + std::to_string(n) +
                        " pool documents for example '" + example.example_id +
                        "' but only " + std::to_string(pool_size) +
                        " are available");
  std::vector<Document> out;
  out.reserve(n);
  if (n == 0) return out;
  if (selection == Selection::kRandom) {
    for (std::size_t rank : sample_indices(pool_size, n, seed)) {
      // Map the rank within the pool to an index position by skipping the
      // excluded positions at or below it.
      std::size_t pos = rank;
      for (std::size_t e : excluded) {
        if (e <= pos)
          ++pos;
        else
          break;
      }
      out.push_back(index.document(pos));
    }
    return out;
  }
  const auto sims = scorer.similarities(index, example);
  std::vector<std::size_t> pool;
  pool.reserve(pool_size);
  for (std::size_t pos = 0, e = 0; pos < index.size(); ++pos) {
    if (e < excluded.size() && excluded[e] == pos) {
      ++e;
      continue;
    }
    pool.push_back(pos);
  }
  // Positions follow doc_id order, so position breaks ties by doc_id.
  std::partial_sort(pool.begin(), pool.begin() + n, pool.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return a < b;
                    });
  for (std::size_t i = 0; i < n; ++i) out.push_back(index.document(pool[i]));
  return out;
}

PerturbedExample apply(const PerturbationSpec& spec, const Example& example,
                       const DocumentIndex& index,
                       const SimilarityScorer& scorer,
                       const DocumentTransformer* transformer) {
  if (spec.kind == PerturbationKind::kBacktranslation && !transformer)
    throw TransformerUnavailable(
        "backtranslation requires a document transformer");
  const auto& docs = example.input_docs;
  const std::size_t n = n_from_fraction(spec.fraction, docs.size(), spec.kind);
  const std::uint64_t ex_seed = derive_seed(spec.seed, example.example_id);

  PerturbedExample out;
  out.example_id = example.example_id;
  out.applied = spec;

  auto keep_all = [&] {
    out.perturbed_docs = docs;
    out.provenance.assign(docs.size(), Provenance::kKept);
  };
  auto keep_except = [&](const std::vector<Document>& removed) {
    std::set<std::string_view> drop;
    for (const auto& d : removed) {
      drop.insert(d.doc_id);
      out.removed_doc_ids.push_back(d.doc_id);
    }
    for (const auto& d : docs) {
      if (drop.count(d.doc_id)) continue;
      out.perturbed_docs.push_back(d);
      out.provenance.push_back(Provenance::kKept);
    }
  };
  auto append = [&](const std::vector<Document>& extra, Provenance tag) {
    for (const auto& d : extra) {
      out.perturbed_docs.push_back(d);
      out.provenance.push_back(tag);
    }
  };
  auto targets = [&] {
    return select_targets(example, n, spec.selection, scorer,
                          mix(ex_seed ^ kTargetStream));
  };
  auto pool = [&] {
    return select_pool_docs(index, example, n, spec.selection, scorer,
                            mix(ex_seed ^ kPoolStream));
  };

  switch (spec.kind) {
    case PerturbationKind::kAddition:
      keep_all();
      append(pool(), Provenance::kAdded);
      break;
    case PerturbationKind::kDeletion:
      keep_except(targets());
      break;
    case PerturbationKind::kReplacement: {
      // Removed targets are least similar first, pool docs most similar
      // first; position i of each list forms one replacement pair.
      auto removed = targets();
      auto added = pool();
      keep_except(removed);
      append(added, Provenance::kAdded);
      break;
    }
    case PerturbationKind::kDuplication:
      keep_all();
      append(targets(), Provenance::kDuplicated);
      break;
    case PerturbationKind::kSorting: {
      keep_all();
      const auto chosen = targets();
      std::set<std::string_view> ids;
      for (const auto& d : chosen) ids.insert(d.doc_id);
      std::vector<std::size_t> slots;
      for (std::size_t i = 0; i < docs.size(); ++i)
        if (ids.count(docs[i].doc_id)) slots.push_back(i);
      std::vector<Document> reordered;
      for (std::size_t s : slots) reordered.push_back(docs[s]);
      if (spec.selection == Selection::kRandom) {
        std::mt19937_64 rng(mix(ex_seed ^ kShuffleStream));
        for (std::size_t i = reordered.size(); i > 1; --i)
          std::swap(reordered[i - 1], reordered[uniform_below(rng, i)]);
      } else {
        std::vector<std::pair<double, Document>> scored;
        for (auto& d : reordered)
          scored.emplace_back(scorer.similarity(d, example), std::move(d));
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) {
                           if (a.first != b.first) return a.first > b.first;
                           return a.second.doc_id < b.second.doc_id;
                         });
        for (std::size_t i = 0; i < scored.size(); ++i)
          reordered[i] = std::move(scored[i].second);
      }
      for (std::size_t i = 0; i < slots.size(); ++i)
        out.perturbed_docs[slots[i]] = std::move(reordered[i]);
      break;
    }
    case PerturbationKind::kBacktranslation: {
      keep_all();
      const auto chosen = targets();
      std::set<std::string_view> ids;
      for (const auto& d : chosen) ids.insert(d.doc_id);
      for (std::size_t i = 0; i < out.perturbed_docs.size(); ++i) {
        if (!ids.count(out.perturbed_docs[i].doc_id)) continue;
        out.perturbed_docs[i].text =
            transformer->transform(out.perturbed_docs[i].text);
        out.provenance[i] = Provenance::kTransformed;
      }
      break;
    }
  }
  return out;
}

}  // namespace odmds
