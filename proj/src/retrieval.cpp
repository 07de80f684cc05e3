#include "odmds/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "odmds/errors.hpp"
#include "odmds/text.hpp"

namespace odmds {

std::vector<std::string> RankedRetrieval::top_ids(std::size_t k) const {
  std::vector<std::string> out;
  const std::size_t n = std::min(k, ranked.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].doc_id);
  return out;
}

Query build_pseudo_query(const Example& example, const DatasetConfig& config) {
  if (config.query_field == QueryField::kAdditionalInput) {
    if (!example.additional_input)
      throw MissingField("example '" + example.example_id +
                         "' has no additional_input to use as query");
    return Query{example.example_id, *example.additional_input};
  }
  return Query{example.example_id, example.reference_summary};
}

namespace {

// Positions [0, n) ordered by score descending then position ascending,
// truncated to cutoff. Positions are in doc_id order, so position order is
// doc_id order.
std::vector<std::size_t> top_positions(const std::vector<double>& scores,
                                       std::size_t cutoff) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k = std::min(cutoff, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), better);
  order.resize(k);
  return order;
}

}  // namespace

RankedRetrieval bm25_rank(const DocumentIndex& index, const Query& query,
                          std::size_t cutoff, const Bm25Params& params) {
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
  const auto tokens = text::tokenize(query.text);
  if (tokens.empty())
    throw EmptyQuery("query for '" + query.example_id + "' has no terms");
  std::map<std::string, std::uint32_t, std::less<>> qtf;
  for (const auto& t : tokens) ++qtf[t];

  const double n_docs = static_cast<double>(index.size());
  const double avgdl = index.avg_doc_len();
  std::vector<double> scores(index.size(), 0.0);
  for (const auto& [term, count] : qtf) {
    const auto* plist = index.postings(term);
    if (!plist) continue;
    const double df = static_cast<double>(plist->size());
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const Posting& p : *plist) {
      const double tf = p.tf;
      const double len_ratio =
          avgdl > 0.0 ? index.doc_length(p.doc) / avgdl : 1.0;
      const double norm = params.k1 * (1.0 - params.b + params.b * len_ratio);
      scores[p.doc] += count * idf * (tf * (params.k1 + 1.0)) / (tf + norm);
    }
  }

  RankedRetrieval out;
  out.example_id = query.example_id;
  out.retriever_id = "bm25";
  for (std::size_t pos : top_positions(scores, cutoff))
    out.ranked.push_back(ScoredDoc{index.document(pos).doc_id, scores[pos]});
  return out;
}

RankedRetrieval dense_rank(const EmbeddingStore& store,
                           std::string_view example_id, std::size_t cutoff) {
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
  const auto* q = store.query(example_id);
  if (!q)
    throw MissingVector("no query vector for example '" +
                        std::string(example_id) + "'");
  // docs() iterates in ascending doc_id order.
  std::vector<const std::string*> ids;
  std::vector<double> scores;
  ids.reserve(store.docs().size());
  scores.reserve(store.docs().size());
  for (const auto& [id, vec] : store.docs()) {
    ids.push_back(&id);
    scores.push_back(dot(vec, *q));
  }
  RankedRetrieval out;
  out.example_id = std::string(example_id);
  out.retriever_id = "dense-dot";
  for (std::size_t pos : top_positions(scores, cutoff))
    out.ranked.push_back(ScoredDoc{*ids[pos], scores[pos]});
  return out;
}

std::string_view to_string(TopK k) {
  switch (k) {
    case TopK::kMax:
      return "max";
    case TopK::kMean:
      return "mean";
    case TopK::kOracle:
      return "oracle";
  }
  return "unknown";
}

TopK parse_top_k(std::string_view s) {
  if (s == "max") return TopK::kMax;
  if (s == "mean") return TopK::kMean;
  if (s == "oracle") return TopK::kOracle;
  throw InvalidArgument("unknown top-k strategy '" + std::string(s) + "'");
}

std::size_t resolve_k(TopK strategy, const Dataset& dataset,
                      const Example& example) {
  switch (strategy) {
    case TopK::kMax:
      return std::max<std::size_t>(1, dataset.stats().max_docs);
    case TopK::kMean: {
      const double mean = dataset.split_stats(example.split).mean_docs;
      return std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(mean + 0.5)));
    }
    case TopK::kOracle:
      return example.input_docs.size();
  }
  return 1;
}

PrecisionRecall retrieval_pr_at_k(const std::set<std::string>& retrieved,
                                  const std::set<std::string>& gold) {
  if (gold.empty()) throw EmptyGold("gold document set is empty");
  if (retrieved.empty()) throw InvalidArgument("retrieved set is empty");
  std::size_t hits = 0;
  for (const auto& id : retrieved) hits += gold.count(id);
  return {static_cast<double>(hits) / static_cast<double>(retrieved.size()),
          static_cast<double>(hits) / static_cast<double>(gold.size())};
}

ErrorTally count_retrieval_errors(const std::set<std::string>& retrieved,
                                  const std::set<std::string>& gold) {
  std::size_t raw_add = 0;
  for (const auto& id : retrieved) raw_add += gold.count(id) == 0;
  std::size_t raw_del = 0;
  for (const auto& id : gold) raw_del += retrieved.count(id) == 0;
  const std::size_t rep = std::min(raw_add, raw_del);
  return {raw_add - rep, raw_del - rep, rep};
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos)
    return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

void write_rankings_csv(const std::vector<RankedRetrieval>& runs,
                        std::ostream& out) {
  out << "example_id,rank,doc_id,score\n";
  char buf[32];
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < run.ranked.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", run.ranked[i].score);
      out << csv_field(run.example_id) << ',' << (i + 1) << ','
          << csv_field(run.ranked[i].doc_id) << ',' << buf << '\n';
    }
  }
}

std::vector<RankedRetrieval> read_rankings_csv(std::istream& in) {
  std::vector<RankedRetrieval> runs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != "example_id,rank,doc_id,score")
        throw ParseError(lineno, "unexpected rankings header");
      continue;
    }
    if (line.empty()) continue;
    auto f = parse_csv_line(line);
    if (f.size() != 4) throw ParseError(lineno, "expected 4 fields");
    if (runs.empty() || runs.back().example_id != f[0]) {
      runs.push_back(RankedRetrieval{f[0], {}, ""});
    }
    try {
      runs.back().ranked.push_back(ScoredDoc{f[2], std::stod(f[3])});
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad score '" + f[3] + "'");
    }
  }
  return runs;
}

}  // namespace odmds
