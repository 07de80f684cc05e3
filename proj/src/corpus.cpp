#include "odmds/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "odmds/errors.hpp"
#include "odmds/text.hpp"

namespace odmds {

using nlohmann::json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "validation") return Split::kValidation;
  if (s == "test") return Split::kTest;
  throw InvalidArgument("unknown split '" + std::string(s) + "'");
}

namespace {

DatasetStats compute_stats(const std::vector<const Example*>& examples) {
  DatasetStats st;
  st.num_examples = examples.size();
  for (const Example* ex : examples) {
    st.max_docs = std::max(st.max_docs, ex->input_docs.size());
    st.total_docs += ex->input_docs.size();
  }
  if (!examples.empty())
    st.mean_docs = static_cast<double>(st.total_docs) /
                   static_cast<double>(examples.size());
  return st;
}

}  // namespace

Dataset::Dataset(std::string name, std::vector<Example> examples)
    : name_(std::move(name)), examples_(std::move(examples)) {
  std::vector<const Example*> all;
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    by_id_.emplace(examples_[i].example_id, i);
    all.push_back(&examples_[i]);
  }
  stats_ = compute_stats(all);
  for (Split s : {Split::kTrain, Split::kValidation, Split::kTest})
    split_stats_[s] = compute_stats(examples_in(s));
}

DatasetStats Dataset::split_stats(Split split) const {
  auto it = split_stats_.find(split);
  return it == split_stats_.end() ? DatasetStats{} : it->second;
}

std::vector<const Example*> Dataset::examples_in(Split split) const {
  std::vector<const Example*> out;
  for (const auto& ex : examples_)
    if (ex.split == split) out.push_back(&ex);
  return out;
}

const Example* Dataset::find(std::string_view example_id) const {
  auto it = by_id_.find(example_id);
  return it == by_id_.end() ? nullptr : &examples_[it->second];
}

std::string make_doc_id(std::string_view example_id, std::size_t position) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%04zu", position);
  return std::string(example_id) + buf;
}

void validate(const Dataset& dataset) {
  std::map<std::string_view, std::string_view> seen_docs;
  std::map<std::string_view, int> seen_examples;
  for (const auto& ex : dataset.examples()) {
    if (ex.example_id.empty())
      throw ValidationError(ex.example_id, "empty example_id");
    if (++seen_examples[ex.example_id] > 1)
      throw ValidationError(ex.example_id, "duplicate example_id");
    if (text::trim(ex.reference_summary).empty())
      throw ValidationError(ex.example_id, "empty reference_summary");
    if (ex.input_docs.empty())
      throw ValidationError(ex.example_id, "no input documents");
    for (const auto& doc : ex.input_docs) {
      if (doc.source_example_id != ex.example_id)
        throw ValidationError(ex.example_id,
                              "document '" + doc.doc_id +
                                  "' belongs to another example");
      if (text::trim(doc.text).empty())
        throw ValidationError(ex.example_id,
                              "empty document '" + doc.doc_id + "'");
      auto [it, inserted] = seen_docs.emplace(doc.doc_id, ex.example_id);
      if (!inserted)
        throw ValidationError(ex.example_id,
                              "duplicate doc_id '" + doc.doc_id + "'");
    }
  }
}

Dataset parse_dataset(std::istream& in, const DatasetConfig& config) {
  std::vector<Example> examples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    if (!obj.is_object()) throw ParseError(lineno, "expected a JSON object");
    auto require = [&](const char* key, json::value_t type) -> const json& {
      auto it = obj.find(key);
      if (it == obj.end())
        throw ParseError(lineno, std::string("missing field '") + key + "'");
      if (it->type() != type)
        throw ParseError(lineno, std::string("field '") + key +
                                     "' has the wrong type");
      return *it;
    };
    Example ex;
    ex.example_id = require("example_id", json::value_t::string);
    try {
      ex.split = parse_split(
          require("split", json::value_t::string).get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
    const json& docs = require("documents", json::value_t::array);
    ex.reference_summary = require("reference_summary", json::value_t::string);
    if (auto it = obj.find("additional_input"); it != obj.end()) {
      if (it->is_string())
        ex.additional_input = it->get<std::string>();
      else if (!it->is_null())
        throw ParseError(lineno, "field 'additional_input' has the wrong type");
    }
    std::size_t limit = docs.size();
    if (config.max_input_docs) limit = std::min(limit, *config.max_input_docs);
    for (std::size_t i = 0; i < limit; ++i) {
      if (!docs[i].is_string())
        throw ParseError(lineno, "documents must be strings");
      ex.input_docs.push_back(Document{make_doc_id(ex.example_id, i),
                                       docs[i].get<std::string>(),
                                       ex.example_id, ex.split});
    }
    examples.push_back(std::move(ex));
  }
  Dataset dataset(config.name, std::move(examples));
  validate(dataset);
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path,
                     const DatasetConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file " + path.string());
  return parse_dataset(in, config);
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& ex : dataset.examples()) {
    json docs = json::array();
    for (const auto& d : ex.input_docs) docs.push_back(d.text);
    json obj = {{"example_id", ex.example_id},
                {"split", to_string(ex.split)},
                {"documents", std::move(docs)},
                {"reference_summary", ex.reference_summary},
                {"additional_input", ex.additional_input
                                         ? json(*ex.additional_input)
                                         : json(nullptr)}};
    out << obj.dump() << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset file " + path.string());
  write_dataset(dataset, out);
}

// ---------------------------------------------------------------------------
// DocumentIndex

namespace {

constexpr std::string_view kIndexMagic = "ODMDSIDX";

}  // namespace

DocumentIndex build_index(std::vector<Document> documents,
                          const TokenizerConfig& tokenizer) {
  if (tokenizer.id != text::kTokenizerId)
    throw InvalidArgument("unsupported tokenizer '" + tokenizer.id + "'");
  DocumentIndex index;
  index.tokenizer_ = tokenizer;
  std::sort(documents.begin(), documents.end(),
            [](const Document& a, const Document& b) {
              return a.doc_id < b.doc_id;
            });
  for (std::size_t i = 1; i < documents.size(); ++i)
    if (documents[i].doc_id == documents[i - 1].doc_id)
      throw ValidationError(documents[i].source_example_id,
                            "duplicate doc_id '" + documents[i].doc_id + "'");
  index.documents_ = std::move(documents);
  index.finalize();
  return index;
}

DocumentIndex build_index(const Dataset& dataset,
                          const TokenizerConfig& tokenizer) {
  std::vector<Document> docs;
  docs.reserve(dataset.stats().total_docs);
  for (const auto& ex : dataset.examples())
    for (const auto& d : ex.input_docs) docs.push_back(d);
  return build_index(std::move(docs), tokenizer);
}

void DocumentIndex::finalize() {
  doc_len_.assign(documents_.size(), 0);
  postings_.clear();
  by_id_.clear();
  double total = 0.0;
  for (std::size_t pos = 0; pos < documents_.size(); ++pos) {
    by_id_.emplace(documents_[pos].doc_id, pos);
    std::map<std::string, std::uint32_t, std::less<>> tf;
    const auto tokens = text::tokenize(documents_[pos].text);
    for (const auto& t : tokens) ++tf[t];
    doc_len_[pos] = static_cast<std::uint32_t>(tokens.size());
    total += static_cast<double>(tokens.size());
    for (auto& [term, count] : tf) {
      auto it = postings_.find(term);
      if (it == postings_.end())
        it = postings_.emplace(term, std::vector<Posting>{}).first;
      it->second.push_back(Posting{static_cast<std::uint32_t>(pos), count});
    }
  }
  avg_doc_len_ =
      documents_.empty() ? 0.0 : total / static_cast<double>(documents_.size());
  compute_norms();
}

void DocumentIndex::compute_norms() {
  doc_sq_norm_.assign(documents_.size(), 0);
  for (const auto& [term, list] : postings_)
    for (const auto& p : list)
      doc_sq_norm_[p.doc] += static_cast<std::uint64_t>(p.tf) * p.tf;
}

const Document* DocumentIndex::find(std::string_view doc_id) const {
  auto pos = position(doc_id);
  return pos ? &documents_[*pos] : nullptr;
}

std::optional<std::size_t> DocumentIndex::position(
    std::string_view doc_id) const {
  auto it = by_id_.find(doc_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t DocumentIndex::document_frequency(std::string_view term) const {
  const auto* p = postings(term);
  return p ? p->size() : 0;
}

const std::vector<Posting>* DocumentIndex::postings(
    std::string_view term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

// Layout: 8-byte magic, one format-version byte, then a JSON body holding the
// tokenizer header, documents, lengths and postings.
std::string DocumentIndex::serialize() const {
  json docs = json::array();
  for (const auto& d : documents_)
    docs.push_back({d.doc_id, d.text, d.source_example_id,
                    std::string(to_string(d.source_split))});
  json postings = json::object();
  for (const auto& [term, list] : postings_) {
    json arr = json::array();
    for (const auto& p : list) arr.push_back({p.doc, p.tf});
    postings[term] = std::move(arr);
  }
  json body = {{"tokenizer", {{"id", tokenizer_.id}}},
               {"avg_doc_len", avg_doc_len_},
               {"documents", std::move(docs)},
               {"doc_lengths", doc_len_},
               {"postings", std::move(postings)}};
  std::string out(kIndexMagic);
  out.push_back(static_cast<char>(kFormatVersion));
  out += body.dump();
  return out;
}

DocumentIndex DocumentIndex::deserialize(std::string_view data) {
  if (data.size() < kIndexMagic.size() + 1 ||
      data.substr(0, kIndexMagic.size()) != kIndexMagic)
    throw FormatError("not a document index (bad magic)");
  const auto version =
      static_cast<unsigned char>(data[kIndexMagic.size()]);
  if (version != kFormatVersion)
    throw FormatError("unsupported index format version " +
                      std::to_string(version));
  json body;
  try {
    body = json::parse(data.substr(kIndexMagic.size() + 1));
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt index body: ") + e.what());
  }
  try {
    DocumentIndex index;
    index.tokenizer_.id = body.at("tokenizer").at("id").get<std::string>();
    if (index.tokenizer_.id != text::kTokenizerId)
      throw FormatError("index built with unsupported tokenizer '" +
                        index.tokenizer_.id + "'");
    for (const auto& d : body.at("documents"))
      index.documents_.push_back(Document{d.at(0), d.at(1), d.at(2),
                                          parse_split(d.at(3).get<std::string>())});
    index.doc_len_ = body.at("doc_lengths").get<std::vector<std::uint32_t>>();
    index.avg_doc_len_ = body.at("avg_doc_len").get<double>();
    if (index.doc_len_.size() != index.documents_.size())
      throw FormatError("document/length count mismatch");
    for (const auto& [term, list] : body.at("postings").items()) {
      std::vector<Posting> ps;
      ps.reserve(list.size());
      for (const auto& p : list) {
        Posting posting{p.at(0).get<std::uint32_t>(),
                        p.at(1).get<std::uint32_t>()};
        if (posting.doc >= index.documents_.size())
          throw FormatError("posting references unknown document");
        ps.push_back(posting);
      }
      index.postings_.emplace(term, std::move(ps));
    }
    for (std::size_t pos = 0; pos < index.documents_.size(); ++pos)
      index.by_id_.emplace(index.documents_[pos].doc_id, pos);
    index.compute_norms();
    return index;
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt index body: ") + e.what());
  }
}

void DocumentIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write index file " + path.string());
  out << serialize();
}

DocumentIndex DocumentIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace odmds
