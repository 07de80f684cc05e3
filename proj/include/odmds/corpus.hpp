#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odmds {

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct Document {
  std::string doc_id;
  std::string text;
  std::string source_example_id;
  Split source_split = Split::kTrain;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Example {
  std::string example_id;
  std::vector<Document> input_docs;
  std::string reference_summary;
  std::optional<std::string> additional_input;
  Split split = Split::kTrain;

  friend bool operator==(const Example&, const Example&) = default;
};

struct DatasetStats {
  std::size_t max_docs = 0;
  double mean_docs = 0.0;
  std::size_t total_docs = 0;
  std::size_t num_examples = 0;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

// Which text stands in for the query when retrieving an example's inputs.
enum class QueryField { kReferenceSummary, kAdditionalInput };

// Per-dataset loading and behaviour options.
struct DatasetConfig {
  std::string name = "dataset";
  QueryField query_field = QueryField::kReferenceSummary;
  // Keep only the first N documents of each example, applied at load.
  std::optional<std::size_t> max_input_docs;
  // Treat the first line of every document as its title (oracle lead).
  bool first_line_is_title = false;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::vector<Example> examples);

  const std::string& name() const { return name_; }
  const std::vector<Example>& examples() const { return examples_; }
  const DatasetStats& stats() const { return stats_; }
  // Statistics over the examples of one split only. All-zero if empty.
  DatasetStats split_stats(Split split) const;

  std::vector<const Example*> examples_in(Split split) const;
  const Example* find(std::string_view example_id) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.name_ == b.name_ && a.examples_ == b.examples_;
  }

 private:
  std::string name_;
  std::vector<Example> examples_;
  DatasetStats stats_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::map<Split, DatasetStats> split_stats_;
};

// Document ids are derived from the example id and the document's position:
// "<example_id>#<index, zero padded to 4 digits>".
std::string make_doc_id(std::string_view example_id, std::size_t position);

// Throws ValidationError on invariant violations (empty summary, empty
// document, duplicate ids).
void validate(const Dataset& dataset);

// Reads the canonical JSON-Lines dataset format. Throws ParseError with the
// 1-based line number on malformed input and ValidationError on invariant
// violations.
Dataset load_dataset(const std::filesystem::path& path,
                     const DatasetConfig& config = {});
Dataset parse_dataset(std::istream& in, const DatasetConfig& config = {});

void write_dataset(const Dataset& dataset, std::ostream& out);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

struct Posting {
  std::uint32_t doc = 0;  // position in DocumentIndex::documents()
  std::uint32_t tf = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct TokenizerConfig {
  std::string id{"unicode-lower-alnum/v1"};

  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) =
      default;
};

// Inverted index over every document of every split. Documents are kept in
// ascending doc_id order, so the index does not depend on insertion order.
// Immutable after construction.
class DocumentIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  DocumentIndex() = default;

  std::size_t size() const { return documents_.size(); }
  const std::vector<Document>& documents() const { return documents_; }
  const Document& document(std::size_t pos) const { return documents_[pos]; }
  const Document* find(std::string_view doc_id) const;
  std::optional<std::size_t> position(std::string_view doc_id) const;

  std::uint32_t doc_length(std::size_t pos) const { return doc_len_[pos]; }
  const std::vector<std::uint32_t>& doc_lengths() const { return doc_len_; }
  double avg_doc_len() const { return avg_doc_len_; }
  // Sum of squared term counts of the document (its unigram vector norm^2).
  std::uint64_t doc_squared_norm(std::size_t pos) const {
    return doc_sq_norm_[pos];
  }
  std::size_t document_frequency(std::string_view term) const;
  const std::vector<Posting>* postings(std::string_view term) const;
  const std::map<std::string, std::vector<Posting>, std::less<>>& terms()
      const {
    return postings_;
  }
  const TokenizerConfig& tokenizer() const { return tokenizer_; }

  void save(const std::filesystem::path& path) const;
  std::string serialize() const;
  static DocumentIndex load(const std::filesystem::path& path);
  static DocumentIndex deserialize(std::string_view data);

  friend DocumentIndex build_index(const Dataset& dataset,
                                   const TokenizerConfig& tokenizer);
  friend DocumentIndex build_index(std::vector<Document> documents,
                                   const TokenizerConfig& tokenizer);

 private:
  void finalize();
  void compute_norms();

  TokenizerConfig tokenizer_;
  std::vector<Document> documents_;
  std::vector<std::uint32_t> doc_len_;
  std::vector<std::uint64_t> doc_sq_norm_;
  double avg_doc_len_ = 0.0;
  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

DocumentIndex build_index(const Dataset& dataset,
                          const TokenizerConfig& tokenizer = {});
DocumentIndex build_index(std::vector<Document> documents,
                          const TokenizerConfig& tokenizer = {});

}  // namespace odmds
