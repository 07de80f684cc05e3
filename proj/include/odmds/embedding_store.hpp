#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odmds {

// Precomputed document and query vectors. Query vectors are keyed by
// example id. Every vector has length dim().
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  std::size_t dim() const { return dim_; }

  void add_doc(std::string doc_id, std::vector<float> vector);
  void add_query(std::string example_id, std::vector<float> vector);

  // nullptr when absent.
  const std::vector<float>* doc(std::string_view doc_id) const;
  const std::vector<float>* query(std::string_view example_id) const;

  const std::map<std::string, std::vector<float>, std::less<>>& docs() const {
    return docs_;
  }
  const std::map<std::string, std::vector<float>, std::less<>>& queries()
      const {
    return queries_;
  }

  // Header line {"dim": N}, then one JSON record per line:
  // {"id": ..., "kind": "doc"|"query", "vector": [...]}.
  static EmbeddingStore read(std::istream& in);
  static EmbeddingStore load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<float>, std::less<>> docs_;
  std::map<std::string, std::vector<float>, std::less<>> queries_;
};

// Accumulated in double, in index order.
double dot(std::span<const float> a, std::span<const float> b);

}  // namespace odmds
