#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "odmds/corpus.hpp"

namespace odmds::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("odmds-test-" + std::to_string(stamp) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

inline Example make_example(const std::string& id,
                            const std::vector<std::string>& docs,
                            const std::string& reference,
                            Split split = Split::kTest,
                            std::optional<std::string> additional = {}) {
  Example ex;
  ex.example_id = id;
  ex.reference_summary = reference;
  ex.additional_input = std::move(additional);
  ex.split = split;
  for (std::size_t i = 0; i < docs.size(); ++i)
    ex.input_docs.push_back(Document{make_doc_id(id, i), docs[i], id, split});
  return ex;
}

inline std::string pad2(std::size_t i) {
  return (i < 10 ? "0" : "") + std::to_string(i);
}

// Each example owns a private vocabulary: its key term appears only in its
// own documents and reference. Document j repeats the key (ndocs - j) times
// and is padded with private filler to a common length, so BM25 ranks the
// example's documents strictly in their original order.
inline Dataset disjoint_dataset(std::size_t n_examples, std::uint64_t seed = 7,
                                Split split = Split::kTest) {
  std::mt19937_64 rng(seed);
  std::vector<Example> examples;
  for (std::size_t i = 0; i < n_examples; ++i) {
    const std::string id = "ex" + pad2(i);
    const std::string key = "key" + pad2(i);
    const std::size_t ndocs = 2 + rng() % 4;
    std::vector<std::string> docs;
    for (std::size_t j = 0; j < ndocs; ++j) {
      std::string first;
      for (std::size_t r = 0; r < ndocs - j; ++r) first += key + " ";
      std::size_t filler = 0;
      for (std::size_t r = ndocs - j; r < ndocs + 1; ++r)
        first += "fill" + pad2(i) + "d" + std::to_string(j) + "w" +
                 std::to_string(filler++) + " ";
      first.pop_back();
      docs.push_back(first + ". Then topic" + pad2(i) + " detail" +
                     std::to_string(j) + " follows here.");
    }
    const std::string ref =
        key + " topic" + pad2(i) + " summary of " + key + " follows.";
    examples.push_back(make_example(id, docs, ref, split));
  }
  return Dataset("disjoint", std::move(examples));
}

inline std::string random_text(std::mt19937_64& rng, std::size_t vocab,
                               std::size_t min_len, std::size_t max_len) {
  const std::size_t len = min_len + rng() % (max_len - min_len + 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) {
    if (i) s += ' ';
    s += "w" + std::to_string(rng() % vocab);
  }
  return s;
}

}  // namespace odmds::testing
