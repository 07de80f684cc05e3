#include "odmds/embedding_store.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "odmds/errors.hpp"
#include "odmds/text.hpp"

namespace odmds {

using nlohmann::json;

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("embedding dim must be positive");
}

void EmbeddingStore::add_doc(std::string doc_id, std::vector<float> vector) {
  if (vector.size() != dim_)
    throw InvalidArgument("vector for doc '" + doc_id + "' has length " +
                          std::to_string(vector.size()) + ", expected " +
                          std::to_string(dim_));
  docs_.insert_or_assign(std::move(doc_id), std::move(vector));
}

void EmbeddingStore::add_query(std::string example_id,
                               std::vector<float> vector) {
  if (vector.size() != dim_)
    throw InvalidArgument("query vector for '" + example_id +
                          "' has length " + std::to_string(vector.size()) +
                          ", expected " + std::to_string(dim_));
  queries_.insert_or_assign(std::move(example_id), std::move(vector));
}

const std::vector<float>* EmbeddingStore::doc(std::string_view doc_id) const {
  auto it = docs_.find(doc_id);
  return it == docs_.end() ? nullptr : &it->second;
}

const std::vector<float>* EmbeddingStore::query(
    std::string_view example_id) const {
  auto it = queries_.find(example_id);
  return it == queries_.end() ? nullptr : &it->second;
}

EmbeddingStore EmbeddingStore::read(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!text::trim(line).empty()) return true;
    }
    return false;
  };
  if (!next()) throw ParseError(1, "missing embedding header");
  std::size_t dim = 0;
  try {
    dim = json::parse(line).at("dim").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError(lineno, std::string("bad embedding header: ") + e.what());
  }
  EmbeddingStore store(dim);
  while (next()) {
    try {
      const json rec = json::parse(line);
      auto id = rec.at("id").get<std::string>();
      auto kind = rec.at("kind").get<std::string>();
      auto vec = rec.at("vector").get<std::vector<float>>();
      if (kind == "doc")
        store.add_doc(std::move(id), std::move(vec));
      else if (kind == "query")
        store.add_query(std::move(id), std::move(vec));
      else
        throw ParseError(lineno, "unknown record kind '" + kind + "'");
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding store " + path.string());
  return read(in);
}

void EmbeddingStore::write(std::ostream& out) const {
  out << json{{"dim", dim_}}.dump() << '\n';
  for (const auto& [id, v] : docs_)
    out << json{{"id", id}, {"kind", "doc"}, {"vector", v}}.dump() << '\n';
  for (const auto& [id, v] : queries_)
    out << json{{"id", id}, {"kind", "query"}, {"vector", v}}.dump() << '\n';
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

}  // namespace odmds
