#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "odmds/perturbation.hpp"

namespace odmds {

inline constexpr std::string_view kBuiltinLead = "builtin:lead";
inline constexpr std::string_view kBuiltinIdentity = "builtin:identity";

// A summarizer or transformer endpoint: either a builtin ("builtin:lead",
// "builtin:identity") or an HTTP base URL such as "http://127.0.0.1:8080".
struct SummarizerSpec {
  std::string id = "builtin-lead";
  std::string endpoint{kBuiltinLead};
  std::size_t max_input_tokens = 4096;
  std::optional<std::size_t> max_words_hint;
  std::chrono::milliseconds timeout{60000};
  int retries = 2;
  std::size_t max_in_flight = 4;
};

inline SummarizerSpec identity_transformer_spec() {
  SummarizerSpec spec;
  spec.id = "identity";
  spec.endpoint = kBuiltinIdentity;
  return spec;
}

nlohmann::json to_json(const SummarizerSpec& spec);
SummarizerSpec summarizer_spec_from_json(const nlohmann::json& j);

struct SummaryRequest {
  std::vector<std::string> documents;
  std::optional<std::string> additional_input;
  std::optional<std::size_t> max_words;
  // Derived from the request content when empty; reused across retries.
  std::string request_id;
};

struct SummaryResponse {
  std::string summary;
  std::string model_id;
};

// Cuts every document to floor(max_input_tokens / |docs|) whitespace tokens.
// Shorter documents are left alone; their unused budget is not passed on.
// Throws BudgetTooSmall when the per-document budget is zero.
std::vector<std::string> truncate_inputs(const std::vector<std::string>& docs,
                                         std::size_t max_input_tokens);

// First sentence of each document joined by spaces, cut to max_words
// whitespace words when given.
std::string builtin_lead(const std::vector<std::string>& documents,
                         std::optional<std::size_t> max_words);

// Stable id for a request body (FNV-1a of the serialized content).
std::string make_request_id(const nlohmann::json& content);

// Sends the request to the endpoint, retrying up to spec.retries times.
// Documents are sent as given; callers truncate first. Throws Timeout,
// ProtocolError or RemoteError once retries are exhausted.
SummaryResponse summarize(const SummarizerSpec& spec,
                          const SummaryRequest& request);

// builtin:identity returns the text unchanged; HTTP endpoints get
// POST /transform.
std::string transform_document(const SummarizerSpec& spec,
                               std::string_view text);

// POST /embed. Every returned vector must have the same length.
std::vector<std::vector<float>> embed_texts(
    const SummarizerSpec& spec, const std::vector<std::string>& texts);

class GatewayTransformer : public DocumentTransformer {
 public:
  explicit GatewayTransformer(SummarizerSpec spec) : spec_(std::move(spec)) {}
  std::string transform(std::string_view text) const override {
    return transform_document(spec_, text);
  }

 private:
  SummarizerSpec spec_;
};

}  // namespace odmds
