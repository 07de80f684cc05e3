#include "odmds/gateway.hpp"

#include <cstdio>
#include <thread>

#include "httplib.h"
#include "odmds/errors.hpp"
#include "odmds/text.hpp"

namespace odmds {

using nlohmann::json;

json to_json(const SummarizerSpec& spec) {
  return {{"id", spec.id},
          {"endpoint", spec.endpoint},
          {"max_input_tokens", spec.max_input_tokens},
          {"max_words", spec.max_words_hint ? json(*spec.max_words_hint)
                                            : json(nullptr)},
          {"timeout_ms", spec.timeout.count()},
          {"retries", spec.retries},
          {"max_in_flight", spec.max_in_flight}};
}

SummarizerSpec summarizer_spec_from_json(const json& j) {
  SummarizerSpec spec;
  spec.id = j.value("id", spec.id);
  spec.endpoint = j.value("endpoint", spec.endpoint);
  spec.max_input_tokens = j.value("max_input_tokens", spec.max_input_tokens);
  if (auto it = j.find("max_words"); it != j.end() && !it->is_null())
    spec.max_words_hint = it->get<std::size_t>();
  spec.timeout = std::chrono::milliseconds(
      j.value("timeout_ms", static_cast<long long>(spec.timeout.count())));
  spec.retries = j.value("retries", spec.retries);
  spec.max_in_flight = j.value("max_in_flight", spec.max_in_flight);
  if (spec.max_input_tokens == 0)
    throw InvalidArgument("max_input_tokens must be positive");
  if (spec.max_in_flight == 0) spec.max_in_flight = 1;
  if (spec.retries < 0) spec.retries = 0;
  return spec;
}

std::vector<std::string> truncate_inputs(const std::vector<std::string>& docs,
                                         std::size_t max_input_tokens) {
  if (docs.empty()) throw InvalidArgument("no documents to truncate");
  const std::size_t budget = max_input_tokens / docs.size();
  if (budget == 0)
    throw BudgetTooSmall("budget of " + std::to_string(max_input_tokens) +
                         " tokens cannot cover " + std::to_string(docs.size()) +
                         " documents");
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(text::truncate_tokens(d, budget));
  return out;
}

std::string builtin_lead(const std::vector<std::string>& documents,
                         std::optional<std::size_t> max_words) {
  std::vector<std::string> leads;
  for (const auto& d : documents) {
    auto s = text::first_sentence(d);
    if (!s.empty()) leads.push_back(std::move(s));
  }
  std::string joined = text::join(leads, " ");
  if (max_words) return text::truncate_tokens(joined, *max_words);
  return joined;
}

std::string make_request_id(const json& content) {
  const std::string s = content.dump();
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "req-%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Endpoint {
  std::string base;    // scheme://host:port
  std::string prefix;  // path prefix without trailing slash
};

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw InvalidArgument("endpoint '" + url + "' is not an http(s) URL");
  const auto path = url.find('/', scheme + 3);
  Endpoint ep;
  ep.base = url.substr(0, path);
  if (path != std::string::npos) {
    ep.prefix = url.substr(path);
    while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
  }
  return ep;
}

// One POST with the retry policy. Returns the parsed response body after
// checking that it echoes request_id.
json post_json(const SummarizerSpec& spec, const std::string& route,
               const json& body) {
  const Endpoint ep = parse_endpoint(spec.endpoint);
  const std::string payload = body.dump();
  const std::string request_id = body.at("request_id").get<std::string>();
  const int attempts = 1 + std::max(0, spec.retries);
  std::exception_ptr last;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(50 << (attempt - 1)));
    try {
      httplib::Client client(ep.base);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
          spec.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
          spec.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());
      auto res = client.Post(ep.prefix + route, payload, "application/json");
      if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout ||
            err == httplib::Error::Read)
          throw Timeout(spec.endpoint + route + ": " + httplib::to_string(err));
        throw ProtocolError(spec.endpoint + route +
                            ": transport failure: " + httplib::to_string(err));
      }
      json reply;
      try {
        reply = json::parse(res->body);
      } catch (const json::parse_error& e) {
        if (res->status >= 400) throw RemoteError(res->status, res->body);
        throw ProtocolError(spec.endpoint + route +
                            ": response is not JSON: " + e.what());
      }
      if (res->status >= 400) {
        std::string msg = reply.is_object() && reply.contains("error") &&
                                  reply["error"].is_string()
                              ? reply["error"].get<std::string>()
                              : res->body;
        throw RemoteError(res->status, msg);
      }
      if (!reply.is_object())
        throw ProtocolError(spec.endpoint + route + ": expected JSON object");
      if (reply.value("request_id", std::string()) != request_id)
        throw ProtocolError(spec.endpoint + route + ": request_id mismatch");
      return reply;
    } catch (const GatewayError&) {
      last = std::current_exception();
    }
  }
  std::rethrow_exception(last);
}

std::string require_string(const json& reply, const char* key,
                           const std::string& where) {
  auto it = reply.find(key);
  if (it == reply.end() || !it->is_string())
    throw ProtocolError(where + ": missing string field '" + key + "'");
  return it->get<std::string>();
}

}  // namespace

SummaryResponse summarize(const SummarizerSpec& spec,
                          const SummaryRequest& request) {
  if (request.documents.empty())
    throw InvalidArgument("summary request has no documents");
  const std::optional<std::size_t> max_words =
      request.max_words ? request.max_words : spec.max_words_hint;
  if (spec.endpoint == kBuiltinLead)
    return {builtin_lead(request.documents, max_words), spec.id};
  if (spec.endpoint.rfind("builtin:", 0) == 0)
    throw InvalidArgument("unknown builtin summarizer '" + spec.endpoint + "'");

  json content = {{"documents", request.documents},
                  {"additional_input", request.additional_input
                                           ? json(*request.additional_input)
                                           : json(nullptr)},
                  {"max_words", max_words ? json(*max_words) : json(nullptr)}};
  json body = content;
  body["request_id"] = request.request_id.empty() ? make_request_id(content)
                                                  : request.request_id;
  const json reply = post_json(spec, "/summarize", body);
  SummaryResponse out;
  out.summary = require_string(reply, "summary", spec.endpoint);
  if (text::trim(out.summary).empty())
    throw ProtocolError(spec.endpoint + ": empty summary");
  out.model_id = reply.value("model_id", spec.id);
  return out;
}

std::string transform_document(const SummarizerSpec& spec,
                               std::string_view text) {
  if (spec.endpoint == kBuiltinIdentity) return std::string(text);
  if (spec.endpoint.rfind("builtin:", 0) == 0)
    throw TransformerUnavailable("unknown builtin transformer '" +
                                 spec.endpoint + "'");
  json content = {{"text", std::string(text)}};
  json body = content;
  body["request_id"] = make_request_id(content);
  const json reply = post_json(spec, "/transform", body);
  return require_string(reply, "text", spec.endpoint);
}

std::vector<std::vector<float>> embed_texts(
    const SummarizerSpec& spec, const std::vector<std::string>& texts) {
  if (spec.endpoint.rfind("builtin:", 0) == 0)
    throw InvalidArgument("embedding needs an HTTP endpoint");
  json content = {{"texts", texts}};
  json body = content;
  body["request_id"] = make_request_id(content);
  const json reply = post_json(spec, "/embed", body);
  auto it = reply.find("vectors");
  if (it == reply.end() || !it->is_array())
    throw ProtocolError(spec.endpoint + ": missing 'vectors'");
  std::vector<std::vector<float>> out;
  try {
    out = it->get<std::vector<std::vector<float>>>();
  } catch (const json::exception& e) {
    throw ProtocolError(spec.endpoint + ": bad 'vectors': " + e.what());
  }
  if (out.size() != texts.size())
    throw ProtocolError(spec.endpoint + ": expected " +
                        std::to_string(texts.size()) + " vectors, got " +
                        std::to_string(out.size()));
  for (const auto& v : out)
    if (v.size() != out.front().size() || v.empty())
      throw ProtocolError(spec.endpoint + ": inconsistent vector dimensions");
  return out;
}

}  // namespace odmds
