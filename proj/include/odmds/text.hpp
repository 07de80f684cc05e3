#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace odmds::text {

// Identifier recorded in persisted indices so a reader can tell which
// tokenization produced the statistics.
inline constexpr std::string_view kTokenizerId = "unicode-lower-alnum/v1";

// Index tokenizer: UTF-8 decode, lowercase (Latin, Greek, Cyrillic), split on
// runs of non-alphanumeric code points, drop empty tokens.
std::vector<std::string> tokenize(std::string_view utf8);

// Splits on ASCII whitespace. Views point into `s`.
std::vector<std::string_view> whitespace_tokens(std::string_view s);

std::string_view trim(std::string_view s);

// Sentence split on '.', '!' or '?' followed by whitespace or end of text.
// Terminators stay with their sentence; sentences are trimmed and empty ones
// are dropped. Text without a terminator is a single sentence.
std::vector<std::string> split_sentences(std::string_view s);

std::string first_sentence(std::string_view s);

std::string first_line(std::string_view s);

// Keeps the first `max_tokens` whitespace tokens, preserving the original
// spacing between them. Text already within budget is returned unchanged.
std::string truncate_tokens(std::string_view s, std::size_t max_tokens);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace odmds::text
