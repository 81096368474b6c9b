#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace palace::util {

// Lowercase hex MD5 digest of the raw bytes.
std::string md5_hex(std::string_view bytes);

// Current time as ISO-8601 UTC ("2026-04-19T12:00:00Z").
std::string iso8601_now();

// Unix seconds -> ISO-8601 UTC.
std::string iso8601_from_time(int64_t unix_seconds);

// Byte offsets of each Unicode scalar value boundary, plus a final entry
// equal to text.size(). Invalid UTF-8 bytes are treated as single scalars.
std::vector<size_t> utf8_boundaries(std::string_view text);

// Number of Unicode scalar values in text.
size_t utf8_length(std::string_view text);

// Substring addressed in scalar values: [from, to).
std::string utf8_substr(std::string_view text, size_t from_scalar, size_t to_scalar);

// ASCII lowercase copy.
std::string to_lower(std::string_view s);

// Lowercase word tokens: maximal runs of [a-z0-9_] plus bytes >= 0x80.
// Everything else separates tokens.
std::vector<std::string> tokenize_words(std::string_view text);

// True iff s is non-empty and every char is in [a-z0-9_].
bool is_identifier(std::string_view s);

// Force s into identifier form: lowercase, non-identifier chars -> '_',
// empty result -> fallback.
std::string sanitize_identifier(std::string_view s, std::string_view fallback);

// 64-bit FNV-1a over bytes, folded with seed.
uint64_t fnv1a64(std::string_view bytes, uint64_t seed);

// splitmix64 finalizer; used to derive independent hash streams.
uint64_t splitmix64(uint64_t x);

}  // namespace palace::util
