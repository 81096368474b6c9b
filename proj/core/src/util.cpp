#include "palace/util.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace palace::util {

std::string md5_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("md5: EVP_MD_CTX_new failed");
    bool ok = EVP_DigestInit_ex(ctx, EVP_md5(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
              EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("md5: digest failed");

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; i++) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string iso8601_from_time(int64_t unix_seconds) {
    std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string iso8601_now() {
    return iso8601_from_time(static_cast<int64_t>(std::time(nullptr)));
}

std::vector<size_t> utf8_boundaries(std::string_view text) {
    std::vector<size_t> bounds;
    bounds.reserve(text.size() + 1);
    size_t i = 0;
    while (i < text.size()) {
        bounds.push_back(i);
        unsigned char c = static_cast<unsigned char>(text[i]);
        size_t adv = 1;
        if (c >= 0xF0) adv = 4;
        else if (c >= 0xE0) adv = 3;
        else if (c >= 0xC0) adv = 2;
        // Clamp truncated sequences at end of text.
        if (i + adv > text.size()) adv = 1;
        i += adv;
    }
    bounds.push_back(text.size());
    return bounds;
}

size_t utf8_length(std::string_view text) {
    return utf8_boundaries(text).size() - 1;
}

std::string utf8_substr(std::string_view text, size_t from_scalar, size_t to_scalar) {
    auto bounds = utf8_boundaries(text);
    size_t n = bounds.size() - 1;
    if (from_scalar > n) from_scalar = n;
    if (to_scalar > n) to_scalar = n;
    if (from_scalar >= to_scalar) return {};
    return std::string(text.substr(bounds[from_scalar], bounds[to_scalar] - bounds[from_scalar]));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

namespace {
inline bool word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}
}  // namespace

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> tokens;
    size_t i = 0;
    while (i < text.size()) {
        if (!word_byte(static_cast<unsigned char>(text[i]))) {
            i++;
            continue;
        }
        size_t j = i;
        while (j < text.size() && word_byte(static_cast<unsigned char>(text[j]))) j++;
        tokens.push_back(to_lower(text.substr(i, j - i)));
        i = j;
    }
    return tokens;
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

std::string sanitize_identifier(std::string_view s, std::string_view fallback) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        out.push_back(ok ? c : '_');
    }
    bool all_underscore = true;
    for (char c : out) {
        if (c != '_') { all_underscore = false; break; }
    }
    if (out.empty() || all_underscore) return std::string(fallback);
    return out;
}

uint64_t fnv1a64(std::string_view bytes, uint64_t seed) {
    uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace palace::util
