#include "palace/embedder.hpp"

#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "palace/error.hpp"
#include "palace/util.hpp"

namespace palace {

namespace {

// Fixed seed; changing it would silently re-map every stored vector.
constexpr uint64_t kEmbedSeed = 0x70616c616365ULL;  // "palace"

void accumulate_token(std::string_view token, size_t dim, std::vector<double>& acc) {
    uint64_t h = util::fnv1a64(token, kEmbedSeed);
    size_t bucket = static_cast<size_t>(h % dim);
    double sign = (util::splitmix64(h) & 1) ? 1.0 : -1.0;
    acc[bucket] += sign;
}

}  // namespace

EmbeddingVector builtin_hash_embed(const std::string& text, size_t dim) {
    if (dim == 0) raise(ErrorKind::invalid_input, "embedding dim must be positive");

    // Accumulate in double: +/-1 sums stay exact integers, so the result is
    // independent of token order.
    std::vector<double> acc(dim, 0.0);
    auto words = util::tokenize_words(text);
    for (const auto& w : words) {
        accumulate_token("w:" + w, dim, acc);
        if (w.size() >= 3) {
            for (size_t i = 0; i + 3 <= w.size(); i++) {
                accumulate_token("t:" + w.substr(i, 3), dim, acc);
            }
        }
    }
    if (words.empty()) {
        // No word tokens (punctuation-only input): hash the raw bytes so the
        // unit-norm contract still holds.
        accumulate_token("r:" + text, dim, acc);
    }

    double norm_sq = 0.0;
    for (double v : acc) norm_sq += v * v;
    double norm = std::sqrt(norm_sq);

    EmbeddingVector out(dim);
    for (size_t i = 0; i < dim; i++) {
        out[i] = static_cast<float>(acc[i] / norm);
    }
    return out;
}

EmbeddingVector BuiltinHashEmbedder::embed_raw(const std::string& text) {
    return builtin_hash_embed(text, dim_);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, size_t dim)
    : base_url_(std::move(base_url)), dim_(dim) {}

EmbeddingVector HttpEmbeddingProvider::embed_raw(const std::string& text) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);

    nlohmann::json body;
    body["texts"] = {text};
    auto res = client.Post("/embed", body.dump(), "application/json");
    if (!res || res->status != 200) {
        raise(ErrorKind::embedding,
              "embedding provider " + base_url_ + " failed" +
                  (res ? " with status " + std::to_string(res->status) : " (no response)"));
    }
    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::embedding, std::string("embedding provider returned bad JSON: ") + e.what());
    }
    if (!reply.contains("vectors") || !reply["vectors"].is_array() || reply["vectors"].empty()) {
        raise(ErrorKind::embedding, "embedding provider reply missing 'vectors'");
    }
    const auto& vec = reply["vectors"][0];
    if (!vec.is_array() || vec.size() != dim_) {
        raise(ErrorKind::embedding,
              "embedding provider returned dimension " + std::to_string(vec.size()) +
                  ", expected " + std::to_string(dim_));
    }
    EmbeddingVector out;
    out.reserve(dim_);
    for (const auto& v : vec) out.push_back(v.get<float>());
    return out;
}

EmbeddingVector embed_text(EmbeddingProvider& provider, const std::string& text) {
    if (text.empty()) raise(ErrorKind::invalid_input, "embed_text: text must be non-empty");

    EmbeddingVector v = provider.embed_raw(text);
    if (v.size() != provider.dim()) {
        raise(ErrorKind::embedding, "provider returned wrong dimension");
    }
    double norm = vector_norm(v);
    if (!std::isfinite(norm) || norm == 0.0) {
        raise(ErrorKind::embedding, "provider returned a zero or non-finite vector");
    }
    // Normalize in double, snapping already-unit vectors only if needed.
    double err = std::abs(norm - 1.0);
    if (err > 1e-9) {
        for (float& x : v) x = static_cast<float>(static_cast<double>(x) / norm);
    }
    for (float x : v) {
        if (!std::isfinite(x)) raise(ErrorKind::embedding, "non-finite component in embedding");
    }
    return v;
}

double vector_norm(std::span<const float> v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(s);
}

double cosine_distance(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        raise(ErrorKind::invalid_input, "cosine_distance: dimension mismatch");
    }
    double dot = 0.0;
    for (size_t i = 0; i < a.size(); i++) {
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    double na = vector_norm(a);
    double nb = vector_norm(b);
    if (na == 0.0 || nb == 0.0) {
        raise(ErrorKind::invalid_input, "cosine_distance: zero vector");
    }
    return 1.0 - dot / (na * nb);
}

double l2_distance(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        raise(ErrorKind::invalid_input, "l2_distance: dimension mismatch");
    }
    double s = 0.0;
    for (size_t i = 0; i < a.size(); i++) {
        double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace palace
