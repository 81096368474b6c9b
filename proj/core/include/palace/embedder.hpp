#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace palace {

// Fixed-dimension real vector. Everything leaving embed_text is
// unit-normalized, which makes cosine and L2 rankings equivalent by
// construction.
using EmbeddingVector = std::vector<float>;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string name() const = 0;
    virtual size_t dim() const = 0;
    virtual bool deterministic() const = 0;
    // Raw provider output; may be unnormalized. embed_text validates and
    // normalizes.
    virtual EmbeddingVector embed_raw(const std::string& text) = 0;
};

// Deterministic offline embedder: lowercase word unigrams plus per-word
// byte trigrams, feature-hashed into [0, dim) with a signed hash and a
// fixed 64-bit seed, then L2-normalized. A pure function of (text, dim),
// bit-identical across runs and platforms.
class BuiltinHashEmbedder final : public EmbeddingProvider {
public:
    explicit BuiltinHashEmbedder(size_t dim) : dim_(dim) {}
    std::string name() const override { return "builtin-hash"; }
    size_t dim() const override { return dim_; }
    bool deterministic() const override { return true; }
    EmbeddingVector embed_raw(const std::string& text) override;

private:
    size_t dim_;
};

// Client for an external embedding service:
//   POST <base_url>/embed  {"texts": [...]} -> {"vectors": [[...]]}
// Vector dimension is validated against `dim` on every call.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::string base_url, size_t dim);
    std::string name() const override { return "http:" + base_url_; }
    size_t dim() const override { return dim_; }
    bool deterministic() const override { return false; }
    EmbeddingVector embed_raw(const std::string& text) override;

private:
    std::string base_url_;
    size_t dim_;
};

// Pure-function form of the built-in embedder.
EmbeddingVector builtin_hash_embed(const std::string& text, size_t dim);

// Embeds non-empty text through the provider and returns a unit-normalized
// vector of provider.dim() with all components finite. Throws
// Error(invalid_input) on empty text, Error(embedding) on provider failure.
EmbeddingVector embed_text(EmbeddingProvider& provider, const std::string& text);

// Euclidean norm.
double vector_norm(std::span<const float> v);

// 1 - a.b / (|a||b|), in [0, 2]. Throws on dimension mismatch or a zero
// vector.
double cosine_distance(std::span<const float> a, std::span<const float> b);

// Euclidean distance. Throws on dimension mismatch.
double l2_distance(std::span<const float> a, std::span<const float> b);

}  // namespace palace
