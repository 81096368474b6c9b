#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "palace/embedder.hpp"
#include "palace/error.hpp"

using namespace palace;

namespace {

std::string random_words(std::mt19937_64& rng, size_t n_words) {
    std::string s;
    for (size_t w = 0; w < n_words; w++) {
        if (w) s += " ";
        size_t len = 4 + rng() % 5;
        for (size_t i = 0; i < len; i++) s += static_cast<char>('a' + rng() % 26);
    }
    return s;
}

double cos_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
    return 1.0 - cosine_distance(a, b);
}

}  // namespace

TEST_CASE("builtin embedder determinism and normalization") {
    BuiltinHashEmbedder provider(384);
    auto v1 = embed_text(provider, "the deploy key lives in vault");
    auto v2 = embed_text(provider, "the deploy key lives in vault");
    CHECK(v1 == v2);  // bitwise
    CHECK(std::abs(vector_norm(v1) - 1.0) <= 1e-6);

    SUBCASE("norm holds for varied inputs") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 50; i++) {
            auto v = embed_text(provider, random_words(rng, 1 + rng() % 30));
            CHECK(std::abs(vector_norm(v) - 1.0) <= 1e-6);
        }
    }
    SUBCASE("empty text rejected") { CHECK_THROWS_AS(embed_text(provider, ""), Error); }
    SUBCASE("punctuation-only input still embeds to unit norm") {
        auto v = embed_text(provider, "!!! ???");
        CHECK(std::abs(vector_norm(v) - 1.0) <= 1e-6);
    }
}

TEST_CASE("bag-of-features: word order does not matter") {
    CHECK(builtin_hash_embed("alpha beta", 384) == builtin_hash_embed("beta alpha", 384));
    CHECK(builtin_hash_embed("one two three four", 128) ==
          builtin_hash_embed("four three two one", 128));
}

TEST_CASE("lexical similarity ordering") {
    BuiltinHashEmbedder provider(384);
    auto config = embed_text(provider, "payment gateway config");
    auto settings = embed_text(provider, "payment gateway settings");
    auto chess = embed_text(provider, "chess opening theory");
    CHECK(cos_sim(config, settings) > cos_sim(config, chess));
}

TEST_CASE("unrelated random strings are near-orthogonal at dim 384") {
    std::mt19937_64 rng(99);
    BuiltinHashEmbedder provider(384);
    int below = 0;
    const int trials = 200;
    double total = 0.0;
    for (int i = 0; i < trials; i++) {
        auto a = embed_text(provider, random_words(rng, 8));
        auto b = embed_text(provider, random_words(rng, 8));
        double c = std::abs(cos_sim(a, b));
        total += c;
        if (c < 0.3) below++;
    }
    CHECK(below >= trials * 95 / 100);
    CHECK(total / trials < 0.1);
}

TEST_CASE("cosine distance") {
    EmbeddingVector e1{1.0f, 0.0f, 0.0f};
    EmbeddingVector e2{0.0f, 1.0f, 0.0f};
    EmbeddingVector neg{-1.0f, 0.0f, 0.0f};
    CHECK(cosine_distance(e1, e1) == doctest::Approx(0.0));
    CHECK(cosine_distance(e1, e2) == doctest::Approx(1.0));
    CHECK(cosine_distance(e1, neg) == doctest::Approx(2.0));
    CHECK_THROWS_AS(cosine_distance(e1, EmbeddingVector{1.0f, 2.0f}), Error);
    CHECK_THROWS_AS(cosine_distance(e1, EmbeddingVector{0.0f, 0.0f, 0.0f}), Error);
}

TEST_CASE("l2 distance") {
    EmbeddingVector e1{1.0f, 0.0f};
    EmbeddingVector e2{0.0f, 1.0f};
    CHECK(l2_distance(e1, e1) == doctest::Approx(0.0));
    CHECK(l2_distance(e1, e2) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(l2_distance(e1, EmbeddingVector{1.0f}), Error);

    SUBCASE("unit vectors: l2^2 == 2 * cosine") {
        std::mt19937_64 rng(3);
        BuiltinHashEmbedder provider(64);
        for (int i = 0; i < 30; i++) {
            auto a = embed_text(provider, random_words(rng, 5));
            auto b = embed_text(provider, random_words(rng, 5));
            double l2 = l2_distance(a, b);
            CHECK(l2 * l2 == doctest::Approx(2.0 * cosine_distance(a, b)).epsilon(1e-6));
        }
    }
}

TEST_CASE("metric-ranking equivalence for unit vectors") {
    // Sorting any candidate set by cosine and by l2 gives the same order,
    // ties included. Exercised on vectors whose unit norm is exact in float
    // arithmetic (four components of +/-0.5), where the claim is literally
    // true rather than true up to rounding noise.
    std::mt19937_64 rng(17);
    const size_t dim = 96;
    auto exact_unit = [&] {
        EmbeddingVector v(dim, 0.0f);
        std::set<size_t> picked;
        while (picked.size() < 4) picked.insert(rng() % dim);
        for (size_t i : picked) v[i] = (rng() % 2) ? 0.5f : -0.5f;
        return v;
    };
    for (int trial = 0; trial < 50; trial++) {
        auto q = exact_unit();
        std::vector<EmbeddingVector> candidates;
        for (int i = 0; i < 60; i++) candidates.push_back(exact_unit());

        auto order_by = [&](auto dist_fn) {
            std::vector<size_t> idx(candidates.size());
            for (size_t i = 0; i < idx.size(); i++) idx[i] = i;
            std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
                return dist_fn(q, candidates[a]) < dist_fn(q, candidates[b]);
            });
            return idx;
        };
        auto by_cos = order_by([](const auto& a, const auto& b) { return cosine_distance(a, b); });
        auto by_l2 = order_by([](const auto& a, const auto& b) { return l2_distance(a, b); });
        CHECK(by_cos == by_l2);
    }
}

TEST_CASE("http embedding provider") {
    httplib::Server server;
    server.Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        nlohmann::json reply;
        reply["vectors"] = nlohmann::json::array();
        for (const auto& text : body["texts"]) {
            // toy deterministic vector keyed on text length
            std::vector<float> v(8, 0.0f);
            v[text.get<std::string>().size() % 8] = 1.0f;
            reply["vectors"].push_back(v);
        }
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpEmbeddingProvider provider("http://127.0.0.1:" + std::to_string(port), 8);
    auto v = embed_text(provider, "abc");
    CHECK(v.size() == 8);
    CHECK(std::abs(vector_norm(v) - 1.0) <= 1e-6);

    SUBCASE("dimension mismatch is an embedding error") {
        HttpEmbeddingProvider wrong("http://127.0.0.1:" + std::to_string(port), 16);
        CHECK_THROWS_AS(embed_text(wrong, "abc"), Error);
    }

    server.stop();
    t.join();
}
