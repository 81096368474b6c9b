#include "doctest.h"

#include <cmath>
#include <random>

#include "palace/error.hpp"
#include "palace/vector_index.hpp"

#include "testutil.hpp"

using namespace palace;

namespace {

EmbeddingVector random_unit(std::mt19937_64& rng, size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    EmbeddingVector v(dim);
    double norm_sq = 0.0;
    for (size_t i = 0; i < dim; i++) {
        double x = normal(rng);
        v[i] = static_cast<float>(x);
        norm_sq += x * x;
    }
    double norm = std::sqrt(norm_sq);
    for (auto& x : v) x = static_cast<float>(x / norm);
    return v;
}

IndexedDrawer item(const std::string& id, EmbeddingVector v, const std::string& wing = "w",
                   const std::string& room = "r") {
    return {id, std::move(v), {{"wing", wing}, {"room", room}}};
}

}  // namespace

TEST_CASE("insert and self-retrieval") {
    std::mt19937_64 rng(1);
    VectorIndex index(16, DistanceMetric::cosine);
    auto v = random_unit(rng, 16);
    index.insert(item("drawer_a", v));

    auto hits = index.query_hnsw(v, 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].drawer_id == "drawer_a");
    CHECK(hits[0].distance == doctest::Approx(0.0).epsilon(1e-9));

    SUBCASE("re-insert of same id is a no-op") {
        index.insert(item("drawer_a", random_unit(rng, 16)));
        CHECK(index.size() == 1);
        auto again = index.query_hnsw(v, 1);
        CHECK(again[0].distance == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("dimension mismatch rejected") {
        CHECK_THROWS_AS(index.insert(item("drawer_b", random_unit(rng, 8))), Error);
    }
}

TEST_CASE("bulk insert count") {
    std::mt19937_64 rng(2);
    VectorIndex index(32, DistanceMetric::cosine);
    for (int i = 0; i < 1000; i++) {
        index.insert(item("d" + std::to_string(i), random_unit(rng, 32)));
    }
    CHECK(index.size() == 1000);
}

TEST_CASE("query_exact") {
    VectorIndex index(2, DistanceMetric::l2);
    index.insert(item("near", {1.0f, 0.0f}));
    index.insert(item("mid", {0.0f, 1.0f}));
    index.insert(item("far", {-1.0f, 0.0f}));

    SUBCASE("empty index yields empty list") {
        VectorIndex empty(2, DistanceMetric::l2);
        CHECK(empty.query_exact(EmbeddingVector{1.0f, 0.0f}, 3).empty());
    }
    SUBCASE("orders ascending and truncates at k") {
        auto hits = index.query_exact(EmbeddingVector{1.0f, 0.0f}, 2);
        REQUIRE(hits.size() == 2);
        CHECK(hits[0].drawer_id == "near");
        CHECK(hits[1].drawer_id == "mid");
        CHECK(hits[0].distance <= hits[1].distance);
    }
    SUBCASE("filter restricts results") {
        VectorIndex scoped(2, DistanceMetric::l2);
        scoped.insert(item("a", {1.0f, 0.0f}, "dev"));
        scoped.insert(item("b", {0.9f, 0.1f}, "docs"));
        WhereFilter f;
        f.wing = "dev";
        auto hits = scoped.query_exact(EmbeddingVector{1.0f, 0.0f}, 5, f);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].drawer_id == "a");
    }
    SUBCASE("distance ties break by lexicographic id") {
        VectorIndex ties(2, DistanceMetric::l2);
        ties.insert(item("zz", {0.0f, 1.0f}));
        ties.insert(item("aa", {0.0f, 1.0f}));
        auto hits = ties.query_exact(EmbeddingVector{1.0f, 0.0f}, 2);
        CHECK(hits[0].drawer_id == "aa");
        CHECK(hits[1].drawer_id == "zz");
    }
}

TEST_CASE("hnsw recall against the exact oracle") {
    // Smaller sibling of the acceptance run: 2k vectors, 50 queries.
    const size_t dim = 64, n = 2000, k = 10;
    std::mt19937_64 rng(42);
    VectorIndex index(dim, DistanceMetric::cosine);
    for (size_t i = 0; i < n; i++) {
        index.insert(item("d" + std::to_string(i), random_unit(rng, dim)));
    }
    double overlap_total = 0.0;
    for (int q = 0; q < 50; q++) {
        auto query = random_unit(rng, dim);
        auto approx = index.query_hnsw(query, k);
        auto exact = index.query_exact(query, k);
        REQUIRE(exact.size() == k);
        size_t overlap = 0;
        for (const auto& a : approx) {
            for (const auto& e : exact) {
                if (a.drawer_id == e.drawer_id) overlap++;
            }
        }
        overlap_total += static_cast<double>(overlap) / static_cast<double>(k);
    }
    CHECK(overlap_total / 50.0 >= 0.95);
}

TEST_CASE("hnsw is deterministic for a fixed seed and insertion order") {
    const size_t dim = 32;
    auto build = [&] {
        std::mt19937_64 rng(7);
        VectorIndex index(dim, DistanceMetric::cosine, HnswParams{16, 200, 100, 42});
        for (int i = 0; i < 500; i++) {
            index.insert(item("d" + std::to_string(i), random_unit(rng, dim)));
        }
        return index;
    };
    VectorIndex a = build();
    VectorIndex b = build();
    std::mt19937_64 rng(8);
    for (int q = 0; q < 20; q++) {
        auto query = random_unit(rng, dim);
        auto ha = a.query_hnsw(query, 10);
        auto hb = b.query_hnsw(query, 10);
        REQUIRE(ha.size() == hb.size());
        for (size_t i = 0; i < ha.size(); i++) {
            CHECK(ha[i].drawer_id == hb[i].drawer_id);
            CHECK(ha[i].distance == hb[i].distance);
        }
    }
}

TEST_CASE("filtered hnsw returns only matching items") {
    std::mt19937_64 rng(11);
    VectorIndex index(32, DistanceMetric::cosine);
    const std::vector<std::string> wings = {"alpha", "beta", "gamma"};
    for (int i = 0; i < 600; i++) {
        index.insert(item("d" + std::to_string(i), random_unit(rng, 32), wings[i % 3]));
    }
    for (int q = 0; q < 30; q++) {
        WhereFilter f;
        f.wing = wings[q % 3];
        auto hits = index.query_hnsw(random_unit(rng, 32), 10, f);
        CHECK(!hits.empty());
        for (const auto& h : hits) {
            auto meta = index.metadata(h.drawer_id);
            REQUIRE(meta.has_value());
            CHECK(meta->at("wing") == *f.wing);
        }
    }
    SUBCASE("filter matching nothing yields empty") {
        WhereFilter f;
        f.wing = "nonexistent";
        CHECK(index.query_hnsw(random_unit(rng, 32), 10, f).empty());
    }
}

TEST_CASE("single-item index agrees with exact search") {
    std::mt19937_64 rng(3);
    VectorIndex index(16, DistanceMetric::cosine);
    index.insert(item("only", random_unit(rng, 16)));
    auto q = random_unit(rng, 16);
    auto approx = index.query_hnsw(q, 5);
    auto exact = index.query_exact(q, 5);
    REQUIRE(approx.size() == 1);
    CHECK(approx[0].drawer_id == exact[0].drawer_id);
    CHECK(approx[0].distance == doctest::Approx(exact[0].distance));
}

TEST_CASE("delete semantics") {
    std::mt19937_64 rng(4);
    VectorIndex index(16, DistanceMetric::cosine);
    auto v = random_unit(rng, 16);
    index.insert(item("gone", v));
    index.insert(item("kept", random_unit(rng, 16)));

    CHECK_FALSE(index.remove("absent"));
    CHECK(index.remove("gone"));
    CHECK(index.size() == 1);

    auto hits = index.query_hnsw(v, 5);
    for (const auto& h : hits) CHECK(h.drawer_id != "gone");
    for (const auto& h : index.query_exact(v, 5)) CHECK(h.drawer_id != "gone");

    SUBCASE("delete then re-insert makes it retrievable again") {
        index.insert(item("gone", v));
        auto again = index.query_hnsw(v, 1);
        REQUIRE(again.size() == 1);
        CHECK(again[0].drawer_id == "gone");
    }
}

TEST_CASE("heavy deletion triggers rebuild and keeps results sound") {
    std::mt19937_64 rng(5);
    VectorIndex index(16, DistanceMetric::cosine);
    std::vector<EmbeddingVector> vecs;
    for (int i = 0; i < 200; i++) {
        vecs.push_back(random_unit(rng, 16));
        index.insert(item("d" + std::to_string(i), vecs.back()));
    }
    for (int i = 0; i < 150; i++) index.remove("d" + std::to_string(i));
    CHECK(index.size() == 50);
    // everything still retrievable after the tombstone-threshold rebuilds
    for (int i = 150; i < 200; i++) {
        auto hits = index.query_hnsw(vecs[static_cast<size_t>(i)], 1);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].drawer_id == "d" + std::to_string(i));
    }
}

TEST_CASE("exact search ranking is metric-independent for unit vectors") {
    std::mt19937_64 rng(6);
    VectorIndex cos_index(48, DistanceMetric::cosine);
    VectorIndex l2_index(48, DistanceMetric::l2);
    for (int i = 0; i < 300; i++) {
        auto v = random_unit(rng, 48);
        cos_index.insert(item("d" + std::to_string(i), v));
        l2_index.insert(item("d" + std::to_string(i), v));
    }
    for (int q = 0; q < 25; q++) {
        auto query = random_unit(rng, 48);
        auto a = cos_index.query_exact(query, 300);
        auto b = l2_index.query_exact(query, 300);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); i++) CHECK(a[i].drawer_id == b[i].drawer_id);
    }
}

TEST_CASE("persistence: snapshot plus log replay") {
    TempDir dir;
    std::mt19937_64 rng(9);
    std::vector<EmbeddingVector> vecs;
    for (int i = 0; i < 50; i++) vecs.push_back(random_unit(rng, 24));

    {
        VectorIndex index = VectorIndex::open(dir.sub("index"), 24, DistanceMetric::cosine);
        for (int i = 0; i < 30; i++) index.insert(item("d" + std::to_string(i), vecs[i]));
        index.save_snapshot();
        // post-snapshot mutations land in the log only
        for (int i = 30; i < 50; i++) index.insert(item("d" + std::to_string(i), vecs[i]));
        index.remove("d0");
    }

    VectorIndex reopened = VectorIndex::open(dir.sub("index"), 24, DistanceMetric::cosine);
    CHECK(reopened.size() == 49);
    CHECK_FALSE(reopened.contains("d0"));
    for (int i = 1; i < 50; i++) {
        auto hits = reopened.query_hnsw(vecs[i], 1);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].drawer_id == "d" + std::to_string(i));
    }

    SUBCASE("dimension mismatch on open is a config error") {
        CHECK_THROWS_AS(VectorIndex::open(dir.sub("index"), 16, DistanceMetric::cosine), Error);
    }
}

TEST_CASE("metadata updates persist") {
    TempDir dir;
    std::mt19937_64 rng(10);
    {
        VectorIndex index = VectorIndex::open(dir.sub("index"), 8, DistanceMetric::cosine);
        index.insert(item("d1", random_unit(rng, 8), "old_wing"));
        index.update_metadata("d1", {{"wing", "new_wing"}, {"room", "r"}});
    }
    VectorIndex reopened = VectorIndex::open(dir.sub("index"), 8, DistanceMetric::cosine);
    auto meta = reopened.metadata("d1");
    REQUIRE(meta.has_value());
    CHECK(meta->at("wing") == "new_wing");
}
