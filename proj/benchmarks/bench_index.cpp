#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "palace/vector_index.hpp"

namespace {

using palace::EmbeddingVector;

EmbeddingVector random_unit(std::mt19937_64& rng, size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    EmbeddingVector v(dim);
    double ns = 0.0;
    for (size_t i = 0; i < dim; i++) {
        double x = normal(rng);
        v[i] = static_cast<float>(x);
        ns += x * x;
    }
    double n = std::sqrt(ns);
    for (auto& x : v) x = static_cast<float>(x / n);
    return v;
}

palace::VectorIndex build_index(size_t n, size_t dim) {
    std::mt19937_64 rng(42);
    palace::VectorIndex index(dim, palace::DistanceMetric::cosine);
    for (size_t i = 0; i < n; i++) {
        index.insert({"d" + std::to_string(i), random_unit(rng, dim), {{"wing", "w"}, {"room", "r"}}});
    }
    return index;
}

void BM_HnswInsert(benchmark::State& state) {
    size_t dim = 384;
    std::mt19937_64 rng(7);
    for (auto _ : state) {
        state.PauseTiming();
        palace::VectorIndex index(dim, palace::DistanceMetric::cosine);
        std::vector<EmbeddingVector> vecs;
        size_t n = static_cast<size_t>(state.range(0));
        for (size_t i = 0; i < n; i++) vecs.push_back(random_unit(rng, dim));
        state.ResumeTiming();
        for (size_t i = 0; i < n; i++) {
            index.insert({"d" + std::to_string(i), vecs[i], {{"wing", "w"}, {"room", "r"}}});
        }
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_HnswQuery(benchmark::State& state) {
    size_t dim = 384;
    auto index = build_index(static_cast<size_t>(state.range(0)), dim);
    std::mt19937_64 rng(9);
    for (auto _ : state) {
        auto hits = index.query_hnsw(random_unit(rng, dim), 10);
        benchmark::DoNotOptimize(hits);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}

void BM_ExactQuery(benchmark::State& state) {
    size_t dim = 384;
    auto index = build_index(static_cast<size_t>(state.range(0)), dim);
    std::mt19937_64 rng(9);
    for (auto _ : state) {
        auto hits = index.query_exact(random_unit(rng, dim), 10);
        benchmark::DoNotOptimize(hits);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}

}  // namespace

BENCHMARK(BM_HnswInsert)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HnswQuery)->Arg(1000)->Arg(10000);
BENCHMARK(BM_ExactQuery)->Arg(1000)->Arg(10000);
BENCHMARK_MAIN();
