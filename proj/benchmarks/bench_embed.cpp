#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "palace/embedder.hpp"

namespace {

std::vector<std::string> sample_texts(size_t count, size_t words) {
    std::mt19937_64 rng(1);
    static const std::vector<std::string> bank = {
        "deploy", "gateway", "invoice", "cluster", "rollout", "billing", "metric",
        "replica", "session", "pipeline", "storage", "review", "incident", "cache"};
    std::vector<std::string> texts;
    for (size_t i = 0; i < count; i++) {
        std::string t;
        for (size_t w = 0; w < words; w++) {
            if (w) t += " ";
            t += bank[rng() % bank.size()];
        }
        texts.push_back(std::move(t));
    }
    return texts;
}

void BM_HashEmbed(benchmark::State& state) {
    auto texts = sample_texts(256, static_cast<size_t>(state.range(0)));
    palace::BuiltinHashEmbedder provider(384);
    size_t i = 0;
    for (auto _ : state) {
        auto v = palace::embed_text(provider, texts[i++ % texts.size()]);
        benchmark::DoNotOptimize(v);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}

void BM_CosineDistance(benchmark::State& state) {
    palace::BuiltinHashEmbedder provider(384);
    auto a = palace::embed_text(provider, "payment gateway configuration rollout");
    auto b = palace::embed_text(provider, "billing invoice reconciliation draft");
    for (auto _ : state) {
        benchmark::DoNotOptimize(palace::cosine_distance(a, b));
    }
}

}  // namespace

BENCHMARK(BM_HashEmbed)->Arg(8)->Arg(64)->Arg(256);
BENCHMARK(BM_CosineDistance);
BENCHMARK_MAIN();
