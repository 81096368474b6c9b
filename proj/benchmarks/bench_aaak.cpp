#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "palace/dialect.hpp"
#include "palace/eval.hpp"
#include "palace/miner.hpp"

namespace {

// Exchange corpus from the standard synthetic fixture; the mean compression
// ratio is reported as a counter, measured, never asserted.
std::vector<std::string> fixture_corpus() {
    auto fixture = palace::generate_fixture(50, 200, 7);
    std::vector<std::string> texts;
    for (const auto& s : fixture.sessions) {
        for (const auto& e : s.exchanges) texts.push_back(palace::exchange_content(e));
    }
    return texts;
}

void BM_AaakCompress(benchmark::State& state) {
    auto corpus = fixture_corpus();
    size_t i = 0;
    double ratio_sum = 0.0;
    size_t ratio_count = 0;
    for (auto _ : state) {
        const auto& text = corpus[i++ % corpus.size()];
        auto rec = palace::compress(text);
        benchmark::DoNotOptimize(rec);
        ratio_sum += palace::compression_ratio(text, rec);
        ratio_count++;
    }
    state.counters["mean_compression_ratio"] =
        ratio_count ? ratio_sum / static_cast<double>(ratio_count) : 0.0;
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}

void BM_AaakSerializeParse(benchmark::State& state) {
    auto rec = palace::compress(
        "The billing rollout shipped to staging. We decided to keep three replicas. "
        "Follow-up is pending on the gateway timeout.");
    for (auto _ : state) {
        auto line = palace::serialize_aaak(rec);
        auto back = palace::parse_aaak(line);
        benchmark::DoNotOptimize(back);
    }
}

}  // namespace

BENCHMARK(BM_AaakCompress);
BENCHMARK(BM_AaakSerializeParse);
BENCHMARK_MAIN();
