#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "palace/eval.hpp"
#include "palace/palace.hpp"

namespace {

namespace fs = std::filesystem;

struct BenchPalace {
    fs::path dir;
    std::optional<palace::Palace> palace;

    BenchPalace() {
        dir = fs::temp_directory_path() / "palace_bench_search";
        fs::remove_all(dir);
        palace::Palace::init(dir.string());
        palace.emplace(palace::Palace::open(dir.string()));
        auto fixture = palace::generate_fixture(50, 200, 7);
        palace::ingest_fixture(fixture, *palace, palace::EvalCondition::verbatim);
    }
    ~BenchPalace() {
        palace.reset();
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
};

void BM_HybridSearch(benchmark::State& state) {
    static BenchPalace bp;  // 750 drawers
    std::mt19937_64 rng(3);
    static const std::vector<std::string> queries = {
        "rollout gateway replicas",
        "invoice billing review",
        "cluster deploy staging",
        "incident metric alert",
    };
    for (auto _ : state) {
        palace::SearchRequest req;
        req.query = queries[rng() % queries.size()];
        req.mode = palace::SearchMode::hybrid;
        auto results = bp.palace->search_memories(req);
        benchmark::DoNotOptimize(results);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}

void BM_KeywordSearch(benchmark::State& state) {
    static BenchPalace bp;
    for (auto _ : state) {
        palace::SearchRequest req;
        req.query = "rollout gateway replicas";
        req.mode = palace::SearchMode::keyword;
        auto results = bp.palace->search_memories(req);
        benchmark::DoNotOptimize(results);
    }
}

}  // namespace

BENCHMARK(BM_HybridSearch)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KeywordSearch)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
