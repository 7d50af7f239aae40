#include "structmem/clock.hpp"
#include "structmem/mock_provider.hpp"
#include "structmem/similarity.hpp"
#include "structmem/store.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

using namespace structmem;

namespace {

std::vector<float> random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
        x = normal(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    std::vector<float> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] / norm);
    return out;
}

MemoryStore build_store(std::size_t size, std::size_t dim, std::mt19937_64& rng) {
    MemoryStore store(dim, "bench");
    std::vector<MemoryEntry> batch;
    batch.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        MemoryEntry e;
        e.id = "e" + std::to_string(i);
        e.text = "entry " + std::to_string(i);
        e.kind = (i % 11 == 0) ? EntryKind::synthesis : EntryKind::factual;
        e.timestamp = Timestamp::from_epoch_seconds(1'600'000'000 + (i % 100) * 60);
        e.conversation_id = "bench";
        e.embedding = random_unit(rng, dim);
        batch.push_back(std::move(e));
    }
    store.add_entries(std::move(batch));
    return store;
}

}  // namespace

static void BM_CosineSimilarity(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto a = random_unit(rng, dim);
    const auto b = random_unit(rng, dim);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cosine_similarity(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CosineSimilarity)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_TopKSimilar(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const auto size = static_cast<std::size_t>(state.range(0));
    const std::size_t dim = 64;
    const auto store = build_store(size, dim, rng);
    const auto query = random_unit(rng, dim);
    for (auto _ : state) {
        benchmark::DoNotOptimize(store.top_k_similar(query, 60));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TopKSimilar)->RangeMultiplier(4)->Range(1024, 16384)->Complexity();

static void BM_AddEntries(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto batch_size = static_cast<std::size_t>(state.range(0));
    const std::size_t dim = 64;
    std::vector<MemoryEntry> batch;
    for (std::size_t i = 0; i < batch_size; ++i) {
        MemoryEntry e;
        e.id = "e" + std::to_string(i);
        e.text = "entry";
        e.timestamp = Timestamp::from_epoch_seconds(1'600'000'000 + (i % 50) * 60);
        e.conversation_id = "bench";
        e.embedding = random_unit(rng, dim);
        batch.push_back(std::move(e));
    }
    for (auto _ : state) {
        MemoryStore store(dim, "bench");
        auto copy = batch;
        benchmark::DoNotOptimize(store.add_entries(std::move(copy)));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch_size));
}
BENCHMARK(BM_AddEntries)->RangeMultiplier(8)->Range(64, 4096);

static void BM_MockEmbed(benchmark::State& state) {
    FakeClock clock;
    MockProvider provider(clock, 7);
    const std::string text(static_cast<std::size_t>(state.range(0)), 'x');
    for (auto _ : state) {
        benchmark::DoNotOptimize(provider.embed_one(text));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MockEmbed)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_ReconstructEvent(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const auto store = build_store(static_cast<std::size_t>(state.range(0)), 16, rng);
    const Timestamp ts = Timestamp::from_epoch_seconds(1'600'000'000 + 30 * 60);
    for (auto _ : state) {
        benchmark::DoNotOptimize(store.reconstruct_event(ts));
    }
}
BENCHMARK(BM_ReconstructEvent)->Range(1024, 16384);

BENCHMARK_MAIN();
