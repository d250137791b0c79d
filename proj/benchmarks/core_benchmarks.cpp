// Microbenchmarks for the pipeline's hot paths. Run via:
//   ./build/benchmarks/graphtune_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <filesystem>

#include "graphtune/chunking.hpp"
#include "graphtune/evaluation.hpp"
#include "graphtune/gateway.hpp"
#include "graphtune/graph.hpp"
#include "graphtune/optimizer.hpp"
#include "graphtune/rng.hpp"
#include "graphtune/runner.hpp"
#include "graphtune/text.hpp"

using namespace graphtune;

namespace {

std::string lorem(std::size_t sentences, std::uint64_t seed) {
    static const char* words[] = {"river",  "bridge", "market",  "tower",  "harvest",
                                  "lantern", "Kessel", "Veldoria", "council", "granary"};
    Rng rng(seed);
    std::string text;
    for (std::size_t s = 0; s < sentences; ++s) {
        std::size_t length = 6 + rng.below(14);
        for (std::size_t w = 0; w < length; ++w) {
            if (!text.empty()) text.push_back(' ');
            text += words[rng.below(10)];
        }
        text += ".";
    }
    return text;
}

CorpusDocument bench_doc(std::size_t sentences) {
    CorpusDocument doc;
    doc.doc_id = "dbench";
    doc.title = "Bench";
    doc.text = lorem(sentences, 7);
    doc.content_hash = hex64(fnv1a64(doc.text));
    return doc;
}

const std::filesystem::path kToyDataset =
    std::filesystem::path(GT_REPO_ROOT) / "data" / "toy_hotpot.json";

} // namespace

static void BM_CountTokens(benchmark::State& state) {
    std::string text = lorem(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(count_tokens(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_CountTokens)->Arg(16)->Arg(256);

static void BM_ChunkDocument(benchmark::State& state) {
    CorpusDocument doc = bench_doc(400);
    for (auto _ : state) benchmark::DoNotOptimize(chunk_document(doc, state.range(0)));
}
BENCHMARK(BM_ChunkDocument)->Arg(200)->Arg(2000);

static void BM_HashedEmbedding(benchmark::State& state) {
    std::string text = lorem(8, 11);
    for (auto _ : state) benchmark::DoNotOptimize(hashed_unigram_embedding(text, 256));
}
BENCHMARK(BM_HashedEmbedding);

static void BM_VectorSearch(benchmark::State& state) {
    auto gateway = make_mock_gateway(TemplateRegistry::with_defaults());
    TrialStores stores(*gateway);
    std::vector<std::pair<std::string, std::string>> items;
    for (std::int64_t i = 0; i < state.range(0); ++i)
        items.emplace_back("c" + std::to_string(i), lorem(4, static_cast<std::uint64_t>(i)));
    stores.index_items("chunks", items);
    stores.freeze();
    for (auto _ : state)
        benchmark::DoNotOptimize(stores.vector_search("chunks", "river bridge market", 10));
}
BENCHMARK(BM_VectorSearch)->Arg(100)->Arg(1000);

static void BM_ExtractAndMerge(benchmark::State& state) {
    auto gateway = make_mock_gateway(TemplateRegistry::with_defaults());
    CorpusDocument doc = bench_doc(120);
    std::vector<Chunk> chunks = chunk_document(doc, 300);
    for (auto _ : state) {
        std::vector<GraphFragment> fragments;
        for (const auto& chunk : chunks)
            fragments.push_back(extract_graph_fragment(chunk, "default", *gateway));
        benchmark::DoNotOptimize(merge_fragments(fragments));
    }
}
BENCHMARK(BM_ExtractAndMerge);

static void BM_TokenF1(benchmark::State& state) {
    std::string a = lorem(2, 1), b = lorem(2, 2);
    for (auto _ : state) benchmark::DoNotOptimize(token_f1(a, b));
}
BENCHMARK(BM_TokenF1);

static void BM_BootstrapCi(benchmark::State& state) {
    Rng rng(9);
    std::vector<double> values;
    for (int i = 0; i < 24; ++i) values.push_back(rng.uniform01());
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_ci(values, 1000, 0.95, 42));
}
BENCHMARK(BM_BootstrapCi);

static void BM_TpeSuggest(benchmark::State& state) {
    Study study;
    study.space = default_search_space();
    study.seed = 5;
    Rng rng(6);
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        PipelineConfig config = sample_uniform_config(study.space, rng);
        record(study, config, rng.uniform01(), {}, 0, 0);
    }
    for (auto _ : state) benchmark::DoNotOptimize(suggest(study));
}
BENCHMARK(BM_TpeSuggest)->Arg(10)->Arg(50);

static void BM_FullMockTrial(benchmark::State& state) {
    auto instances = load_benchmark(kToyDataset, DatasetAdapter::hotpotqa);
    CorpusSplit split = make_split(instances, {}, 7, 24, 12);
    auto gateway = make_mock_gateway(TemplateRegistry::with_defaults());
    TrialStores stores(*gateway);
    PipelineConfig config = baseline_config();
    for (auto _ : state) benchmark::DoNotOptimize(run_trial(config, split, Metric::f1, stores));
}
BENCHMARK(BM_FullMockTrial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
