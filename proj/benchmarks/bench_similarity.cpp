#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "reqcomp/embedding.hpp"
#include "reqcomp/model.hpp"
#include "reqcomp/similarity.hpp"

namespace {

using reqcomp::CompetencyRecord;
using reqcomp::Requisition;
using reqcomp::SectionKind;

CompetencyRecord make_record(std::string label, std::string definition) {
    CompetencyRecord record;
    record.label = std::move(label);
    record.definition = std::move(definition);
    return record;
}

reqcomp::sim::SimilarityEngine make_engine() {
    auto service = std::make_shared<reqcomp::sim::EmbeddingService>(
        std::make_shared<reqcomp::sim::HashEmbeddingProvider>(64));
    return reqcomp::sim::SimilarityEngine(std::move(service), {});
}

void BM_EmbedUncached(benchmark::State& state) {
    reqcomp::sim::HashEmbeddingProvider provider(64);
    const std::string base =
        "tracks pick rates across shifts and rebalances staffing before queues "
        "build up at the pack walls";
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(provider.embed(base + std::to_string(i++)));
    }
}

void BM_PcSimilarityCached(benchmark::State& state) {
    auto engine = make_engine();
    const auto a = make_record("Shift Staffing Balance",
                               "rebalances staffing across shifts before pick queues build up");
    const auto b = make_record("Queue Load Management",
                               "watches pack wall queues and shifts labor to keep lanes moving");
    engine.pc_similarity(a, b);  // warm the cache; steady state is what runs hot
    for (auto _ : state) {
        benchmark::DoNotOptimize(engine.pc_similarity(a, b));
    }
}

void BM_SelectExample(benchmark::State& state) {
    auto engine = make_engine();
    Requisition req;
    req.req_id = "R-000";
    req.sections[SectionKind::JD] =
        "owns inbound dock scheduling and coordinates trailer yard moves with "
        "the receive leads to keep unload doors fed";
    std::vector<reqcomp::sim::FewShotExample> library(
        static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < library.size(); ++i) {
        auto& example = library[i];
        example.req.req_id = "EX-" + std::to_string(i);
        example.req.sections[SectionKind::JD] =
            "keeps zone " + std::to_string(i) +
            " staffed through peak and escalates conveyor faults to the "
            "controls team before backlogs form";
        example.records.push_back(make_record(
            "Zone Coverage", "keeps an assigned zone staffed through volume swings"));
    }
    engine.select_example(req, library);  // warm the embedding cache
    for (auto _ : state) {
        benchmark::DoNotOptimize(engine.select_example(req, library));
    }
}

}  // namespace

BENCHMARK(BM_EmbedUncached);
BENCHMARK(BM_PcSimilarityCached);
BENCHMARK(BM_SelectExample)->Arg(8)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
