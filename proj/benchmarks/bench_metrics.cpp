#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "reqcomp/embedding.hpp"
#include "reqcomp/metrics.hpp"
#include "reqcomp/model.hpp"
#include "reqcomp/similarity.hpp"
#include "reqcomp/util.hpp"

namespace {

using reqcomp::Category;
using reqcomp::CompetencyRecord;
using reqcomp::LabelSet;
using reqcomp::Source;

std::vector<std::string> id_list(std::size_t n, std::uint64_t seed) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = "pc-" + std::to_string(i);
    reqcomp::Rng(seed).shuffle(ids);
    return ids;
}

CompetencyRecord make_record(const std::string& label, int priority, bool specific) {
    CompetencyRecord record;
    record.label = label;
    record.definition = "keeps " + label + " on plan through peak volume";
    record.category = specific ? Category::DomainTeamSpecific : Category::OtherFunctional;
    record.priority = priority;
    return record;
}

LabelSet make_set(const std::string& req_id, Source source, std::uint64_t seed) {
    static const char* kTopics[] = {"dock flow",    "pick density", "pack lanes",
                                    "yard moves",   "slotting",     "labor share",
                                    "cycle counts", "wave release"};
    reqcomp::Rng rng(seed);
    LabelSet set;
    set.req_id = req_id;
    set.source = std::move(source);
    const std::size_t count = 3 + rng.below(3);
    for (std::size_t i = 0; i < count; ++i) {
        const auto* topic = kTopics[rng.below(std::size(kTopics))];
        set.records.push_back(make_record(topic, static_cast<int>(9 - i), i < 3));
    }
    return set;
}

void BM_RankingAlignment(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto model = id_list(n, 3);
    const auto truth = id_list(n, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reqcomp::metrics::ranking_alignment(
            model, truth, 0.9, reqcomp::metrics::RaMode::Normalized));
    }
}

void BM_ComputeMetrics(benchmark::State& state) {
    auto service = std::make_shared<reqcomp::sim::EmbeddingService>(
        std::make_shared<reqcomp::sim::HashEmbeddingProvider>(64));
    reqcomp::sim::SimilarityEngine engine(std::move(service), {});
    const reqcomp::metrics::MetricConfig cfg;

    const auto reqs = static_cast<std::size_t>(state.range(0));
    std::vector<reqcomp::metrics::ReqEval> evals;
    evals.reserve(reqs);
    for (std::size_t i = 0; i < reqs; ++i) {
        const auto req_id = "R-" + std::to_string(i);
        const auto model = make_set(req_id, Source::model_run("run-1"), 2 * i);
        const auto truth = make_set(req_id, Source::consensus(), 2 * i + 1);
        evals.push_back(reqcomp::metrics::evaluate_req(model, truth, engine, cfg));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(reqcomp::metrics::compute_metrics(evals, cfg));
    }
}

void BM_EvaluateReq(benchmark::State& state) {
    auto service = std::make_shared<reqcomp::sim::EmbeddingService>(
        std::make_shared<reqcomp::sim::HashEmbeddingProvider>(64));
    reqcomp::sim::SimilarityEngine engine(std::move(service), {});
    const reqcomp::metrics::MetricConfig cfg;
    const auto model = make_set("R-0", Source::model_run("run-1"), 21);
    const auto truth = make_set("R-0", Source::consensus(), 22);
    reqcomp::metrics::evaluate_req(model, truth, engine, cfg);  // warm the cache
    for (auto _ : state) {
        benchmark::DoNotOptimize(reqcomp::metrics::evaluate_req(model, truth, engine, cfg));
    }
}

}  // namespace

BENCHMARK(BM_RankingAlignment)->Arg(5)->Arg(25);
BENCHMARK(BM_EvaluateReq);
BENCHMARK(BM_ComputeMetrics)->Arg(8)->Arg(64);

BENCHMARK_MAIN();
