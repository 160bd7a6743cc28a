#include <benchmark/benchmark.h>

#include <vector>

#include "reqcomp/matching.hpp"
#include "reqcomp/util.hpp"

namespace {

std::vector<std::vector<double>> random_matrix(std::size_t rows, std::size_t cols,
                                               std::uint64_t seed) {
    reqcomp::Rng rng(seed);
    std::vector<std::vector<double>> sim(rows, std::vector<double>(cols));
    for (auto& row : sim) {
        for (auto& cell : row) {
            cell = static_cast<double>(rng.below(2000)) / 1000.0 - 1.0;
        }
    }
    return sim;
}

void BM_HungarianMax(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto weight = random_matrix(n, n, 7);
    for (auto& row : weight) {
        for (auto& cell : row) {
            if (cell < 0.0) cell = 0.0;
        }
    }
    std::vector<int> row_to_col;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reqcomp::metrics::hungarian_max(weight, row_to_col));
    }
}

void BM_MatchFromSimilarity(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto sim = random_matrix(n, n, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reqcomp::metrics::match_from_similarity(sim, 0.5));
    }
}

}  // namespace

// Label sets hold at most a handful of PCs; the larger sizes track how the
// cubic core behaves if that assumption slips.
BENCHMARK(BM_HungarianMax)->Arg(5)->Arg(10)->Arg(25)->Arg(50);
BENCHMARK(BM_MatchFromSimilarity)->Arg(5)->Arg(10)->Arg(25)->Arg(50);

BENCHMARK_MAIN();
