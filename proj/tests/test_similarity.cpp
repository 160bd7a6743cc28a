#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "reqcomp/embedding.hpp"
#include "reqcomp/errors.hpp"
#include "reqcomp/similarity.hpp"
#include "support.hpp"

using namespace reqcomp;
using testsupport::CaptureLog;
using testsupport::make_record;
using testsupport::make_req;

namespace {

std::shared_ptr<sim::EmbeddingService> hash_service(std::size_t dim = 64) {
    return std::make_shared<sim::EmbeddingService>(
        std::make_shared<sim::HashEmbeddingProvider>(dim));
}

double norm(const sim::EmbeddingVector& v) {
    double sq = 0.0;
    for (double x : v.values) sq += x * x;
    return std::sqrt(sq);
}

// Provider that returns a fixed raw vector, for exercising the service's
// contract enforcement.
class FixedProvider final : public sim::EmbeddingProvider {
public:
    explicit FixedProvider(std::vector<double> values) : values_(std::move(values)) {}
    sim::EmbeddingVector embed(const std::string&) override { return {values_}; }
    std::size_t dim() const override { return values_.size(); }
    std::string name() const override { return "fixed"; }

private:
    std::vector<double> values_;
};

}  // namespace

TEST_CASE("hash embeddings are deterministic unit vectors") {
    sim::HashEmbeddingProvider provider(64);
    auto a = provider.embed("program manager robotics");
    auto b = provider.embed("program manager robotics");
    CHECK(a.values == b.values);
    CHECK(a.dim() == 64);
    CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-9));

    // Token order is irrelevant, token multiset is not.
    auto c = provider.embed("robotics manager program");
    CHECK(sim::cosine(a, c) == doctest::Approx(1.0).epsilon(1e-9));
    auto d = provider.embed("program manager robotics robotics");
    CHECK(sim::cosine(a, d) < 1.0);
}

TEST_CASE("cosine behaves at the edges") {
    sim::EmbeddingVector x{{1.0, 0.0}};
    sim::EmbeddingVector y{{0.0, 1.0}};
    sim::EmbeddingVector negx{{-1.0, 0.0}};
    CHECK(sim::cosine(x, x) == doctest::Approx(1.0));
    CHECK(sim::cosine(x, y) == doctest::Approx(0.0));
    CHECK(sim::cosine(x, negx) == doctest::Approx(-1.0));

    sim::EmbeddingVector other_dim{{1.0, 0.0, 0.0}};
    CHECK_THROWS_AS(sim::cosine(x, other_dim), ValidationError);
}

TEST_CASE("service caches and calls the provider at most once per text") {
    auto service = hash_service();
    auto first = service->embed("vendor management");
    CHECK(service->provider_calls() == 1);
    CHECK(service->cache_size() == 1);
    auto second = service->embed("vendor management");
    CHECK(service->provider_calls() == 1);
    CHECK(first.values == second.values);
    service->embed("other text");
    CHECK(service->provider_calls() == 2);
}

TEST_CASE("empty text short-circuits to the canonical vector with a warning") {
    auto service = hash_service(8);
    CaptureLog capture;
    auto v = service->embed("");
    CHECK(service->provider_calls() == 0);
    CHECK(v.values[0] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < v.values.size(); ++i) CHECK(v.values[i] == 0.0);
    CHECK(capture.count_warnings() == 1);

    // Whitespace-only text hashes to no tokens; the provider returns a zero
    // vector and the service substitutes the same canonical unit vector.
    auto w = service->embed("   \t  ");
    CHECK(w.values == v.values);
}

TEST_CASE("service rejects broken provider output and fixes zero vectors") {
    auto zero = std::make_shared<sim::EmbeddingService>(
        std::make_shared<FixedProvider>(std::vector<double>{0.0, 0.0, 0.0}));
    CaptureLog capture;
    auto v = zero->embed("anything");
    CHECK(v.values == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(capture.count_warnings() == 1);

    auto nan = std::make_shared<sim::EmbeddingService>(std::make_shared<FixedProvider>(
        std::vector<double>{std::numeric_limits<double>::quiet_NaN(), 1.0}));
    CHECK_THROWS_AS(nan->embed("anything"), ValidationError);

    // Un-normalized provider output is normalized on the way through.
    auto big = std::make_shared<sim::EmbeddingService>(
        std::make_shared<FixedProvider>(std::vector<double>{3.0, 4.0}));
    auto u = big->embed("anything");
    CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("concurrent embeds of one text stay consistent") {
    auto service = hash_service();
    std::vector<std::thread> threads;
    std::vector<sim::EmbeddingVector> results(8);
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&service, &results, i] {
            results[i] = service->embed("shared text under contention");
        });
    }
    for (auto& t : threads) t.join();
    for (int i = 1; i < 8; ++i) CHECK(results[i].values == results[0].values);
    CHECK(service->cache_size() == 1);
}

TEST_CASE("similarity config validation") {
    sim::SimilarityConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.w_label = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);  // weights no longer sum to 1
    cfg.w_label = 0.3;
    cfg.threshold = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("pc similarity weights label and definition 0.3/0.7") {
    sim::SimilarityEngine engine(hash_service(), {});
    auto a = make_record("Vendor Management", "Working with suppliers",
                         Category::OtherFunctional, 5);
    auto b = make_record("Vendor Management", "Planning warehouse layouts",
                         Category::OtherFunctional, 5);

    auto parts = engine.pc_similarity_parts(a, b);
    CHECK(parts.label_cos == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(parts.combined ==
          doctest::Approx(0.3 * parts.label_cos + 0.7 * parts.def_cos).epsilon(1e-12));
    CHECK(engine.pc_similarity(a, b) == doctest::Approx(parts.combined).epsilon(1e-12));

    // Identical records score exactly 1; similarity is symmetric.
    CHECK(engine.pc_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(engine.pc_similarity(a, b) == doctest::Approx(engine.pc_similarity(b, a)));
}

TEST_CASE("select_example takes the argmax with strict threshold") {
    sim::SimilarityEngine engine(hash_service(), {});
    std::vector<sim::FewShotExample> library = {
        {make_req("EX-2", "PM", "bq", "pq", "robot fleet navigation and mapping"), {}},
        {make_req("EX-1", "PM", "bq", "pq", "vendor contracts and supplier onboarding"), {}},
    };

    Requisition query =
        make_req("Q-1", "PM", "bq", "pq", "vendor contracts and supplier selection");
    auto pick = engine.select_example(query, library, 0.1);
    REQUIRE(pick.has_value());
    CHECK(library[pick->index].req.req_id == "EX-1");
    CHECK(pick->score > 0.1);

    // A threshold the best score cannot clear forces zero-shot.
    CHECK(!engine.select_example(query, library, 0.999).has_value());
    // The comparison is strict.
    CHECK(!engine.select_example(query, library, pick->score).has_value());
    CHECK(!engine.select_example(query, {}, 0.0).has_value());
}

TEST_CASE("select_example ties break to the smallest req id") {
    sim::SimilarityEngine engine(hash_service(), {});
    // Identical JDs give identical scores.
    std::vector<sim::FewShotExample> library = {
        {make_req("EX-9", "PM", "bq", "pq", "inventory planning"), {}},
        {make_req("EX-3", "PM", "bq", "pq", "inventory planning"), {}},
        {make_req("EX-5", "PM", "bq", "pq", "inventory planning"), {}},
    };
    Requisition query = make_req("Q-1", "PM", "bq", "pq", "inventory planning");
    auto pick = engine.select_example(query, library, 0.5);
    REQUIRE(pick.has_value());
    CHECK(library[pick->index].req.req_id == "EX-3");
}
