#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "reqcomp/errors.hpp"
#include "reqcomp/experiment.hpp"
#include "reqcomp/io.hpp"
#include "reqcomp/model.hpp"
#include "reqcomp/report.hpp"
#include "support.hpp"

using namespace reqcomp;
using namespace reqcomp::harness;
using testsupport::CaptureLog;
using testsupport::TempDir;
using testsupport::data_path;
using testsupport::make_record;
using testsupport::make_req;

namespace fs = std::filesystem;

namespace {

ExperimentConfig fixture_config() {
    return load_experiment_config(data_path("harness/config.json"));
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(bool(out));
    out << text;
}

fs::path write_config(const TempDir& dir, const std::string& body) {
    fs::path path = dir.path() / "config.json";
    write_file(path, body);
    return path;
}

// Enough of a config for load_experiment_config to accept.
const char* kMinimalConfig = R"({
  "schema_version": 1,
  "data": {"requisitions": "r.jsonl", "labels": "l.jsonl"},
  "output_dir": "out",
  "provider": {"kind": "mock", "fixture": "m.json"}
})";

DatasetBundle synthetic_bundle(std::size_t n) {
    DatasetBundle bundle;
    for (std::size_t i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "R-%03zu", i);
        bundle.requisitions.push_back(make_req(id, "Program Management"));
    }
    return bundle;
}

std::map<Split, std::size_t> split_counts(const DatasetBundle& bundle) {
    std::map<Split, std::size_t> counts;
    for (const auto& [id, split] : bundle.split) ++counts[split];
    return counts;
}

const LabelSet* find_output(const std::vector<LabelSet>& sets, const std::string& req_id) {
    for (const LabelSet& set : sets) {
        if (set.req_id == req_id) return &set;
    }
    return nullptr;
}

bool has_label(const LabelSet& set, const std::string& label) {
    for (const CompetencyRecord& record : set.records) {
        if (record.label == label) return true;
    }
    return false;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("split spec validation") {
    SplitSpec spec;
    CHECK_NOTHROW(spec.validate());

    spec = {0.25, 0.0, 0.75, 1};
    CHECK_NOTHROW(spec.validate());

    spec = {-0.1, 0.5, 0.6, 1};
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("within [0, 1]"), ConfigError);

    spec = {0.5, 0.2, 0.2, 1};
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("must sum to 1"), ConfigError);
}

TEST_CASE("split apportionment follows largest remainder") {
    DatasetBundle bundle = synthetic_bundle(100);
    split_dataset(bundle, SplitSpec{});
    auto counts = split_counts(bundle);
    CHECK(counts[Split::Train] == 26);
    CHECK(counts[Split::Dev] == 50);
    CHECK(counts[Split::Test] == 24);
    CHECK(bundle.split.size() == 100);

    // Equal remainders go to the earlier split.
    DatasetBundle thirds = synthetic_bundle(10);
    split_dataset(thirds, SplitSpec{1.0 / 3, 1.0 / 3, 1.0 / 3, 5});
    counts = split_counts(thirds);
    CHECK(counts[Split::Train] == 4);
    CHECK(counts[Split::Dev] == 3);
    CHECK(counts[Split::Test] == 3);
}

TEST_CASE("split is deterministic per seed") {
    DatasetBundle a = synthetic_bundle(40);
    DatasetBundle b = synthetic_bundle(40);
    split_dataset(a, SplitSpec{0.25, 0.25, 0.5, 99});
    split_dataset(b, SplitSpec{0.25, 0.25, 0.5, 99});
    CHECK(a.split == b.split);

    DatasetBundle c = synthetic_bundle(40);
    split_dataset(c, SplitSpec{0.25, 0.25, 0.5, 100});
    CHECK(a.split != c.split);
}

TEST_CASE("split needs three requisitions") {
    DatasetBundle bundle = synthetic_bundle(2);
    CHECK_THROWS_WITH_AS(split_dataset(bundle, SplitSpec{}),
                         doctest::Contains("at least 3 requisitions"), ValidationError);
}

TEST_CASE("fixture split puts the example reqs in train") {
    ExperimentConfig cfg = fixture_config();
    DatasetBundle bundle = io::load_bundle(cfg.data);
    split_dataset(bundle, cfg.split);

    CHECK(bundle.split.at("EX-1") == Split::Train);
    CHECK(bundle.split.at("EX-2") == Split::Train);
    CHECK(bundle.requisitions_in(Split::Test).size() == 6);
    CHECK(bundle.requisitions_in(Split::Dev).empty());

    std::vector<sim::FewShotExample> examples = train_examples(bundle);
    REQUIRE(examples.size() == 2);
    CHECK(examples[0].req.req_id == "EX-1");
    CHECK(examples[1].req.req_id == "EX-2");
    CHECK(examples[0].records.size() == 3);
}

TEST_CASE("train examples skip reqs without consensus") {
    DatasetBundle bundle = synthetic_bundle(4);
    LabelSet consensus;
    consensus.req_id = "R-002";
    consensus.source = Source::consensus();
    consensus.records = {make_record("Dock Scheduling", "sequences inbound trailer appointments",
                                     Category::DomainTeamSpecific, 8)};
    bundle.label_sets.push_back(consensus);
    for (const Requisition& req : bundle.requisitions) bundle.split[req.req_id] = Split::Train;

    CaptureLog capture;
    std::vector<sim::FewShotExample> examples = train_examples(bundle);
    REQUIRE(examples.size() == 1);
    CHECK(examples[0].req.req_id == "R-002");
    CHECK(capture.contains("R-000 has no consensus label set; not usable as an example"));
    CHECK(capture.count_warnings() == 3);
}

TEST_CASE("config loads with defaults") {
    TempDir dir;
    ExperimentConfig cfg = load_experiment_config(write_config(dir, kMinimalConfig));

    CHECK(cfg.data.requisitions == dir.path() / "r.jsonl");
    CHECK(cfg.data.labels == dir.path() / "l.jsonl");
    CHECK(cfg.data.library.empty());
    CHECK(cfg.data.ratings.empty());
    CHECK(cfg.output_dir == dir.path() / "out");
    CHECK(cfg.template_dir.empty());
    CHECK(cfg.split == SplitSpec{});
    CHECK(cfg.runs == 10);
    CHECK(cfg.workers == 4);
    CHECK(cfg.pipeline.few_shot_mode == pipe::FewShotMode::Dynamic);
    CHECK(cfg.provider.kind == ProviderConfig::Kind::Mock);
    CHECK(cfg.provider.fixture == dir.path() / "m.json");
    CHECK(cfg.embedding.kind == EmbeddingConfig::Kind::Hash);
    CHECK(cfg.embedding.dim == 64);
    CHECK(cfg.variants.empty());
}

TEST_CASE("config resolves paths against workspace root") {
    TempDir dir;
    fs::path path = write_config(dir, R"({
      "schema_version": 1,
      "workspace_root": "ws",
      "data": {"requisitions": "in/r.jsonl", "labels": "in/l.jsonl"},
      "output_dir": "/abs/out",
      "provider": {"kind": "mock", "fixture": "m.json"}
    })");
    ExperimentConfig cfg = load_experiment_config(path);
    CHECK(cfg.data.requisitions == dir.path() / "ws/in/r.jsonl");
    CHECK(cfg.provider.fixture == dir.path() / "ws/m.json");
    CHECK(cfg.output_dir == fs::path("/abs/out"));
}

TEST_CASE("config rejections") {
    TempDir dir;
    auto load = [&dir](const std::string& body) {
        return load_experiment_config(write_config(dir, body));
    };

    SUBCASE("not json") {
        CHECK_THROWS_WITH_AS(load("{nope"), doctest::Contains("is not valid JSON"), ConfigError);
    }
    SUBCASE("wrong schema version") {
        CHECK_THROWS_WITH_AS(load(R"({"schema_version": 2})"),
                             doctest::Contains("schema_version must be 1"), ConfigError);
    }
    SUBCASE("unknown top level key") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1, "bogus": true,
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"}})"),
            doctest::Contains("config has unknown key 'bogus'"), ConfigError);
    }
    SUBCASE("unknown nested key") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1, "split": {"train": 0.5, "middle": 0.5}})"),
            doctest::Contains("unknown key 'middle'"), ConfigError);
    }
    SUBCASE("missing provider") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out"})"),
            doctest::Contains("needs a provider section"), ConfigError);
    }
    SUBCASE("mock provider without fixture") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock"}})"),
            doctest::Contains("provider.fixture is required"), ConfigError);
    }
    SUBCASE("unknown provider kind") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "carrier-pigeon"}})"),
            doctest::Contains("must be 'mock' or 'http'"), ConfigError);
    }
    SUBCASE("negative seed") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1, "split": {"seed": -4}})"),
            doctest::Contains("seed must be non-negative"), ConfigError);
    }
    SUBCASE("missing data paths") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1, "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"}})"),
            doctest::Contains("data.requisitions is required"), ConfigError);
    }
    SUBCASE("zero runs") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1, "runs": 0,
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"}})"),
            doctest::Contains("runs must be >= 1"), ConfigError);
    }
    SUBCASE("bad few shot mode") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "pipeline": {"few_shot_mode": "sideways"},
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"}})"),
            doctest::Contains("unknown few-shot mode 'sideways'"), ConfigError);
    }
    SUBCASE("bad denominator mode") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "metrics": {"denominator_mode": "skip"},
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"}})"),
            doctest::Contains("unknown mode 'skip'"), ConfigError);
    }
    SUBCASE("zero embedding dim") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "embedding": {"kind": "hash", "dim": 0},
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"}})"),
            doctest::Contains("embedding.dim must be positive"), ConfigError);
    }
    SUBCASE("reserved variant name") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"},
                     "variants": [{"name": "baseline", "enable_filter": false}]})"),
            doctest::Contains("'baseline' is reserved"), ConfigError);
    }
    SUBCASE("duplicate variant names") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"},
                     "variants": [{"name": "v", "enable_filter": false},
                                  {"name": "v", "enable_eval_regen": false}]})"),
            doctest::Contains("duplicate ablation variant name 'v'"), ConfigError);
    }
    SUBCASE("variant overrides nothing") {
        CHECK_THROWS_WITH_AS(
            load(R"({"schema_version": 1,
                     "data": {"requisitions": "r", "labels": "l"},
                     "output_dir": "out",
                     "provider": {"kind": "mock", "fixture": "m.json"},
                     "variants": [{"name": "noop"}]})"),
            doctest::Contains("overrides nothing"), ConfigError);
    }
}

TEST_CASE("fixture config round trip") {
    ExperimentConfig cfg = fixture_config();
    CHECK(cfg.runs == 3);
    CHECK(cfg.workers == 2);
    CHECK(cfg.split.train == doctest::Approx(0.25));
    CHECK(cfg.split.dev == doctest::Approx(0.0));
    CHECK(cfg.split.test == doctest::Approx(0.75));
    CHECK(cfg.provider.kind == ProviderConfig::Kind::Mock);
    CHECK(cfg.provider.fixture == data_path("harness/mock_responses.json"));
    CHECK(cfg.data.ratings == data_path("harness/ratings.jsonl"));

    REQUIRE(cfg.variants.size() == 2);
    CHECK(cfg.variants[0].name == "no_filter");
    CHECK(cfg.variants[0].enable_filter == std::optional<bool>(false));
    CHECK_FALSE(cfg.variants[0].few_shot_mode.has_value());
    CHECK(cfg.variants[1].name == "zero_shot");
    CHECK(cfg.variants[1].few_shot_mode == std::optional(pipe::FewShotMode::ZeroShot));
}

TEST_CASE("variant overrides") {
    pipe::PipelineConfig base;
    AblationVariant variant;
    variant.name = "swap";
    variant.few_shot_mode = pipe::FewShotMode::ZeroShot;
    variant.enable_filter = false;
    variant.extended_reasoning = true;
    variant.model_id = "alt-model";

    pipe::PipelineConfig out = apply_variant(base, variant);
    CHECK(out.few_shot_mode == pipe::FewShotMode::ZeroShot);
    CHECK_FALSE(out.enable_filter);
    CHECK(out.extended_reasoning);
    CHECK(out.enable_eval_regen == base.enable_eval_regen);
    CHECK(out.enable_validation == base.enable_validation);
    CHECK(out.models.primary == "alt-model");
    CHECK(out.models.evaluate == "alt-model");
    CHECK(out.models.suggest == "alt-model");
    CHECK(out.models.regenerate == "alt-model");
    CHECK(out.models.refine_label == base.models.refine_label);
}

TEST_CASE("variant validation") {
    AblationVariant variant;
    variant.name = "no_filter";
    variant.enable_filter = false;
    CHECK_NOTHROW(variant.validate());

    variant.name = "";
    CHECK_THROWS_AS(variant.validate(), ConfigError);

    variant.name = "baseline";
    CHECK_THROWS_WITH_AS(variant.validate(), doctest::Contains("reserved"), ConfigError);

    AblationVariant empty;
    empty.name = "noop";
    CHECK_THROWS_WITH_AS(empty.validate(), doctest::Contains("overrides nothing"), ConfigError);
}

namespace {

EvaluationReport sample_report() {
    EvaluationReport report;
    report.title = "evaluation";
    report.columns = {"top1", "pa"};
    ReportRow all;
    all.group = "all";
    all.reqs = 6;
    all.runs = 5;
    all.cells["top1"] = metrics::RunAggregate{0.77, 5, 0.70, 0.84};
    all.cells["pa"] = metrics::RunAggregate{0.91, 5, 0.89, 0.93};
    ReportRow sparse;
    sparse.group = "Program Management";
    sparse.reqs = 3;
    sparse.runs = 1;
    sparse.cells["pa"] = metrics::RunAggregate{0.5, 1, {}, {}};
    report.rows = {all, sparse};
    return report;
}

}  // namespace

TEST_CASE("report json round trip") {
    EvaluationReport report = sample_report();
    std::string json = report_to_json(report);
    CHECK(report_to_json(report) == json);
    CHECK(report_from_json(json) == report);
}

TEST_CASE("report table layout") {
    std::string table = report_to_table(sample_report());
    CHECK(table.find("evaluation\n") == 0);
    CHECK(table.find("group") != std::string::npos);
    CHECK(table.find("0.77 / [0.70, 0.84]") != std::string::npos);
    CHECK(table.find("0.50") != std::string::npos);
    // The sparse row has no top1 cell.
    CHECK(table.find(" - ") != std::string::npos);
}

TEST_CASE("report write and load") {
    TempDir dir;
    EvaluationReport report = sample_report();
    write_report(report, dir.path(), "report");
    CHECK(load_report(dir.path() / "report.json") == report);
    CHECK(slurp(dir.path() / "report.txt") == report_to_table(report));

    EvaluationReport empty;
    empty.columns = {"top1"};
    CHECK_THROWS_WITH_AS(write_report(empty, dir.path(), "empty"),
                         doctest::Contains("no rows"), ValidationError);
    empty.columns.clear();
    CHECK_THROWS_WITH_AS(report_to_table(empty), doctest::Contains("no columns"),
                         ValidationError);
}

TEST_CASE("report rejects malformed json") {
    CHECK_THROWS_WITH_AS(report_from_json("not json"),
                         doctest::Contains("not valid JSON"), ValidationError);
    CHECK_THROWS_WITH_AS(report_from_json(R"({"schema_version": 2})"),
                         doctest::Contains("schema_version 1"), ValidationError);
    CHECK_THROWS_WITH_AS(
        report_from_json(R"({"schema_version": 1, "columns": [], "rows": []})"),
        doctest::Contains("missing string 'title'"), ValidationError);
    CHECK_THROWS_WITH_AS(
        report_from_json(
            R"({"schema_version": 1, "title": "t", "columns": ["pa"],
                "rows": [{"group": "all", "cells": {"pa": {"mean": 0.5, "ci_lo": 0.4}}}]})"),
        doctest::Contains("has half a CI"), ValidationError);
}

TEST_CASE("experiment run produces a perfect report on the sample corpus") {
    TempDir out;
    ExperimentConfig cfg = fixture_config();
    cfg.output_dir = out.path();

    EvaluationReport report = run_experiment(cfg);

    REQUIRE(report.rows.size() == 3);
    CHECK(report.columns == kMetricColumns);
    CHECK(report.rows[0].group == "all");
    CHECK(report.rows[1].group == "Operations Management");
    CHECK(report.rows[2].group == "Program Management");
    CHECK(report.rows[0].reqs == 6);
    CHECK(report.rows[1].reqs == 3);
    CHECK(report.rows[2].reqs == 3);

    for (const ReportRow& row : report.rows) {
        CHECK(row.runs == 3);
        for (const std::string& metric : kMetricColumns) {
            REQUIRE(row.cells.count(metric) == 1);
            const metrics::RunAggregate& cell = row.cells.at(metric);
            double expected = metric == "ra" ? 1.0 - 0.9 * 0.9 * 0.9 : 1.0;
            CHECK(cell.mean == doctest::Approx(expected).epsilon(1e-9));
            CHECK(cell.runs == 3);
            // Identical runs leave no spread.
            REQUIRE(cell.ci_lo.has_value());
            CHECK(*cell.ci_lo == cell.mean);
            CHECK(*cell.ci_hi == cell.mean);
        }
    }

    for (int run = 1; run <= 3; ++run) {
        fs::path run_dir = out.path() / "runs" / ("run-" + std::to_string(run));
        CHECK(fs::exists(run_dir / "labels.jsonl"));
        CHECK(fs::exists(run_dir / "traces.jsonl"));
        CHECK(fs::exists(run_dir / "failures.jsonl"));
        CHECK(fs::file_size(run_dir / "failures.jsonl") == 0);
        CHECK(io::load_label_sets(run_dir / "labels.jsonl").size() == 6);
    }
    CHECK(load_report(out.path() / "report.json") == report);
    CHECK(slurp(out.path() / "report.txt") == report_to_table(report));

    // The audit path recomputes the same table from the persisted label sets.
    CHECK(evaluate_runs(cfg) == report);
}

TEST_CASE("audit evaluation needs persisted runs") {
    TempDir out;
    ExperimentConfig cfg = fixture_config();
    cfg.output_dir = out.path();
    CHECK_THROWS_WITH_AS(evaluate_runs(cfg), doctest::Contains("no persisted runs"),
                         ConfigError);
}

TEST_CASE("ablation matrix") {
    TempDir out;
    ExperimentConfig cfg = fixture_config();
    cfg.output_dir = out.path();

    EvaluationReport ablation = run_ablation(cfg);

    REQUIRE(ablation.rows.size() == 3);
    CHECK(ablation.title == "ablation");
    CHECK(ablation.rows[0].group == "baseline");
    CHECK(ablation.rows[1].group == "no_filter");
    CHECK(ablation.rows[2].group == "zero_shot");
    CHECK(load_report(out.path() / "ablation.json") == ablation);

    // Baseline matches the plain experiment's "all" row apart from the name.
    TempDir plain_out;
    ExperimentConfig plain = fixture_config();
    plain.output_dir = plain_out.path();
    ReportRow expected = run_experiment(plain).rows[0];
    expected.group = "baseline";
    CHECK(ablation.rows[0] == expected);

    // Disabling the redundancy filter keeps the near-duplicate the model
    // plants for PM-B; the baseline removes it.
    auto baseline_sets =
        io::load_label_sets(out.path() / "ablation/baseline/runs/run-1/labels.jsonl");
    auto no_filter_sets =
        io::load_label_sets(out.path() / "ablation/no_filter/runs/run-1/labels.jsonl");
    const LabelSet* baseline_pmb = find_output(baseline_sets, "PM-B");
    const LabelSet* no_filter_pmb = find_output(no_filter_sets, "PM-B");
    REQUIRE(baseline_pmb != nullptr);
    REQUIRE(no_filter_pmb != nullptr);
    CHECK(baseline_pmb->records.size() == 3);
    CHECK_FALSE(has_label(*baseline_pmb, "Inventory Correctness"));
    CHECK(no_filter_pmb->records.size() == 4);
    CHECK(has_label(*no_filter_pmb, "Inventory Correctness"));
    CHECK(no_filter_pmb->records.size() ==
          baseline_pmb->records.size() + 1);

    // Zero-shot prompts never pick an example; the baseline does for the req
    // whose posting matches a train example.
    std::string baseline_traces = slurp(out.path() / "ablation/baseline/runs/run-1/traces.jsonl");
    std::string zero_shot_traces =
        slurp(out.path() / "ablation/zero_shot/runs/run-1/traces.jsonl");
    CHECK(baseline_traces.find("\"example_req_id\":\"EX-1\"") != std::string::npos);
    CHECK(zero_shot_traces.find("example_req_id") == std::string::npos);
}

TEST_CASE("ablation isolates a failing variant") {
    TempDir out;
    ExperimentConfig cfg = fixture_config();
    cfg.output_dir = out.path();
    cfg.runs = 1;

    AblationVariant broken;
    broken.name = "static_broken";
    broken.few_shot_mode = pipe::FewShotMode::Static;  // no static_example_id
    cfg.variants = {cfg.variants[0], broken};

    CaptureLog capture;
    EvaluationReport report = run_ablation(cfg);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].group == "baseline");
    CHECK(report.rows[1].group == "no_filter");
    CHECK(capture.contains("ablation variant 'static_broken' failed"));
}

TEST_CASE("ablation fails when nothing succeeds") {
    TempDir out;
    ExperimentConfig cfg = fixture_config();
    cfg.output_dir = out.path();
    cfg.runs = 1;
    cfg.variants.clear();
    write_file(out.path() / "empty_mock.json", R"({"schema_version": 1, "responses": []})");
    cfg.provider.fixture = out.path() / "empty_mock.json";

    CaptureLog capture;
    CHECK_THROWS_WITH_AS(run_ablation(cfg), "every ablation variant failed", ValidationError);
    CHECK(capture.contains("ablation variant 'baseline' failed"));
}

TEST_CASE("irr report over the sample raters") {
    ExperimentConfig cfg = fixture_config();
    DatasetBundle bundle = io::load_bundle(cfg.data);
    auto engine = build_similarity(cfg);

    EvaluationReport report = compute_irr_report(bundle, *engine, cfg.metrics);

    REQUIRE(report.rows.size() == 3);
    CHECK(report.title == "inter-rater reliability");
    CHECK(report.columns == kIrrColumns);
    CHECK(report.rows[0].group == "all");
    CHECK(report.rows[1].group == "Operations Management");
    CHECK(report.rows[2].group == "Program Management");

    // Two raters per req, ordered pairs in both directions.
    CHECK(report.rows[0].reqs == 6);
    CHECK(report.rows[0].runs == 12);
    CHECK(report.rows[1].reqs == 3);
    CHECK(report.rows[1].runs == 6);
    CHECK(report.rows[2].reqs == 3);
    CHECK(report.rows[2].runs == 6);

    for (const ReportRow& row : report.rows) {
        CHECK(row.cells.at("top1").mean == doctest::Approx(1.0));
        CHECK(row.cells.at("ra").mean == doctest::Approx(1.0 - 0.9 * 0.9 * 0.9).epsilon(1e-9));
        CHECK(row.cells.at("ra_norm").mean == doctest::Approx(1.0));
        CHECK(row.cells.at("ca").mean == doctest::Approx(1.0));
        CHECK_FALSE(row.cells.at("pa").ci_lo.has_value());
    }

    // The second operations rater shifts one priority by two points.
    CHECK(report.rows[2].cells.at("pa").mean == doctest::Approx(1.0));
    CHECK(report.rows[1].cells.at("pa").mean == doctest::Approx(14.0 / 15.0).epsilon(1e-9));
    CHECK(report.rows[0].cells.at("pa").mean == doctest::Approx(29.0 / 30.0).epsilon(1e-9));
}

TEST_CASE("irr report is empty without second raters") {
    ExperimentConfig cfg = fixture_config();
    DatasetBundle bundle = io::load_bundle(cfg.data);
    std::erase_if(bundle.label_sets,
                  [](const LabelSet& set) { return set.source.kind == Source::Kind::Sme; });
    auto engine = build_similarity(cfg);

    CaptureLog capture;
    EvaluationReport report = compute_irr_report(bundle, *engine, cfg.metrics);
    CHECK(report.rows.empty());
    CHECK(capture.contains("no requisition has two or more raters"));
}

TEST_CASE("ratings ingestion merges by req id") {
    TempDir dir;
    ExperimentConfig cfg = fixture_config();
    fs::copy_file(cfg.data.ratings, dir.path() / "ratings.jsonl");
    cfg.data.ratings = dir.path() / "ratings.jsonl";

    SmeRatingSheet replacement;
    replacement.req_id = "PM-A";
    replacement.pc_ratings = {{"Robotics Floor Expansion", false, Granularity::JustRight, true, true}};
    replacement.overlap_free = false;
    replacement.top1_appropriateness = 2;
    SmeRatingSheet fresh;
    fresh.req_id = "PMT-A";
    fresh.pc_ratings = {{"Pack Lane Throughput", true, Granularity::TooBroad, false, true}};
    fresh.top1_appropriateness = 1;

    std::vector<SmeRatingSheet> incoming = {replacement, fresh};
    io::save_rating_sheets(incoming, dir.path() / "new.jsonl");

    CHECK(ingest_ratings(cfg, dir.path() / "new.jsonl") == 3);

    std::vector<SmeRatingSheet> merged = io::load_rating_sheets(cfg.data.ratings);
    REQUIRE(merged.size() == 3);
    CHECK(merged[0] == replacement);
    CHECK(merged[1].req_id == "PM-B");
    CHECK(merged[2] == fresh);
}

TEST_CASE("ratings ingestion error paths") {
    TempDir dir;
    ExperimentConfig cfg = fixture_config();

    SUBCASE("no ratings path configured") {
        cfg.data.ratings.clear();
        CHECK_THROWS_WITH_AS(ingest_ratings(cfg, dir.path() / "new.jsonl"),
                             doctest::Contains("no data.ratings path"), ConfigError);
    }
    SUBCASE("nothing to ingest") {
        cfg.data.ratings = dir.path() / "ratings.jsonl";
        write_file(dir.path() / "new.jsonl", "");
        CHECK_THROWS_WITH_AS(ingest_ratings(cfg, dir.path() / "new.jsonl"),
                             doctest::Contains("no rating sheets in"), ValidationError);
    }
}
