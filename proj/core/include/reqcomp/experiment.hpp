// Experiment orchestration: config loading, dataset splitting, multi-run
// execution over the test split, ablation matrices, IRR tables, and rating
// ingestion. Everything a run emits lands under the configured output
// directory and is recomputable from what was persisted.
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reqcomp/io.hpp"
#include "reqcomp/metrics.hpp"
#include "reqcomp/model.hpp"
#include "reqcomp/pipeline.hpp"
#include "reqcomp/report.hpp"

namespace reqcomp::harness {

struct SplitSpec {
    double train = 0.26;
    double dev = 0.50;
    double test = 0.24;
    std::uint64_t seed = 17;

    void validate() const;  // fractions in [0,1], summing to 1 +- 1e-9

    bool operator==(const SplitSpec&) const = default;
};

// Overrides applied on top of the base pipeline config; one row in the
// ablation matrix. At least one override must be set.
struct AblationVariant {
    std::string name;
    std::optional<pipe::FewShotMode> few_shot_mode;
    std::optional<bool> enable_eval_regen;
    std::optional<bool> enable_filter;
    std::optional<bool> enable_validation;
    std::optional<bool> extended_reasoning;
    // Replaces the primary/evaluate/suggest/regenerate model ids (the label
    // refiner keeps its own model).
    std::optional<std::string> model_id;

    void validate() const;

    bool operator==(const AblationVariant&) const = default;
};

pipe::PipelineConfig apply_variant(pipe::PipelineConfig base, const AblationVariant& variant);

struct ProviderConfig {
    enum class Kind { Mock, Http };

    Kind kind = Kind::Mock;
    std::filesystem::path fixture;  // mock: scripted responses file
    llm::HttpChatConfig http;
};

struct EmbeddingConfig {
    enum class Kind { Hash, Http };

    Kind kind = Kind::Hash;
    std::size_t dim = 64;  // hash provider dimension
    sim::HttpEmbeddingConfig http;
};

struct ExperimentConfig {
    io::DatasetPaths data;
    std::filesystem::path output_dir;
    std::filesystem::path template_dir;  // empty: built-in templates
    SplitSpec split;
    int runs = 10;
    int workers = 4;
    pipe::PipelineConfig pipeline;
    metrics::MetricConfig metrics;
    llm::GatewayOptions gateway;
    ProviderConfig provider;
    EmbeddingConfig embedding;
    std::vector<AblationVariant> variants;

    void validate() const;
};

// Parses a JSON config file. Relative paths resolve against workspace_root,
// which itself defaults to the config file's directory. Unknown keys are
// rejected.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Seeded deterministic partition over the sorted unique req ids; sizes by
// largest-remainder apportionment of the fractions. Needs >= 3 reqs.
void split_dataset(DatasetBundle& bundle, const SplitSpec& spec);

// Few-shot candidate pool: train-split requisitions with consensus label
// sets, in requisition file order. Train reqs without consensus are skipped
// with a warning.
std::vector<sim::FewShotExample> train_examples(const DatasetBundle& bundle);

// Shared service graph for one experiment.
struct Services {
    std::shared_ptr<llm::ChatProvider> chat;
    std::shared_ptr<llm::LlmGateway> gateway;
    std::shared_ptr<sim::EmbeddingService> embeddings;
    std::shared_ptr<sim::SimilarityEngine> similarity;
    llm::TemplateSet templates;
};

Services build_services(const ExperimentConfig& config);

// Embedding + similarity only; enough for IRR and audit evaluation.
std::shared_ptr<sim::SimilarityEngine> build_similarity(const ExperimentConfig& config);

// Runs the pipeline `runs` times over the test split, persists each run's
// label sets, traces and failures under output_dir/runs/run-<n>/, evaluates each
// run against consensus, and writes report.json + report.txt. A run that
// produces zero outputs aborts the experiment.
EvaluationReport run_experiment(const ExperimentConfig& config);

// Audit path: recomputes the report purely from label sets persisted by a
// previous run_experiment; no provider is contacted.
EvaluationReport evaluate_runs(const ExperimentConfig& config);

// Baseline row plus one row per variant, all over the same split and seed.
// A failed variant loses its row; the others proceed. Writes ablation.json
// + ablation.txt.
EvaluationReport run_ablation(const ExperimentConfig& config);

// Pairwise IRR per job category plus an "all" row. Returns an empty report
// (no rows) when no requisition has two raters.
EvaluationReport compute_irr_report(const DatasetBundle& bundle,
                                    const sim::SimilarityEngine& engine,
                                    const metrics::MetricConfig& cfg);

// Merges new sheets into the canonical ratings file (same req_id replaces),
// validating everything before the rewrite. Returns the merged count.
std::size_t ingest_ratings(const ExperimentConfig& config,
                           const std::filesystem::path& new_ratings);

}  // namespace reqcomp::harness
