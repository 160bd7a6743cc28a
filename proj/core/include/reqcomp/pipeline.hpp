// The five-component generation pipeline: primary call, judge/suggest/
// regenerate loop with rule clamping, similarity filter, and library
// validation. Every stage is traced; disabled stages are identities.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reqcomp/llm.hpp"
#include "reqcomp/model.hpp"
#include "reqcomp/prompt.hpp"
#include "reqcomp/similarity.hpp"

namespace reqcomp::pipe {

enum class FewShotMode { Dynamic, Static, ZeroShot };

const char* few_shot_mode_name(FewShotMode mode);
std::optional<FewShotMode> parse_few_shot_mode(std::string_view name);

struct StageModelIds {
    std::string primary = "chat-large";
    std::string evaluate = "chat-large";
    std::string suggest = "chat-large";
    std::string regenerate = "chat-large";
    std::string refine_label = "chat-compact";

    const std::string& for_stage(llm::Stage stage) const;

    bool operator==(const StageModelIds&) const = default;
};

struct PipelineConfig {
    FewShotMode few_shot_mode = FewShotMode::Dynamic;
    std::string static_example_id;  // required in Static mode
    int eval_regen_iterations = 1;
    bool enable_eval_regen = true;
    bool enable_filter = true;
    bool enable_validation = true;
    bool extended_reasoning = false;
    StageModelIds models;
    sim::SimilarityConfig similarity;
    int max_pcs = 5;
    double tau_label = 0.8;  // label cosine above this is confusable
    double tau_def = 0.5;    // combined/definition threshold for replacement
    int max_output = 2000;
    double temperature = 0.0;

    void validate() const;

    bool operator==(const PipelineConfig&) const = default;
};

struct StageSnapshot {
    std::string stage;
    std::vector<CompetencyRecord> records;

    bool operator==(const StageSnapshot&) const = default;
};

struct RemovalAction {
    std::string label;
    std::string cause;  // "redundant" or "out_of_scope"
    std::string counterpart;
    double score = 0.0;

    bool operator==(const RemovalAction&) const = default;
};

struct ValidationAction {
    std::string original_label;
    std::string action;  // "replaced", "relabeled", "unchanged"
    std::string library_label;
    double label_cos = 0.0;
    double def_cos = 0.0;
    double combined = 0.0;
    std::string new_label;  // set for replaced/relabeled

    bool operator==(const ValidationAction&) const = default;
};

struct RuleCorrection {
    std::string label;
    int before = 0;
    int after = 0;
    bool conflict = false;

    bool operator==(const RuleCorrection&) const = default;
};

struct PipelineTrace {
    std::string req_id;
    std::string run_id;
    std::string template_version;
    std::optional<std::string> example_req_id;  // absent == zero-shot
    std::optional<double> example_score;
    std::vector<StageSnapshot> snapshots;  // primary, eval_regen, filter, validation, final
    std::vector<RemovalAction> removals;
    std::vector<ValidationAction> validations;
    std::vector<RuleCorrection> corrections;

    bool operator==(const PipelineTrace&) const = default;
};

std::string trace_to_json(const PipelineTrace& trace);
PipelineTrace trace_from_json(const std::string& text);

struct ReqFailure {
    std::string req_id;
    std::string error;

    bool operator==(const ReqFailure&) const = default;
};

struct BatchResult {
    std::vector<LabelSet> outputs;  // in input req order, failures omitted
    std::vector<PipelineTrace> traces;
    std::vector<ReqFailure> failures;
};

class Pipeline {
public:
    Pipeline(PipelineConfig config, std::shared_ptr<llm::LlmGateway> gateway,
             std::shared_ptr<sim::SimilarityEngine> engine, llm::TemplateSet templates,
             ReferenceLibrary library, std::vector<sim::FewShotExample> examples);

    std::pair<LabelSet, PipelineTrace> run(const Requisition& req,
                                           const std::string& run_id) const;

    // One req fails alone; the batch proceeds. Outputs keep input order.
    BatchResult run_batch(const std::vector<Requisition>& reqs, const std::string& run_id,
                          int workers = 4) const;

    // Stage entry points, exposed for focused tests.
    std::vector<CompetencyRecord> run_primary(const Requisition& req,
                                              PipelineTrace& trace) const;
    std::vector<CompetencyRecord> run_eval_regen(const Requisition& req,
                                                 std::vector<CompetencyRecord> records,
                                                 PipelineTrace& trace) const;
    std::vector<CompetencyRecord> run_filter(std::vector<CompetencyRecord> records,
                                             PipelineTrace& trace) const;
    std::vector<CompetencyRecord> run_validation(const Requisition& req,
                                                 std::vector<CompetencyRecord> records,
                                                 PipelineTrace& trace) const;

    const PipelineConfig& config() const { return config_; }
    const ReferenceLibrary& library() const { return library_; }
    const std::vector<sim::FewShotExample>& examples() const { return examples_; }

private:
    llm::PromptOptions options_for(llm::Stage stage) const;

    PipelineConfig config_;
    std::shared_ptr<llm::LlmGateway> gateway_;
    std::shared_ptr<sim::SimilarityEngine> engine_;
    llm::TemplateSet templates_;
    ReferenceLibrary library_;
    std::vector<sim::FewShotExample> examples_;
};

}  // namespace reqcomp::pipe
