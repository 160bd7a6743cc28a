#include "reqcomp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "json_codec.hpp"
#include "reqcomp/errors.hpp"
#include "reqcomp/log.hpp"
#include "reqcomp/rules.hpp"
#include "reqcomp/wire.hpp"

namespace reqcomp::pipe {

namespace {

using detail::ordered_json;

std::vector<CompetencyRecord> parse_records_tagged(llm::Stage stage, const std::string& text) {
    try {
        return wire::parse_competency_output(text);
    } catch (const OutputParseError& e) {
        throw OutputParseError(std::string(llm::stage_name(stage)) + " stage: " + e.what());
    }
}

void truncate_to(std::vector<CompetencyRecord>& records, int max_pcs) {
    if (records.size() > static_cast<std::size_t>(max_pcs)) {
        records.resize(static_cast<std::size_t>(max_pcs));
    }
}

}  // namespace

const char* few_shot_mode_name(FewShotMode mode) {
    switch (mode) {
        case FewShotMode::Dynamic: return "dynamic";
        case FewShotMode::Static: return "static";
        case FewShotMode::ZeroShot: return "zero_shot";
    }
    return "?";
}

std::optional<FewShotMode> parse_few_shot_mode(std::string_view name) {
    if (name == "dynamic") return FewShotMode::Dynamic;
    if (name == "static") return FewShotMode::Static;
    if (name == "zero_shot") return FewShotMode::ZeroShot;
    return std::nullopt;
}

const std::string& StageModelIds::for_stage(llm::Stage stage) const {
    switch (stage) {
        case llm::Stage::Primary: return primary;
        case llm::Stage::Evaluate: return evaluate;
        case llm::Stage::Suggest: return suggest;
        case llm::Stage::Regenerate: return regenerate;
        case llm::Stage::RefineLabel: return refine_label;
    }
    return primary;
}

void PipelineConfig::validate() const {
    if (few_shot_mode == FewShotMode::Static && static_example_id.empty()) {
        throw ConfigError("static few-shot mode requires static_example_id");
    }
    if (eval_regen_iterations < 0) throw ConfigError("eval_regen_iterations must be >= 0");
    similarity.validate();
    if (max_pcs < 1) throw ConfigError("max_pcs must be >= 1");
    if (tau_label < 0.0 || tau_label > 1.0 || tau_def < 0.0 || tau_def > 1.0) {
        throw ConfigError("validation thresholds must be in [0, 1]");
    }
    if (max_output < 1) throw ConfigError("max_output must be >= 1");
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<llm::LlmGateway> gateway,
                   std::shared_ptr<sim::SimilarityEngine> engine, llm::TemplateSet templates,
                   ReferenceLibrary library, std::vector<sim::FewShotExample> examples)
    : config_(std::move(config)),
      gateway_(std::move(gateway)),
      engine_(std::move(engine)),
      templates_(std::move(templates)),
      library_(std::move(library)),
      examples_(std::move(examples)) {
    config_.validate();
    if (!gateway_) throw ConfigError("pipeline requires a gateway");
    if (!engine_) throw ConfigError("pipeline requires a similarity engine");
    validate(library_);
    for (const sim::FewShotExample& example : examples_) {
        validate(example.req);
        for (const CompetencyRecord& record : example.records) validate(record);
    }
}

llm::PromptOptions Pipeline::options_for(llm::Stage stage) const {
    llm::PromptOptions options;
    options.model_id = config_.models.for_stage(stage);
    options.extended_reasoning = config_.extended_reasoning;
    options.max_output = config_.max_output;
    options.temperature = config_.temperature;
    options.max_pcs = config_.max_pcs;
    return options;
}

std::vector<CompetencyRecord> Pipeline::run_primary(const Requisition& req,
                                                    PipelineTrace& trace) const {
    const sim::FewShotExample* example = nullptr;
    switch (config_.few_shot_mode) {
        case FewShotMode::Dynamic: {
            auto selected =
                engine_->select_example(req, examples_, config_.similarity.threshold);
            if (selected) {
                example = &examples_[selected->index];
                trace.example_req_id = example->req.req_id;
                trace.example_score = selected->score;
            }
            break;
        }
        case FewShotMode::Static: {
            for (const sim::FewShotExample& candidate : examples_) {
                if (candidate.req.req_id == config_.static_example_id) {
                    example = &candidate;
                    break;
                }
            }
            if (example == nullptr) {
                throw ConfigError("static example '" + config_.static_example_id +
                                  "' is not in the example library");
            }
            trace.example_req_id = example->req.req_id;
            break;
        }
        case FewShotMode::ZeroShot:
            break;
    }

    llm::PromptContext context;
    context.example = example;
    context.library = &library_;
    llm::PromptSpec spec = llm::assemble_prompt(llm::Stage::Primary, req, context, templates_,
                                                options_for(llm::Stage::Primary));
    std::string text = gateway_->complete(spec);
    std::vector<CompetencyRecord> records = parse_records_tagged(llm::Stage::Primary, text);
    truncate_to(records, config_.max_pcs);
    return records;
}

std::vector<CompetencyRecord> Pipeline::run_eval_regen(const Requisition& req,
                                                       std::vector<CompetencyRecord> records,
                                                       PipelineTrace& trace) const {
    if (records.empty()) return records;

    for (int iteration = 0; iteration < config_.eval_regen_iterations; ++iteration) {
        llm::PromptContext eval_context;
        eval_context.candidates = &records;
        eval_context.library = &library_;
        llm::PromptSpec eval_spec = llm::assemble_prompt(
            llm::Stage::Evaluate, req, eval_context, templates_, options_for(llm::Stage::Evaluate));
        std::vector<llm::PcVerdicts> verdicts;
        try {
            verdicts = wire::parse_verdicts(gateway_->complete(eval_spec));
        } catch (const OutputParseError& e) {
            throw OutputParseError(std::string("evaluate stage: ") + e.what());
        }

        std::map<std::string, const llm::PcVerdicts*> by_label;
        for (const llm::PcVerdicts& v : verdicts) {
            if (!by_label.emplace(v.label, &v).second) {
                throw OutputParseError("evaluate stage: duplicate verdict for '" + v.label + "'");
            }
        }
        bool flagged = false;
        for (const CompetencyRecord& record : records) {
            auto it = by_label.find(record.label);
            if (it == by_label.end()) {
                throw OutputParseError("evaluate stage: no verdict for '" + record.label + "'");
            }
            if (!it->second->all_passed()) flagged = true;
        }
        for (const llm::PcVerdicts& v : verdicts) {
            bool known = false;
            for (const CompetencyRecord& record : records) {
                if (record.label == v.label) {
                    known = true;
                    break;
                }
            }
            if (!known) {
                throw OutputParseError("evaluate stage: verdict for unknown label '" + v.label +
                                       "'");
            }
        }
        if (!flagged) break;

        llm::PromptContext suggest_context;
        suggest_context.candidates = &records;
        suggest_context.verdicts = &verdicts;
        llm::PromptSpec suggest_spec =
            llm::assemble_prompt(llm::Stage::Suggest, req, suggest_context, templates_,
                                 options_for(llm::Stage::Suggest));
        std::vector<llm::ImprovementSuggestion> suggestions;
        try {
            suggestions = wire::parse_suggestions(gateway_->complete(suggest_spec));
        } catch (const OutputParseError& e) {
            throw OutputParseError(std::string("suggest stage: ") + e.what());
        }
        llm::StageEvaluation evaluation{verdicts, suggestions};
        try {
            evaluation.validate();
        } catch (const ValidationError& e) {
            throw OutputParseError(std::string("suggest stage: ") + e.what());
        }

        llm::PromptContext regen_context;
        regen_context.candidates = &records;
        regen_context.suggestions = &suggestions;
        llm::PromptSpec regen_spec =
            llm::assemble_prompt(llm::Stage::Regenerate, req, regen_context, templates_,
                                 options_for(llm::Stage::Regenerate));
        records = parse_records_tagged(llm::Stage::Regenerate, gateway_->complete(regen_spec));
        truncate_to(records, config_.max_pcs);
        if (records.empty()) break;
    }

    for (CompetencyRecord& record : records) {
        rules::EnforceResult enforced = rules::enforce_priority(record);
        if (enforced.corrected || enforced.conflict) {
            trace.corrections.push_back(RuleCorrection{record.label, record.priority,
                                                       enforced.record.priority,
                                                       enforced.conflict});
        }
        record = enforced.record;
    }
    return records;
}

std::vector<CompetencyRecord> Pipeline::run_filter(std::vector<CompetencyRecord> records,
                                                   PipelineTrace& trace) const {
    records = rules::rank_competencies(std::move(records));

    std::vector<CompetencyRecord> kept;
    for (const CompetencyRecord& record : records) {
        bool removed = false;
        for (const CompetencyRecord& keeper : kept) {
            double score = engine_->pc_similarity(record, keeper);
            if (score > config_.similarity.threshold) {
                trace.removals.push_back(
                    RemovalAction{record.label, "redundant", keeper.label, score});
                removed = true;
                break;
            }
        }
        if (!removed) kept.push_back(record);
    }

    std::vector<CompetencyRecord> in_scope;
    for (const CompetencyRecord& record : kept) {
        bool removed = false;
        for (const CompetencyRecord& excluded : library_.excluded_pcs) {
            double score = engine_->pc_similarity(record, excluded);
            if (score > config_.similarity.threshold) {
                trace.removals.push_back(
                    RemovalAction{record.label, "out_of_scope", excluded.label, score});
                removed = true;
                break;
            }
        }
        if (!removed) in_scope.push_back(record);
    }
    return in_scope;
}

std::vector<CompetencyRecord> Pipeline::run_validation(const Requisition& req,
                                                       std::vector<CompetencyRecord> records,
                                                       PipelineTrace& trace) const {
    if (library_.library_pcs.empty()) return records;

    for (CompetencyRecord& record : records) {
        const CompetencyRecord* best = nullptr;
        sim::SimilarityParts best_parts;
        for (const CompetencyRecord& library_pc : library_.library_pcs) {
            sim::SimilarityParts parts = engine_->pc_similarity_parts(record, library_pc);
            if (best == nullptr || parts.combined > best_parts.combined) {
                best = &library_pc;
                best_parts = parts;
            }
        }

        ValidationAction action;
        action.original_label = record.label;
        action.library_label = best->label;
        action.label_cos = best_parts.label_cos;
        action.def_cos = best_parts.def_cos;
        action.combined = best_parts.combined;

        if (best_parts.combined > config_.tau_def) {
            record.label = best->label;
            record.definition = best->definition;
            action.action = "replaced";
            action.new_label = record.label;
        } else if (best_parts.label_cos > config_.tau_label &&
                   best_parts.def_cos <= config_.tau_def) {
            llm::PromptContext context;
            context.refine_target = &record;
            context.library_conflict = best;
            llm::PromptSpec spec =
                llm::assemble_prompt(llm::Stage::RefineLabel, req, context, templates_,
                                     options_for(llm::Stage::RefineLabel));
            std::string refined;
            try {
                refined = wire::parse_refined_label(gateway_->complete(spec));
            } catch (const OutputParseError& e) {
                throw OutputParseError(std::string("refine_label stage: ") + e.what());
            }
            if (refined == best->label) {
                throw OutputParseError(
                    "refine_label stage: refined label equals the conflicting library label '" +
                    refined + "'");
            }
            record.label = refined;
            try {
                validate(record);
            } catch (const ValidationError& e) {
                throw OutputParseError(std::string("refine_label stage: ") + e.what());
            }
            action.action = "relabeled";
            action.new_label = refined;
        } else {
            action.action = "unchanged";
        }
        trace.validations.push_back(std::move(action));
    }
    return records;
}

std::pair<LabelSet, PipelineTrace> Pipeline::run(const Requisition& req,
                                                 const std::string& run_id) const {
    validate(req);

    PipelineTrace trace;
    trace.req_id = req.req_id;
    trace.run_id = run_id;
    trace.template_version = templates_.version();

    auto snapshot = [&trace](const char* stage, const std::vector<CompetencyRecord>& records) {
        trace.snapshots.push_back(StageSnapshot{stage, records});
    };

    std::vector<CompetencyRecord> records = run_primary(req, trace);
    snapshot("primary", records);

    if (config_.enable_eval_regen) {
        records = run_eval_regen(req, std::move(records), trace);
    }
    snapshot("eval_regen", records);

    if (config_.enable_filter) {
        records = run_filter(std::move(records), trace);
    }
    snapshot("filter", records);

    if (config_.enable_validation) {
        records = run_validation(req, std::move(records), trace);
    }
    snapshot("validation", records);

    records = rules::rank_competencies(std::move(records));
    snapshot("final", records);

    LabelSet out;
    out.req_id = req.req_id;
    out.source = Source::model_run(run_id);
    out.records = std::move(records);
    return {std::move(out), std::move(trace)};
}

BatchResult Pipeline::run_batch(const std::vector<Requisition>& reqs, const std::string& run_id,
                                int workers) const {
    if (workers < 1) throw ConfigError("run_batch needs workers >= 1");

    std::vector<std::optional<std::pair<LabelSet, PipelineTrace>>> results(reqs.size());
    std::vector<std::optional<ReqFailure>> failures(reqs.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= reqs.size()) return;
            try {
                results[i] = run(reqs[i], run_id);
            } catch (const std::exception& e) {
                failures[i] = ReqFailure{reqs[i].req_id, e.what()};
            }
        }
    };

    std::size_t thread_count =
        std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(reqs.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < thread_count; ++t) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    BatchResult out;
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        if (results[i]) {
            out.outputs.push_back(std::move(results[i]->first));
            out.traces.push_back(std::move(results[i]->second));
        } else if (failures[i]) {
            log(LogLevel::Warn, "req " + failures[i]->req_id + " failed: " + failures[i]->error);
            out.failures.push_back(std::move(*failures[i]));
        }
    }
    return out;
}

namespace {

ordered_json snapshot_to_json(const StageSnapshot& snapshot) {
    ordered_json records = ordered_json::array();
    for (const CompetencyRecord& record : snapshot.records) {
        records.push_back(detail::to_json(record));
    }
    return ordered_json{{"stage", snapshot.stage}, {"records", std::move(records)}};
}

ordered_json removal_to_json(const RemovalAction& removal) {
    return ordered_json{{"label", removal.label},
                        {"cause", removal.cause},
                        {"counterpart", removal.counterpart},
                        {"score", removal.score}};
}

ordered_json validation_to_json(const ValidationAction& validation) {
    ordered_json out{{"original_label", validation.original_label},
                     {"action", validation.action},
                     {"library_label", validation.library_label},
                     {"label_cos", validation.label_cos},
                     {"def_cos", validation.def_cos},
                     {"combined", validation.combined}};
    if (!validation.new_label.empty()) out["new_label"] = validation.new_label;
    return out;
}

ordered_json correction_to_json(const RuleCorrection& correction) {
    return ordered_json{{"label", correction.label},
                        {"before", correction.before},
                        {"after", correction.after},
                        {"conflict", correction.conflict}};
}

}  // namespace

std::string trace_to_json(const PipelineTrace& trace) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["req_id"] = trace.req_id;
    doc["run_id"] = trace.run_id;
    doc["template_version"] = trace.template_version;
    if (trace.example_req_id) {
        doc["example_req_id"] = *trace.example_req_id;
        if (trace.example_score) doc["example_score"] = *trace.example_score;
    }
    doc["snapshots"] = ordered_json::array();
    for (const StageSnapshot& snapshot : trace.snapshots) {
        doc["snapshots"].push_back(snapshot_to_json(snapshot));
    }
    doc["removals"] = ordered_json::array();
    for (const RemovalAction& removal : trace.removals) {
        doc["removals"].push_back(removal_to_json(removal));
    }
    doc["validations"] = ordered_json::array();
    for (const ValidationAction& validation : trace.validations) {
        doc["validations"].push_back(validation_to_json(validation));
    }
    doc["corrections"] = ordered_json::array();
    for (const RuleCorrection& correction : trace.corrections) {
        doc["corrections"].push_back(correction_to_json(correction));
    }
    return doc.dump();
}

PipelineTrace trace_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("trace is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("trace must be a JSON object");
    detail::require_schema_version(doc, 1);

    PipelineTrace trace;
    trace.req_id = detail::require_string(doc, "req_id");
    trace.run_id = detail::require_string(doc, "run_id");
    trace.template_version = detail::require_string(doc, "template_version");
    if (doc.contains("example_req_id")) {
        trace.example_req_id = detail::require_string(doc, "example_req_id");
        if (doc.contains("example_score")) {
            if (!doc["example_score"].is_number()) {
                throw ValidationError("trace example_score must be a number");
            }
            trace.example_score = doc["example_score"].get<double>();
        }
    }

    const auto& snapshots = detail::require_field(doc, "snapshots");
    if (!snapshots.is_array()) throw ValidationError("trace snapshots must be an array");
    for (const auto& entry : snapshots) {
        StageSnapshot snapshot;
        snapshot.stage = detail::require_string(entry, "stage");
        const auto& records = detail::require_field(entry, "records");
        if (!records.is_array()) throw ValidationError("snapshot records must be an array");
        for (const auto& record : records) {
            snapshot.records.push_back(detail::record_from_json(record));
        }
        trace.snapshots.push_back(std::move(snapshot));
    }

    const auto& removals = detail::require_field(doc, "removals");
    if (!removals.is_array()) throw ValidationError("trace removals must be an array");
    for (const auto& entry : removals) {
        RemovalAction removal;
        removal.label = detail::require_string(entry, "label");
        removal.cause = detail::require_string(entry, "cause");
        removal.counterpart = detail::require_string(entry, "counterpart");
        const auto& score = detail::require_field(entry, "score");
        if (!score.is_number()) throw ValidationError("removal score must be a number");
        removal.score = score.get<double>();
        trace.removals.push_back(std::move(removal));
    }

    const auto& validations = detail::require_field(doc, "validations");
    if (!validations.is_array()) throw ValidationError("trace validations must be an array");
    for (const auto& entry : validations) {
        ValidationAction validation;
        validation.original_label = detail::require_string(entry, "original_label");
        validation.action = detail::require_string(entry, "action");
        validation.library_label = detail::require_string(entry, "library_label");
        for (const char* key : {"label_cos", "def_cos", "combined"}) {
            const auto& value = detail::require_field(entry, key);
            if (!value.is_number()) {
                throw ValidationError(std::string("validation ") + key + " must be a number");
            }
        }
        validation.label_cos = entry["label_cos"].get<double>();
        validation.def_cos = entry["def_cos"].get<double>();
        validation.combined = entry["combined"].get<double>();
        if (entry.contains("new_label")) {
            validation.new_label = detail::require_string(entry, "new_label");
        }
        trace.validations.push_back(std::move(validation));
    }

    const auto& corrections = detail::require_field(doc, "corrections");
    if (!corrections.is_array()) throw ValidationError("trace corrections must be an array");
    for (const auto& entry : corrections) {
        RuleCorrection correction;
        correction.label = detail::require_string(entry, "label");
        correction.before = detail::require_int(entry, "before");
        correction.after = detail::require_int(entry, "after");
        correction.conflict = detail::require_bool(entry, "conflict");
        trace.corrections.push_back(std::move(correction));
    }
    return trace;
}

}  // namespace reqcomp::pipe
