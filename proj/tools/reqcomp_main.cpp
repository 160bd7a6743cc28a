// Command-line front end for the competency pipeline harness.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "reqcomp/errors.hpp"
#include "reqcomp/experiment.hpp"
#include "reqcomp/io.hpp"
#include "reqcomp/log.hpp"
#include "reqcomp/report.hpp"

namespace {

using reqcomp::harness::ExperimentConfig;

struct CommonFlags {
    std::string config_path;
    std::string output_dir;
    int runs = 0;
    int workers = 0;
    std::int64_t seed = 0;
    std::string few_shot_mode;
    bool eval_regen = true;
    bool filter = true;
    bool validation = true;
    bool extended_reasoning = false;
    std::string model_id;

    CLI::Option* o_output = nullptr;
    CLI::Option* o_runs = nullptr;
    CLI::Option* o_workers = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_mode = nullptr;
    CLI::Option* o_eval_regen = nullptr;
    CLI::Option* o_filter = nullptr;
    CLI::Option* o_validation = nullptr;
    CLI::Option* o_extended = nullptr;
    CLI::Option* o_model = nullptr;
};

void add_config_option(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("-c,--config", flags.config_path, "experiment config JSON")
        ->required();
}

void add_overrides(CLI::App* sub, CommonFlags& flags) {
    flags.o_output = sub->add_option("--output-dir", flags.output_dir, "override output directory");
    flags.o_runs = sub->add_option("--runs", flags.runs, "number of pipeline runs");
    flags.o_workers = sub->add_option("--workers", flags.workers, "request-level parallelism");
    flags.o_seed = sub->add_option("--seed", flags.seed, "split seed");
    flags.o_mode =
        sub->add_option("--few-shot-mode", flags.few_shot_mode, "dynamic, static or zero_shot");
    flags.o_eval_regen =
        sub->add_flag("--eval-regen,!--no-eval-regen", flags.eval_regen, "judge/regenerate stage");
    flags.o_filter = sub->add_flag("--filter,!--no-filter", flags.filter, "similarity filter stage");
    flags.o_validation =
        sub->add_flag("--validation,!--no-validation", flags.validation, "library validation stage");
    flags.o_extended = sub->add_flag("--extended-reasoning,!--no-extended-reasoning",
                                     flags.extended_reasoning, "extended reasoning pass-through");
    flags.o_model = sub->add_option("--model-id", flags.model_id,
                                    "model id for the four main pipeline stages");
}

ExperimentConfig load_config(const CommonFlags& flags) {
    ExperimentConfig config = reqcomp::harness::load_experiment_config(flags.config_path);
    if (flags.o_output && flags.o_output->count()) config.output_dir = flags.output_dir;
    if (flags.o_runs && flags.o_runs->count()) config.runs = flags.runs;
    if (flags.o_workers && flags.o_workers->count()) config.workers = flags.workers;
    if (flags.o_seed && flags.o_seed->count()) {
        if (flags.seed < 0) throw reqcomp::ConfigError("--seed must be non-negative");
        config.split.seed = static_cast<std::uint64_t>(flags.seed);
    }
    if (flags.o_mode && flags.o_mode->count()) {
        auto mode = reqcomp::pipe::parse_few_shot_mode(flags.few_shot_mode);
        if (!mode) {
            throw reqcomp::ConfigError("unknown few-shot mode '" + flags.few_shot_mode + "'");
        }
        config.pipeline.few_shot_mode = *mode;
    }
    if (flags.o_eval_regen && flags.o_eval_regen->count()) {
        config.pipeline.enable_eval_regen = flags.eval_regen;
    }
    if (flags.o_filter && flags.o_filter->count()) config.pipeline.enable_filter = flags.filter;
    if (flags.o_validation && flags.o_validation->count()) {
        config.pipeline.enable_validation = flags.validation;
    }
    if (flags.o_extended && flags.o_extended->count()) {
        config.pipeline.extended_reasoning = flags.extended_reasoning;
    }
    if (flags.o_model && flags.o_model->count()) {
        config.pipeline.models.primary = flags.model_id;
        config.pipeline.models.evaluate = flags.model_id;
        config.pipeline.models.suggest = flags.model_id;
        config.pipeline.models.regenerate = flags.model_id;
    }
    config.validate();
    return config;
}

int cmd_split(const CommonFlags& flags) {
    ExperimentConfig config = load_config(flags);
    reqcomp::DatasetBundle bundle = reqcomp::io::load_bundle(config.data);
    reqcomp::harness::split_dataset(bundle, config.split);

    std::size_t train = 0, dev = 0, test = 0;
    nlohmann::ordered_json assignment = nlohmann::ordered_json::object();
    for (const auto& [req_id, split] : bundle.split) {
        assignment[req_id] = reqcomp::split_name(split);
        if (split == reqcomp::Split::Train) ++train;
        if (split == reqcomp::Split::Dev) ++dev;
        if (split == reqcomp::Split::Test) ++test;
    }
    nlohmann::ordered_json doc{
        {"schema_version", 1},
        {"seed", config.split.seed},
        {"fractions",
         {{"train", config.split.train}, {"dev", config.split.dev}, {"test", config.split.test}}},
        {"counts", {{"train", train}, {"dev", dev}, {"test", test}}},
        {"assignment", std::move(assignment)}};

    std::filesystem::create_directories(config.output_dir);
    std::filesystem::path path = config.output_dir / "split.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw reqcomp::ConfigError("cannot write " + path.string());
    out << doc.dump(2) << '\n';

    std::cout << "split " << bundle.split.size() << " reqs: " << train << " train, " << dev
              << " dev, " << test << " test -> " << path.string() << '\n';
    return 0;
}

int cmd_run(const CommonFlags& flags) {
    ExperimentConfig config = load_config(flags);
    reqcomp::harness::EvaluationReport report = reqcomp::harness::run_experiment(config);
    std::cout << reqcomp::harness::report_to_table(report);
    return 0;
}

int cmd_evaluate(const CommonFlags& flags) {
    ExperimentConfig config = load_config(flags);
    reqcomp::harness::EvaluationReport report = reqcomp::harness::evaluate_runs(config);
    std::cout << reqcomp::harness::report_to_table(report);
    return 0;
}

int cmd_irr(const CommonFlags& flags) {
    ExperimentConfig config = load_config(flags);
    reqcomp::DatasetBundle bundle = reqcomp::io::load_bundle(config.data);
    auto engine = reqcomp::harness::build_similarity(config);
    reqcomp::harness::EvaluationReport report =
        reqcomp::harness::compute_irr_report(bundle, *engine, config.metrics);
    if (report.rows.empty()) {
        std::cout << "no requisition has two or more raters; nothing to report\n";
        return 0;
    }
    reqcomp::harness::write_report(report, config.output_dir, "irr");
    std::cout << reqcomp::harness::report_to_table(report);
    return 0;
}

int cmd_ablate(const CommonFlags& flags) {
    ExperimentConfig config = load_config(flags);
    reqcomp::harness::EvaluationReport report = reqcomp::harness::run_ablation(config);
    std::cout << reqcomp::harness::report_to_table(report);
    return 0;
}

int cmd_report(const std::string& json_path, const std::string& out_dir,
               const std::string& basename) {
    reqcomp::harness::EvaluationReport report = reqcomp::harness::load_report(json_path);
    if (!out_dir.empty()) {
        reqcomp::harness::write_report(report, out_dir, basename);
    }
    std::cout << reqcomp::harness::report_to_table(report);
    return 0;
}

int cmd_ingest(const CommonFlags& flags, const std::string& sheets_path) {
    ExperimentConfig config = load_config(flags);
    std::size_t total = reqcomp::harness::ingest_ratings(config, sheets_path);
    std::cout << "ratings file now holds " << total << " sheets\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"requisition competency pipeline and evaluation harness"};
    app.require_subcommand(1);

    CommonFlags split_flags;
    CLI::App* split = app.add_subcommand("split", "assign train/dev/test splits");
    add_config_option(split, split_flags);
    split_flags.o_seed = split->add_option("--seed", split_flags.seed, "split seed");
    split_flags.o_output =
        split->add_option("--output-dir", split_flags.output_dir, "override output directory");

    CommonFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "run the pipeline and evaluate it");
    add_config_option(run, run_flags);
    add_overrides(run, run_flags);

    CommonFlags eval_flags;
    CLI::App* evaluate = app.add_subcommand("evaluate", "recompute the report from persisted runs");
    add_config_option(evaluate, eval_flags);
    eval_flags.o_output =
        evaluate->add_option("--output-dir", eval_flags.output_dir, "override output directory");

    CommonFlags irr_flags;
    CLI::App* irr = app.add_subcommand("irr", "inter-rater reliability table");
    add_config_option(irr, irr_flags);
    irr_flags.o_output =
        irr->add_option("--output-dir", irr_flags.output_dir, "override output directory");

    CommonFlags ablate_flags;
    CLI::App* ablate = app.add_subcommand("ablate", "baseline plus configured variants");
    add_config_option(ablate, ablate_flags);
    add_overrides(ablate, ablate_flags);

    std::string report_json, report_out, report_basename = "report";
    CLI::App* report = app.add_subcommand("report", "render a persisted report");
    report->add_option("json", report_json, "report JSON file")->required();
    report->add_option("--out", report_out, "also write .json/.txt into this directory");
    report->add_option("--basename", report_basename, "basename for --out files");

    CommonFlags ingest_flags;
    std::string ingest_path;
    CLI::App* ingest = app.add_subcommand("ingest-ratings", "merge SME rating sheets");
    add_config_option(ingest, ingest_flags);
    ingest->add_option("sheets", ingest_path, "rating sheets JSONL")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (split->parsed()) return cmd_split(split_flags);
        if (run->parsed()) return cmd_run(run_flags);
        if (evaluate->parsed()) return cmd_evaluate(eval_flags);
        if (irr->parsed()) return cmd_irr(irr_flags);
        if (ablate->parsed()) return cmd_ablate(ablate_flags);
        if (report->parsed()) return cmd_report(report_json, report_out, report_basename);
        if (ingest->parsed()) return cmd_ingest(ingest_flags, ingest_path);
    } catch (const reqcomp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const reqcomp::ProviderError& e) {
        std::cerr << "provider error: " << e.what() << '\n';
        return 2;
    } catch (const reqcomp::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
