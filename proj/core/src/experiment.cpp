#include "reqcomp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reqcomp/errors.hpp"
#include "reqcomp/log.hpp"
#include "reqcomp/util.hpp"

namespace reqcomp::harness {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Strict object walker: every key must be consumed exactly once.
class ObjectReader {
public:
    ObjectReader(const ordered_json& obj, std::string context)
        : obj_(obj), context_(std::move(context)) {
        if (!obj.is_object()) throw ConfigError(context_ + " must be a JSON object");
    }

    const ordered_json* take(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string take_string(const std::string& key, const std::string& fallback) {
        const ordered_json* value = take(key);
        if (!value) return fallback;
        if (!value->is_string()) throw ConfigError(context_ + "." + key + " must be a string");
        return value->get<std::string>();
    }

    int take_int(const std::string& key, int fallback) {
        const ordered_json* value = take(key);
        if (!value) return fallback;
        if (!value->is_number_integer()) {
            throw ConfigError(context_ + "." + key + " must be an integer");
        }
        return value->get<int>();
    }

    double take_double(const std::string& key, double fallback) {
        const ordered_json* value = take(key);
        if (!value) return fallback;
        if (!value->is_number()) throw ConfigError(context_ + "." + key + " must be a number");
        return value->get<double>();
    }

    bool take_bool(const std::string& key, bool fallback) {
        const ordered_json* value = take(key);
        if (!value) return fallback;
        if (!value->is_boolean()) throw ConfigError(context_ + "." + key + " must be a boolean");
        return value->get<bool>();
    }

    std::optional<bool> take_optional_bool(const std::string& key) {
        const ordered_json* value = take(key);
        if (!value) return std::nullopt;
        if (!value->is_boolean()) throw ConfigError(context_ + "." + key + " must be a boolean");
        return value->get<bool>();
    }

    void finish() {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError(context_ + " has unknown key '" + key + "'");
            }
        }
    }

    const std::string& context() const { return context_; }

private:
    const ordered_json& obj_;
    std::string context_;
    std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& root, const std::string& value) {
    if (value.empty()) return {};
    std::filesystem::path p(value);
    return p.is_absolute() ? p : root / p;
}

pipe::FewShotMode parse_mode_or_throw(const std::string& text, const std::string& context) {
    auto mode = pipe::parse_few_shot_mode(text);
    if (!mode) throw ConfigError(context + ": unknown few-shot mode '" + text + "'");
    return *mode;
}

void read_pipeline(const ordered_json& obj, pipe::PipelineConfig& cfg) {
    ObjectReader reader(obj, "pipeline");
    if (const ordered_json* mode = reader.take("few_shot_mode")) {
        if (!mode->is_string()) throw ConfigError("pipeline.few_shot_mode must be a string");
        cfg.few_shot_mode = parse_mode_or_throw(mode->get<std::string>(), "pipeline.few_shot_mode");
    }
    cfg.static_example_id = reader.take_string("static_example_id", cfg.static_example_id);
    cfg.eval_regen_iterations =
        reader.take_int("eval_regen_iterations", cfg.eval_regen_iterations);
    cfg.enable_eval_regen = reader.take_bool("enable_eval_regen", cfg.enable_eval_regen);
    cfg.enable_filter = reader.take_bool("enable_filter", cfg.enable_filter);
    cfg.enable_validation = reader.take_bool("enable_validation", cfg.enable_validation);
    cfg.extended_reasoning = reader.take_bool("extended_reasoning", cfg.extended_reasoning);
    if (const ordered_json* models = reader.take("models")) {
        ObjectReader m(*models, "pipeline.models");
        cfg.models.primary = m.take_string("primary", cfg.models.primary);
        cfg.models.evaluate = m.take_string("evaluate", cfg.models.evaluate);
        cfg.models.suggest = m.take_string("suggest", cfg.models.suggest);
        cfg.models.regenerate = m.take_string("regenerate", cfg.models.regenerate);
        cfg.models.refine_label = m.take_string("refine_label", cfg.models.refine_label);
        m.finish();
    }
    if (const ordered_json* similarity = reader.take("similarity")) {
        ObjectReader s(*similarity, "pipeline.similarity");
        cfg.similarity.w_label = s.take_double("w_label", cfg.similarity.w_label);
        cfg.similarity.w_def = s.take_double("w_def", cfg.similarity.w_def);
        cfg.similarity.threshold = s.take_double("threshold", cfg.similarity.threshold);
        s.finish();
    }
    cfg.max_pcs = reader.take_int("max_pcs", cfg.max_pcs);
    cfg.tau_label = reader.take_double("tau_label", cfg.tau_label);
    cfg.tau_def = reader.take_double("tau_def", cfg.tau_def);
    cfg.max_output = reader.take_int("max_output", cfg.max_output);
    cfg.temperature = reader.take_double("temperature", cfg.temperature);
    reader.finish();
}

void read_metrics(const ordered_json& obj, metrics::MetricConfig& cfg) {
    ObjectReader reader(obj, "metrics");
    cfg.persistence = reader.take_double("persistence", cfg.persistence);
    cfg.scale_range = reader.take_double("scale_range", cfg.scale_range);
    cfg.match_threshold = reader.take_double("match_threshold", cfg.match_threshold);
    cfg.top1_min_priority = reader.take_int("top1_min_priority", cfg.top1_min_priority);
    if (const ordered_json* mode = reader.take("denominator_mode")) {
        if (!mode->is_string()) throw ConfigError("metrics.denominator_mode must be a string");
        std::string text = mode->get<std::string>();
        if (text == "count_as_miss") {
            cfg.denominator_mode = metrics::DenominatorMode::CountAsMiss;
        } else if (text == "exclude") {
            cfg.denominator_mode = metrics::DenominatorMode::Exclude;
        } else {
            throw ConfigError("metrics.denominator_mode: unknown mode '" + text + "'");
        }
    }
    cfg.sme_acceptance_level = reader.take_int("sme_acceptance_level", cfg.sme_acceptance_level);
    reader.finish();
}

void read_gateway(const ordered_json& obj, llm::GatewayOptions& options) {
    ObjectReader reader(obj, "gateway");
    options.max_attempts = reader.take_int("max_attempts", options.max_attempts);
    options.backoff_ms = reader.take_int("backoff_ms", options.backoff_ms);
    options.max_in_flight = reader.take_int("max_in_flight", options.max_in_flight);
    reader.finish();
}

void read_provider(const ordered_json& obj, const std::filesystem::path& root,
                   ProviderConfig& provider) {
    ObjectReader reader(obj, "provider");
    std::string kind = reader.take_string("kind", "mock");
    if (kind == "mock") {
        provider.kind = ProviderConfig::Kind::Mock;
        provider.fixture = resolve(root, reader.take_string("fixture", ""));
        if (provider.fixture.empty()) throw ConfigError("provider.fixture is required for mock");
    } else if (kind == "http") {
        provider.kind = ProviderConfig::Kind::Http;
        provider.http.base_url = reader.take_string("base_url", "");
        if (provider.http.base_url.empty()) {
            throw ConfigError("provider.base_url is required for http");
        }
        provider.http.path = reader.take_string("path", provider.http.path);
        provider.http.api_key_env = reader.take_string("api_key_env", "");
        provider.http.timeout_sec = reader.take_int("timeout_sec", provider.http.timeout_sec);
        provider.http.extended_reasoning_supported = reader.take_bool(
            "extended_reasoning", provider.http.extended_reasoning_supported);
    } else {
        throw ConfigError("provider.kind must be 'mock' or 'http', got '" + kind + "'");
    }
    reader.finish();
}

void read_embedding(const ordered_json& obj, EmbeddingConfig& embedding) {
    ObjectReader reader(obj, "embedding");
    std::string kind = reader.take_string("kind", "hash");
    if (kind == "hash") {
        embedding.kind = EmbeddingConfig::Kind::Hash;
        int dim = reader.take_int("dim", static_cast<int>(embedding.dim));
        if (dim <= 0) throw ConfigError("embedding.dim must be positive");
        embedding.dim = static_cast<std::size_t>(dim);
    } else if (kind == "http") {
        embedding.kind = EmbeddingConfig::Kind::Http;
        embedding.http.base_url = reader.take_string("base_url", "");
        if (embedding.http.base_url.empty()) {
            throw ConfigError("embedding.base_url is required for http");
        }
        embedding.http.path = reader.take_string("path", embedding.http.path);
        embedding.http.api_key_env = reader.take_string("api_key_env", "");
        embedding.http.dim = static_cast<std::size_t>(
            reader.take_int("dim", static_cast<int>(embedding.http.dim)));
        embedding.http.max_attempts = reader.take_int("max_attempts", embedding.http.max_attempts);
        embedding.http.backoff_ms = reader.take_int("backoff_ms", embedding.http.backoff_ms);
        embedding.http.timeout_sec = reader.take_int("timeout_sec", embedding.http.timeout_sec);
    } else {
        throw ConfigError("embedding.kind must be 'hash' or 'http', got '" + kind + "'");
    }
    reader.finish();
}

AblationVariant read_variant(const ordered_json& obj, std::size_t index) {
    std::string context = "variants[" + std::to_string(index) + "]";
    ObjectReader reader(obj, context);
    AblationVariant variant;
    variant.name = reader.take_string("name", "");
    if (const ordered_json* mode = reader.take("few_shot_mode")) {
        if (!mode->is_string()) throw ConfigError(context + ".few_shot_mode must be a string");
        variant.few_shot_mode =
            parse_mode_or_throw(mode->get<std::string>(), context + ".few_shot_mode");
    }
    variant.enable_eval_regen = reader.take_optional_bool("enable_eval_regen");
    variant.enable_filter = reader.take_optional_bool("enable_filter");
    variant.enable_validation = reader.take_optional_bool("enable_validation");
    variant.extended_reasoning = reader.take_optional_bool("extended_reasoning");
    if (const ordered_json* model = reader.take("model_id")) {
        if (!model->is_string()) throw ConfigError(context + ".model_id must be a string");
        variant.model_id = model->get<std::string>();
    }
    reader.finish();
    variant.validate();
    return variant;
}

// Largest-remainder apportionment of n over the three fractions; ties go to
// the earlier split.
std::array<std::size_t, 3> apportion(std::size_t n, const SplitSpec& spec) {
    std::array<double, 3> fractions = {spec.train, spec.dev, spec.test};
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        double exact = fractions[i] * static_cast<double>(n);
        sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        remainders[i] = exact - static_cast<double>(sizes[i]);
        assigned += sizes[i];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&remainders](std::size_t a, std::size_t b) {
        return remainders[a] > remainders[b];
    });
    for (std::size_t i = 0; assigned < n; ++i) {
        ++sizes[order[i % 3]];
        ++assigned;
    }
    return sizes;
}

std::string run_dir_name(int run) { return "run-" + std::to_string(run); }

std::shared_ptr<sim::EmbeddingService> build_embedding_service(const ExperimentConfig& config) {
    std::shared_ptr<sim::EmbeddingProvider> embedder;
    if (config.embedding.kind == EmbeddingConfig::Kind::Hash) {
        embedder = std::make_shared<sim::HashEmbeddingProvider>(config.embedding.dim);
    } else {
        embedder = std::make_shared<sim::HttpEmbeddingProvider>(config.embedding.http);
    }
    return std::make_shared<sim::EmbeddingService>(std::move(embedder));
}

void save_failures(const std::vector<pipe::ReqFailure>& failures,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (const pipe::ReqFailure& failure : failures) {
        ordered_json line{{"schema_version", 1},
                          {"req_id", failure.req_id},
                          {"error", failure.error}};
        out << line.dump() << '\n';
    }
}

void save_traces(const std::vector<pipe::PipelineTrace>& traces,
                 const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (const pipe::PipelineTrace& trace : traces) out << pipe::trace_to_json(trace) << '\n';
}

// Evaluates one run's outputs against consensus, grouped by job category
// plus an "all" group. Missing consensus drops the req with a warning.
struct GroupedEvals {
    std::map<std::string, std::vector<metrics::ReqEval>> by_group;
};

GroupedEvals evaluate_outputs(const std::vector<LabelSet>& outputs, const DatasetBundle& bundle,
                              const sim::SimilarityEngine& engine,
                              const metrics::MetricConfig& cfg) {
    GroupedEvals evals;
    for (const LabelSet& output : outputs) {
        const LabelSet* truth = bundle.consensus(output.req_id);
        if (!truth) {
            log(LogLevel::Warn,
                "req " + output.req_id + " has no consensus label set; excluded from evaluation");
            continue;
        }
        const Requisition* req = bundle.find_requisition(output.req_id);
        metrics::ReqEval eval = metrics::evaluate_req(output, *truth, engine, cfg);
        evals.by_group["all"].push_back(eval);
        if (req) evals.by_group[req->job_category].push_back(std::move(eval));
    }
    return evals;
}

void append_metric(std::map<std::string, std::vector<double>>& columns, const std::string& name,
                   const std::optional<double>& value) {
    if (value) columns[name].push_back(*value);
}

// Collapses per-run metric values into one report row per group. A metric
// missing from some runs aggregates over the runs that have it.
std::vector<ReportRow> build_rows(
    const std::map<std::string, std::vector<metrics::MetricValues>>& per_group,
    const std::map<std::string, std::size_t>& group_reqs) {
    std::vector<ReportRow> rows;
    for (const auto& [group, run_values] : per_group) {
        ReportRow row;
        row.group = group;
        row.runs = run_values.size();
        auto reqs = group_reqs.find(group);
        row.reqs = reqs == group_reqs.end() ? 0 : reqs->second;
        std::map<std::string, std::vector<double>> columns;
        for (const metrics::MetricValues& values : run_values) {
            append_metric(columns, "top1", values.top1);
            append_metric(columns, "top2", values.top2);
            append_metric(columns, "top3", values.top3);
            append_metric(columns, "ra", values.ra);
            append_metric(columns, "ra_norm", values.ra_norm);
            append_metric(columns, "pa", values.pa);
            append_metric(columns, "ca", values.ca);
        }
        for (const auto& [name, samples] : columns) {
            row.cells[name] = metrics::aggregate_runs(samples);
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
        if (a.group == "all") return true;
        if (b.group == "all") return false;
        return a.group < b.group;
    });
    return rows;
}

EvaluationReport report_from_runs(
    const std::string& title,
    const std::vector<std::vector<LabelSet>>& run_outputs, const DatasetBundle& bundle,
    const sim::SimilarityEngine& engine, const metrics::MetricConfig& cfg) {
    std::map<std::string, std::vector<metrics::MetricValues>> per_group;
    std::map<std::string, std::size_t> group_reqs;
    for (const std::vector<LabelSet>& outputs : run_outputs) {
        GroupedEvals evals = evaluate_outputs(outputs, bundle, engine, cfg);
        for (const auto& [group, reqs] : evals.by_group) {
            per_group[group].push_back(metrics::compute_metrics(reqs, cfg));
            group_reqs[group] = std::max(group_reqs[group], reqs.size());
        }
    }
    EvaluationReport report;
    report.title = title;
    report.columns = kMetricColumns;
    report.rows = build_rows(per_group, group_reqs);
    return report;
}

DatasetBundle load_and_split(const ExperimentConfig& config) {
    DatasetBundle bundle = io::load_bundle(config.data);
    split_dataset(bundle, config.split);
    return bundle;
}

std::vector<Requisition> test_requisitions(const DatasetBundle& bundle) {
    std::vector<Requisition> reqs;
    for (const Requisition* req : bundle.requisitions_in(Split::Test)) reqs.push_back(*req);
    return reqs;
}

// One experiment pass with an explicit pipeline config (the ablation runner
// swaps configs per variant).
std::vector<std::vector<LabelSet>> execute_runs(const ExperimentConfig& config,
                                                const pipe::PipelineConfig& pipeline_cfg,
                                                const Services& services,
                                                const DatasetBundle& bundle,
                                                const std::filesystem::path& runs_dir) {
    std::vector<Requisition> reqs = test_requisitions(bundle);
    if (reqs.empty()) throw ValidationError("test split is empty");
    pipe::Pipeline pipeline(pipeline_cfg, services.gateway, services.similarity,
                            services.templates, bundle.library, train_examples(bundle));
    std::vector<std::vector<LabelSet>> run_outputs;
    for (int run = 1; run <= config.runs; ++run) {
        std::string run_id = run_dir_name(run);
        pipe::BatchResult batch = pipeline.run_batch(reqs, run_id, config.workers);
        if (batch.outputs.empty()) {
            throw ProviderError("run " + run_id + " produced no outputs (" +
                                std::to_string(batch.failures.size()) + " failures)");
        }
        std::filesystem::path run_dir = runs_dir / run_id;
        std::filesystem::create_directories(run_dir);
        io::save_label_sets(batch.outputs, run_dir / "labels.jsonl");
        save_traces(batch.traces, run_dir / "traces.jsonl");
        save_failures(batch.failures, run_dir / "failures.jsonl");
        run_outputs.push_back(std::move(batch.outputs));
    }
    return run_outputs;
}

}  // namespace

void SplitSpec::validate() const {
    for (double f : {train, dev, test}) {
        if (f < 0.0 || f > 1.0) throw ConfigError("split fractions must be within [0, 1]");
    }
    if (std::abs(train + dev + test - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
}

void AblationVariant::validate() const {
    if (name.empty()) throw ConfigError("ablation variant needs a name");
    if (name == "baseline") throw ConfigError("variant name 'baseline' is reserved");
    bool any = few_shot_mode || enable_eval_regen || enable_filter || enable_validation ||
               extended_reasoning || model_id;
    if (!any) throw ConfigError("ablation variant '" + name + "' overrides nothing");
}

pipe::PipelineConfig apply_variant(pipe::PipelineConfig base, const AblationVariant& variant) {
    if (variant.few_shot_mode) base.few_shot_mode = *variant.few_shot_mode;
    if (variant.enable_eval_regen) base.enable_eval_regen = *variant.enable_eval_regen;
    if (variant.enable_filter) base.enable_filter = *variant.enable_filter;
    if (variant.enable_validation) base.enable_validation = *variant.enable_validation;
    if (variant.extended_reasoning) base.extended_reasoning = *variant.extended_reasoning;
    if (variant.model_id) {
        base.models.primary = *variant.model_id;
        base.models.evaluate = *variant.model_id;
        base.models.suggest = *variant.model_id;
        base.models.regenerate = *variant.model_id;
    }
    return base;
}

void ExperimentConfig::validate() const {
    if (data.requisitions.empty()) throw ConfigError("data.requisitions is required");
    if (data.labels.empty()) throw ConfigError("data.labels is required");
    if (output_dir.empty()) throw ConfigError("output_dir is required");
    split.validate();
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    pipeline.validate();
    metrics.validate();
    gateway.validate();
    std::set<std::string> names;
    for (const AblationVariant& variant : variants) {
        variant.validate();
        if (!names.insert(variant.name).second) {
            throw ConfigError("duplicate ablation variant name '" + variant.name + "'");
        }
    }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    ObjectReader reader(doc, "config");
    int version = reader.take_int("schema_version", 0);
    if (version != 1) throw ConfigError("config schema_version must be 1");

    std::filesystem::path config_dir = std::filesystem::absolute(path).parent_path();
    std::string workspace = reader.take_string("workspace_root", "");
    std::filesystem::path root = workspace.empty() ? config_dir : resolve(config_dir, workspace);

    ExperimentConfig config;
    if (const ordered_json* data = reader.take("data")) {
        ObjectReader d(*data, "data");
        config.data.requisitions = resolve(root, d.take_string("requisitions", ""));
        config.data.labels = resolve(root, d.take_string("labels", ""));
        config.data.library = resolve(root, d.take_string("library", ""));
        config.data.ratings = resolve(root, d.take_string("ratings", ""));
        d.finish();
    }
    config.output_dir = resolve(root, reader.take_string("output_dir", ""));
    config.template_dir = resolve(root, reader.take_string("template_dir", ""));
    if (const ordered_json* split = reader.take("split")) {
        ObjectReader s(*split, "split");
        config.split.train = s.take_double("train", config.split.train);
        config.split.dev = s.take_double("dev", config.split.dev);
        config.split.test = s.take_double("test", config.split.test);
        int seed = s.take_int("seed", static_cast<int>(config.split.seed));
        if (seed < 0) throw ConfigError("split.seed must be non-negative");
        config.split.seed = static_cast<std::uint64_t>(seed);
        s.finish();
    }
    config.runs = reader.take_int("runs", config.runs);
    config.workers = reader.take_int("workers", config.workers);
    if (const ordered_json* pipeline = reader.take("pipeline")) {
        read_pipeline(*pipeline, config.pipeline);
    }
    if (const ordered_json* m = reader.take("metrics")) read_metrics(*m, config.metrics);
    if (const ordered_json* gateway = reader.take("gateway")) {
        read_gateway(*gateway, config.gateway);
    }
    if (const ordered_json* provider = reader.take("provider")) {
        read_provider(*provider, root, config.provider);
    } else {
        throw ConfigError("config needs a provider section");
    }
    if (const ordered_json* embedding = reader.take("embedding")) {
        read_embedding(*embedding, config.embedding);
    }
    if (const ordered_json* variants = reader.take("variants")) {
        if (!variants->is_array()) throw ConfigError("variants must be an array");
        for (std::size_t i = 0; i < variants->size(); ++i) {
            config.variants.push_back(read_variant((*variants)[i], i));
        }
    }
    reader.finish();
    config.validate();
    return config;
}

void split_dataset(DatasetBundle& bundle, const SplitSpec& spec) {
    spec.validate();
    std::vector<std::string> ids;
    for (const Requisition& req : bundle.requisitions) ids.push_back(req.req_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 3) {
        throw ValidationError("need at least 3 requisitions to split, have " +
                              std::to_string(ids.size()));
    }
    Rng rng(spec.seed);
    rng.shuffle(ids);
    std::array<std::size_t, 3> sizes = apportion(ids.size(), spec);
    bundle.split.clear();
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < sizes[0]; ++i) bundle.split[ids[cursor++]] = Split::Train;
    for (std::size_t i = 0; i < sizes[1]; ++i) bundle.split[ids[cursor++]] = Split::Dev;
    for (std::size_t i = 0; i < sizes[2]; ++i) bundle.split[ids[cursor++]] = Split::Test;
}

std::vector<sim::FewShotExample> train_examples(const DatasetBundle& bundle) {
    std::vector<sim::FewShotExample> examples;
    for (const Requisition* req : bundle.requisitions_in(Split::Train)) {
        const LabelSet* consensus = bundle.consensus(req->req_id);
        if (!consensus) {
            log(LogLevel::Warn, "train req " + req->req_id +
                                    " has no consensus label set; not usable as an example");
            continue;
        }
        examples.push_back(sim::FewShotExample{*req, consensus->records});
    }
    return examples;
}

Services build_services(const ExperimentConfig& config) {
    Services services;
    if (config.provider.kind == ProviderConfig::Kind::Mock) {
        services.chat = llm::MockChatProvider::from_file(config.provider.fixture);
    } else {
        services.chat = std::make_shared<llm::HttpChatProvider>(config.provider.http);
    }
    services.gateway = std::make_shared<llm::LlmGateway>(services.chat, config.gateway);
    services.embeddings = build_embedding_service(config);
    services.similarity =
        std::make_shared<sim::SimilarityEngine>(services.embeddings, config.pipeline.similarity);
    services.templates = config.template_dir.empty() ? llm::TemplateSet::builtin()
                                                     : llm::TemplateSet::load(config.template_dir);
    return services;
}

std::shared_ptr<sim::SimilarityEngine> build_similarity(const ExperimentConfig& config) {
    return std::make_shared<sim::SimilarityEngine>(build_embedding_service(config),
                                                   config.pipeline.similarity);
}

EvaluationReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    DatasetBundle bundle = load_and_split(config);
    Services services = build_services(config);
    std::vector<std::vector<LabelSet>> run_outputs = execute_runs(
        config, config.pipeline, services, bundle, config.output_dir / "runs");
    EvaluationReport report = report_from_runs("evaluation", run_outputs, bundle,
                                               *services.similarity, config.metrics);
    write_report(report, config.output_dir, "report");
    return report;
}

EvaluationReport evaluate_runs(const ExperimentConfig& config) {
    config.validate();
    DatasetBundle bundle = load_and_split(config);
    std::shared_ptr<sim::SimilarityEngine> engine = build_similarity(config);
    std::filesystem::path runs_dir = config.output_dir / "runs";
    std::vector<std::vector<LabelSet>> run_outputs;
    for (int run = 1;; ++run) {
        std::filesystem::path labels = runs_dir / run_dir_name(run) / "labels.jsonl";
        if (!std::filesystem::exists(labels)) break;
        run_outputs.push_back(io::load_label_sets(labels));
    }
    if (run_outputs.empty()) {
        throw ConfigError("no persisted runs under " + runs_dir.string());
    }
    EvaluationReport report =
        report_from_runs("evaluation", run_outputs, bundle, *engine, config.metrics);
    write_report(report, config.output_dir, "report");
    return report;
}

EvaluationReport run_ablation(const ExperimentConfig& config) {
    config.validate();
    DatasetBundle bundle = load_and_split(config);
    Services services = build_services(config);

    struct VariantSpec {
        std::string name;
        pipe::PipelineConfig pipeline;
    };
    std::vector<VariantSpec> specs;
    specs.push_back({"baseline", config.pipeline});
    for (const AblationVariant& variant : config.variants) {
        specs.push_back({variant.name, apply_variant(config.pipeline, variant)});
    }

    EvaluationReport report;
    report.title = "ablation";
    report.columns = kMetricColumns;
    for (const VariantSpec& spec : specs) {
        try {
            spec.pipeline.validate();
            std::vector<std::vector<LabelSet>> run_outputs =
                execute_runs(config, spec.pipeline, services, bundle,
                             config.output_dir / "ablation" / spec.name / "runs");
            EvaluationReport variant_report = report_from_runs(
                spec.name, run_outputs, bundle, *services.similarity, config.metrics);
            for (ReportRow& row : variant_report.rows) {
                if (row.group != "all") continue;
                row.group = spec.name;
                report.rows.push_back(std::move(row));
                break;
            }
        } catch (const Error& e) {
            log(LogLevel::Error,
                "ablation variant '" + spec.name + "' failed: " + std::string(e.what()));
        }
    }
    if (report.rows.empty()) throw ValidationError("every ablation variant failed");
    write_report(report, config.output_dir, "ablation");
    return report;
}

EvaluationReport compute_irr_report(const DatasetBundle& bundle,
                                    const sim::SimilarityEngine& engine,
                                    const metrics::MetricConfig& cfg) {
    // Group reqs by job category, keeping only those with SME sets.
    std::map<std::string, std::vector<std::vector<LabelSet>>> by_group;
    for (const Requisition& req : bundle.requisitions) {
        std::vector<LabelSet> raters;
        for (const LabelSet* set : bundle.sme_sets(req.req_id)) raters.push_back(*set);
        if (raters.empty()) continue;
        by_group["all"].push_back(raters);
        by_group[req.job_category].push_back(std::move(raters));
    }

    EvaluationReport report;
    report.title = "inter-rater reliability";
    report.columns = kIrrColumns;
    for (const auto& [group, rater_sets] : by_group) {
        metrics::IrrResult irr = metrics::compute_irr(rater_sets, engine, cfg);
        if (irr.samples == 0) continue;
        ReportRow row;
        row.group = group;
        row.reqs = irr.reqs_used;
        row.runs = irr.samples;
        auto put = [&row](const char* name, const std::optional<double>& value) {
            if (value) row.cells[name] = metrics::RunAggregate{*value, 1, {}, {}};
        };
        put("top1", irr.top1);
        put("ra", irr.ra);
        put("ra_norm", irr.ra_norm);
        put("pa", irr.pa);
        put("ca", irr.ca);
        report.rows.push_back(std::move(row));
    }
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const ReportRow& a, const ReportRow& b) {
                         if (a.group == "all") return true;
                         if (b.group == "all") return false;
                         return a.group < b.group;
                     });
    if (report.rows.empty()) {
        log(LogLevel::Warn, "no requisition has two or more raters; IRR table is empty");
    }
    return report;
}

std::size_t ingest_ratings(const ExperimentConfig& config,
                           const std::filesystem::path& new_ratings) {
    if (config.data.ratings.empty()) {
        throw ConfigError("config has no data.ratings path to ingest into");
    }
    std::vector<SmeRatingSheet> incoming = io::load_rating_sheets(new_ratings);
    if (incoming.empty()) throw ValidationError("no rating sheets in " + new_ratings.string());
    std::vector<SmeRatingSheet> merged;
    if (std::filesystem::exists(config.data.ratings)) {
        merged = io::load_rating_sheets(config.data.ratings);
    }
    for (const SmeRatingSheet& sheet : incoming) {
        auto existing = std::find_if(
            merged.begin(), merged.end(),
            [&sheet](const SmeRatingSheet& other) { return other.req_id == sheet.req_id; });
        if (existing != merged.end()) {
            *existing = sheet;
        } else {
            merged.push_back(sheet);
        }
    }
    for (const SmeRatingSheet& sheet : merged) validate(sheet);
    std::filesystem::path parent = config.data.ratings.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    io::save_rating_sheets(merged, config.data.ratings);
    return merged.size();
}

}  // namespace reqcomp::harness
