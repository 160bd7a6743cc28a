#include "reqcomp/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "reqcomp/errors.hpp"
#include "reqcomp/log.hpp"
#include "reqcomp/util.hpp"

namespace reqcomp::llm {

const char* stage_name(Stage stage) {
    switch (stage) {
        case Stage::Primary: return "primary";
        case Stage::Evaluate: return "evaluate";
        case Stage::Suggest: return "suggest";
        case Stage::Regenerate: return "regenerate";
        case Stage::RefineLabel: return "refine_label";
    }
    return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
    if (name == "primary") return Stage::Primary;
    if (name == "evaluate") return Stage::Evaluate;
    if (name == "suggest") return Stage::Suggest;
    if (name == "regenerate") return Stage::Regenerate;
    if (name == "refine_label") return Stage::RefineLabel;
    return std::nullopt;
}

const char* dimension_name(EvalDimension dimension) {
    switch (dimension) {
        case EvalDimension::OutOfScope: return "out_of_scope";
        case EvalDimension::Granularity: return "granularity";
        case EvalDimension::Categorization: return "categorization";
        case EvalDimension::Justification: return "justification";
        case EvalDimension::Overlap: return "overlap";
        case EvalDimension::Definition: return "definition";
    }
    return "?";
}

std::optional<EvalDimension> parse_dimension(std::string_view name) {
    for (EvalDimension d : kAllEvalDimensions) {
        if (name == dimension_name(d)) return d;
    }
    return std::nullopt;
}

bool PcVerdicts::all_passed() const {
    for (bool p : passed) {
        if (!p) return false;
    }
    return true;
}

std::vector<EvalDimension> PcVerdicts::failures() const {
    std::vector<EvalDimension> out;
    for (EvalDimension d : kAllEvalDimensions) {
        if (!pass(d)) out.push_back(d);
    }
    return out;
}

bool StageEvaluation::any_flagged() const {
    for (const PcVerdicts& v : verdicts) {
        if (!v.all_passed()) return true;
    }
    return false;
}

void StageEvaluation::validate() const {
    for (const PcVerdicts& v : verdicts) {
        for (EvalDimension d : v.failures()) {
            bool found = false;
            for (const ImprovementSuggestion& s : suggestions) {
                if (s.label == v.label && s.dimension == d && !s.text.empty()) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw ValidationError(std::string("flagged issue without a suggestion: '") +
                                      v.label + "' / " + dimension_name(d));
            }
        }
    }
}

std::string prompt_hash(const PromptSpec& spec) {
    std::string key = spec.system_text;
    key.push_back('\x1f');
    key += spec.user_text;
    return to_hex(fnv1a64(key));
}

MockChatProvider::MockChatProvider(std::vector<Response> responses) {
    for (Response& r : responses) {
        if (r.req_id.empty()) throw ConfigError("mock response with empty req_id");
        if (r.prompt_hash.empty()) {
            loose_[{stage_name(r.stage), r.req_id}] = std::move(r.response);
        } else {
            exact_[{stage_name(r.stage), r.req_id, r.prompt_hash}] = std::move(r.response);
        }
    }
}

std::shared_ptr<MockChatProvider> MockChatProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock fixture " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("mock fixture " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || doc.value("schema_version", 0) != 1) {
        throw ConfigError("mock fixture " + path.string() + " must have schema_version 1");
    }
    if (!doc.contains("responses") || !doc["responses"].is_array()) {
        throw ConfigError("mock fixture " + path.string() + " missing 'responses' array");
    }
    std::vector<Response> responses;
    for (const auto& entry : doc["responses"]) {
        if (!entry.is_object()) throw ConfigError("mock fixture entry is not an object");
        Response r;
        auto stage = parse_stage(entry.value("stage", ""));
        if (!stage) {
            throw ConfigError("mock fixture entry has unknown stage '" +
                              entry.value("stage", "") + "'");
        }
        r.stage = *stage;
        r.req_id = entry.value("req_id", "");
        r.prompt_hash = entry.value("prompt_hash", "");
        if (!entry.contains("response") || !entry["response"].is_string()) {
            throw ConfigError("mock fixture entry for req " + r.req_id +
                              " missing string 'response'");
        }
        r.response = entry["response"].get<std::string>();
        responses.push_back(std::move(r));
    }
    return std::make_shared<MockChatProvider>(std::move(responses));
}

std::string MockChatProvider::complete(const PromptSpec& spec) {
    std::string hash = prompt_hash(spec);
    std::lock_guard<std::mutex> lock(mutex_);
    calls_.push_back(CallRecord{spec.stage, spec.req_id, hash});
    auto exact = exact_.find({stage_name(spec.stage), spec.req_id, hash});
    if (exact != exact_.end()) return exact->second;
    auto loose = loose_.find({stage_name(spec.stage), spec.req_id});
    if (loose != loose_.end()) return loose->second;
    throw ProviderError(std::string("mock has no response for stage=") + stage_name(spec.stage) +
                        " req=" + spec.req_id + " hash=" + hash);
}

std::vector<MockChatProvider::CallRecord> MockChatProvider::calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
}

std::size_t MockChatProvider::call_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_.size();
}

std::size_t MockChatProvider::call_count(Stage stage) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t n = 0;
    for (const CallRecord& c : calls_) {
        if (c.stage == stage) ++n;
    }
    return n;
}

struct HttpChatProvider::Impl {
    explicit Impl(const HttpChatConfig& cfg) : client(cfg.base_url) {
        client.set_connection_timeout(cfg.timeout_sec, 0);
        client.set_read_timeout(cfg.timeout_sec, 0);
    }
    httplib::Client client;
};

HttpChatProvider::HttpChatProvider(HttpChatConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {
    if (config_.base_url.empty()) throw ConfigError("chat provider base_url is empty");
}

HttpChatProvider::~HttpChatProvider() = default;

std::string HttpChatProvider::complete(const PromptSpec& spec) {
    nlohmann::json body{
        {"model", spec.model_id},
        {"system", spec.system_text},
        {"user", spec.user_text},
        {"max_output", spec.max_output},
        {"temperature", spec.temperature},
        {"extended_reasoning", spec.extended_reasoning},
    };
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("chat credential env var " + config_.api_key_env + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = impl_->client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
        throw TransportError(std::string("chat provider unreachable: ") +
                             httplib::to_string(res.error()));
    }
    if (res->status >= 500) {
        throw TransportError("chat provider returned HTTP " + std::to_string(res->status));
    }
    if (res->status < 200 || res->status >= 300) {
        throw ProviderError("chat request rejected with HTTP " + std::to_string(res->status));
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("chat response is not JSON: ") + e.what());
    }
    if (!parsed.contains("text") || !parsed["text"].is_string()) {
        throw ProviderError("chat response missing 'text' field");
    }
    return parsed["text"].get<std::string>();
}

void GatewayOptions::validate() const {
    if (max_attempts < 1) throw ConfigError("gateway max_attempts must be >= 1");
    if (backoff_ms < 0) throw ConfigError("gateway backoff_ms must be >= 0");
    if (max_in_flight < 1) throw ConfigError("gateway max_in_flight must be >= 1");
}

LlmGateway::LlmGateway(std::shared_ptr<ChatProvider> provider, GatewayOptions options)
    : provider_(std::move(provider)), options_(options) {
    if (!provider_) throw ConfigError("gateway requires a chat provider");
    options_.validate();
}

std::string LlmGateway::complete(const PromptSpec& spec) {
    PromptSpec effective = spec;
    if (effective.extended_reasoning && !provider_->supports_extended_reasoning()) {
        log(LogLevel::Warn, std::string("provider '") + provider_->name() +
                                "' does not support extended_reasoning; ignoring the flag");
        effective.extended_reasoning = false;
    }

    {
        std::unique_lock<std::mutex> lock(mutex_);
        slot_free_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
        ++in_flight_;
    }
    struct SlotRelease {
        LlmGateway* gw;
        ~SlotRelease() {
            {
                std::lock_guard<std::mutex> lock(gw->mutex_);
                --gw->in_flight_;
            }
            gw->slot_free_.notify_one();
        }
    } release{this};

    int backoff = options_.backoff_ms;
    for (int attempt = 1;; ++attempt) {
        try {
            return provider_->complete(effective);
        } catch (const TransportError& e) {
            if (attempt >= options_.max_attempts) {
                throw TransportError(std::string(stage_name(spec.stage)) + " stage: " + e.what() +
                                         " (giving up after " + std::to_string(attempt) +
                                         " attempts)",
                                     attempt);
            }
            log(LogLevel::Warn, std::string(stage_name(spec.stage)) + " stage attempt " +
                                    std::to_string(attempt) + " failed: " + e.what());
            if (backoff > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
                backoff *= 2;
            }
        }
    }
}

}  // namespace reqcomp::llm
