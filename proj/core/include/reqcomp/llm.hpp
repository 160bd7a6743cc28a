// Chat-completion provider contract, the gateway that adds retries and an
// in-flight cap, the scripted mock provider, and the judge/suggestion types
// shared by the evaluate-suggest-regenerate stages.
#pragma once

#include <array>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reqcomp::llm {

enum class Stage { Primary, Evaluate, Suggest, Regenerate, RefineLabel };

const char* stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

// Judge dimensions. The first five carry binary quality anchors; the sixth
// checks conformance to the definition guidelines.
enum class EvalDimension {
    OutOfScope,
    Granularity,
    Categorization,
    Justification,
    Overlap,
    Definition,
};

inline constexpr std::size_t kEvalDimensionCount = 6;
inline constexpr std::array<EvalDimension, kEvalDimensionCount> kAllEvalDimensions = {
    EvalDimension::OutOfScope,    EvalDimension::Granularity, EvalDimension::Categorization,
    EvalDimension::Justification, EvalDimension::Overlap,     EvalDimension::Definition,
};

const char* dimension_name(EvalDimension dimension);
std::optional<EvalDimension> parse_dimension(std::string_view name);

// Per-PC pass/fail verdicts from the judge, keyed by PC label.
struct PcVerdicts {
    std::string label;
    std::array<bool, kEvalDimensionCount> passed{true, true, true, true, true, true};

    bool pass(EvalDimension d) const { return passed[static_cast<std::size_t>(d)]; }
    void set(EvalDimension d, bool value) { passed[static_cast<std::size_t>(d)] = value; }
    bool all_passed() const;
    std::vector<EvalDimension> failures() const;

    bool operator==(const PcVerdicts&) const = default;
};

struct ImprovementSuggestion {
    std::string label;
    EvalDimension dimension = EvalDimension::Definition;
    std::string text;

    bool operator==(const ImprovementSuggestion&) const = default;
};

// Judge verdicts plus the follow-up suggestions for everything flagged.
struct StageEvaluation {
    std::vector<PcVerdicts> verdicts;
    std::vector<ImprovementSuggestion> suggestions;

    bool any_flagged() const;

    // Every failed (label, dimension) must carry a non-empty suggestion.
    void validate() const;

    bool operator==(const StageEvaluation&) const = default;
};

// One fully-assembled request: resolved template text plus provider options.
struct PromptSpec {
    Stage stage = Stage::Primary;
    std::string req_id;
    std::string system_text;
    std::string user_text;
    std::string model_id;
    bool extended_reasoning = false;
    int max_output = 2000;
    double temperature = 0.0;

    bool operator==(const PromptSpec&) const = default;
};

// Fingerprint used for exact mock keying and trace audit.
std::string prompt_hash(const PromptSpec& spec);

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string complete(const PromptSpec& spec) = 0;
    virtual bool supports_extended_reasoning() const = 0;
    virtual std::string name() const = 0;
};

// Scripted provider for tests and offline runs. Responses are keyed by
// (stage, req_id, prompt_hash) with a fallback to (stage, req_id), so a
// fixture can pin exact prompts or stay loose.
class MockChatProvider final : public ChatProvider {
public:
    struct Response {
        Stage stage = Stage::Primary;
        std::string req_id;
        std::string prompt_hash;  // empty == loose key
        std::string response;
    };

    struct CallRecord {
        Stage stage = Stage::Primary;
        std::string req_id;
        std::string prompt_hash;
    };

    explicit MockChatProvider(std::vector<Response> responses);
    static std::shared_ptr<MockChatProvider> from_file(const std::filesystem::path& path);

    std::string complete(const PromptSpec& spec) override;
    bool supports_extended_reasoning() const override { return true; }
    std::string name() const override { return "mock"; }

    std::vector<CallRecord> calls() const;
    std::size_t call_count() const;
    std::size_t call_count(Stage stage) const;

private:
    std::map<std::array<std::string, 3>, std::string> exact_;
    std::map<std::array<std::string, 2>, std::string> loose_;
    mutable std::mutex mutex_;
    std::vector<CallRecord> calls_;
};

struct HttpChatConfig {
    std::string base_url;
    std::string path = "/v1/complete";
    std::string api_key_env;
    int timeout_sec = 120;
    bool extended_reasoning_supported = true;
};

// Single-attempt HTTP provider; retry policy lives in the gateway.
class HttpChatProvider final : public ChatProvider {
public:
    explicit HttpChatProvider(HttpChatConfig config);
    ~HttpChatProvider() override;

    std::string complete(const PromptSpec& spec) override;
    bool supports_extended_reasoning() const override {
        return config_.extended_reasoning_supported;
    }
    std::string name() const override { return "http"; }

private:
    HttpChatConfig config_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct GatewayOptions {
    int max_attempts = 3;
    int backoff_ms = 100;  // doubles per attempt; set 0 in tests
    int max_in_flight = 4;

    void validate() const;
};

// Front door for all stage calls: bounded retries with exponential backoff
// on transport failures, a concurrency cap, and the extended-reasoning
// pass-through (warned and dropped when the provider lacks it).
class LlmGateway {
public:
    LlmGateway(std::shared_ptr<ChatProvider> provider, GatewayOptions options = {});

    std::string complete(const PromptSpec& spec);

    ChatProvider& provider() const { return *provider_; }
    const GatewayOptions& options() const { return options_; }

private:
    std::shared_ptr<ChatProvider> provider_;
    GatewayOptions options_;
    std::mutex mutex_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
};

}  // namespace reqcomp::llm
