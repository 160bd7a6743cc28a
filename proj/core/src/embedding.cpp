#include "reqcomp/embedding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "reqcomp/errors.hpp"
#include "reqcomp/log.hpp"
#include "reqcomp/util.hpp"

namespace reqcomp::sim {

namespace {

void l2_normalize(std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq <= 0.0) return;
    double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
}

EmbeddingVector basis_vector(std::size_t dim) {
    EmbeddingVector e;
    e.values.assign(dim, 0.0);
    e.values[0] = 1.0;
    return e;
}

}  // namespace

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("cosine: dimension mismatch (" + std::to_string(a.dim()) +
                              " vs " + std::to_string(b.dim()) + ")");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) dot += a.values[i] * b.values[i];
    return std::clamp(dot, -1.0, 1.0);
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ConfigError("hash embedding dim must be positive");
}

EmbeddingVector HashEmbeddingProvider::embed(const std::string& text) {
    EmbeddingVector out;
    out.values.assign(dim_, 0.0);
    for (const std::string& token : split_whitespace(text)) {
        std::uint64_t h = fnv1a64(token);
        std::size_t bucket = static_cast<std::size_t>(h % dim_);
        double sign = (h >> 63) ? -1.0 : 1.0;
        out.values[bucket] += sign;
    }
    l2_normalize(out.values);
    return out;
}

struct HttpEmbeddingProvider::Impl {
    explicit Impl(const HttpEmbeddingConfig& cfg) : client(cfg.base_url) {
        client.set_connection_timeout(cfg.timeout_sec, 0);
        client.set_read_timeout(cfg.timeout_sec, 0);
    }
    httplib::Client client;
};

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {
    if (config_.base_url.empty()) throw ConfigError("embedding provider base_url is empty");
    if (config_.max_attempts < 1) throw ConfigError("embedding max_attempts must be >= 1");
}

HttpEmbeddingProvider::~HttpEmbeddingProvider() = default;

EmbeddingVector HttpEmbeddingProvider::embed(const std::string& text) {
    nlohmann::json body{{"text", text}};
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("embedding credential env var " + config_.api_key_env + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    int backoff = config_.backoff_ms;
    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        auto res = impl_->client.Post(config_.path, headers, body.dump(), "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            nlohmann::json parsed;
            try {
                parsed = nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw ProviderError(std::string("embedding response is not JSON: ") + e.what());
            }
            if (!parsed.contains("embedding") || !parsed["embedding"].is_array()) {
                throw ProviderError("embedding response missing 'embedding' array");
            }
            EmbeddingVector out;
            out.values.reserve(parsed["embedding"].size());
            for (const auto& x : parsed["embedding"]) {
                if (!x.is_number()) throw ProviderError("embedding response has non-numeric entry");
                out.values.push_back(x.get<double>());
            }
            if (config_.dim == 0) {
                config_.dim = out.dim();
            } else if (out.dim() != config_.dim) {
                throw ValidationError("embedding dim mismatch: configured " +
                                      std::to_string(config_.dim) + ", got " +
                                      std::to_string(out.dim()));
            }
            l2_normalize(out.values);
            return out;
        }
        if (res && res->status >= 400 && res->status < 500) {
            throw ProviderError("embedding request rejected with HTTP " + std::to_string(res->status));
        }
        last_error = res ? "HTTP " + std::to_string(res->status)
                         : httplib::to_string(res.error());
        if (attempt < config_.max_attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
    }
    throw TransportError("embedding provider unreachable after " +
                             std::to_string(config_.max_attempts) + " attempts: " + last_error,
                         config_.max_attempts);
}

EmbeddingService::EmbeddingService(std::shared_ptr<EmbeddingProvider> provider)
    : provider_(std::move(provider)) {
    if (!provider_) throw ConfigError("embedding service requires a provider");
}

EmbeddingVector EmbeddingService::embed(const std::string& text) {
    if (text.empty()) {
        log(LogLevel::Warn, "embedding requested for empty text; using canonical unit vector");
        return basis_vector(provider_->dim());
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(text);
        if (it != cache_.end()) return it->second;
    }

    EmbeddingVector vec = provider_->embed(text);
    if (vec.dim() != provider_->dim()) {
        throw ValidationError("provider '" + provider_->name() + "' returned dim " +
                              std::to_string(vec.dim()) + ", expected " +
                              std::to_string(provider_->dim()));
    }
    double sq = 0.0;
    for (double x : vec.values) {
        if (!std::isfinite(x)) {
            throw ValidationError("provider '" + provider_->name() + "' returned a non-finite entry");
        }
        sq += x * x;
    }
    if (sq < 1e-24) {
        log(LogLevel::Warn,
            "embedding for degenerate text has zero norm; using canonical unit vector");
        vec = basis_vector(provider_->dim());
    } else if (std::abs(std::sqrt(sq) - 1.0) > 1e-6) {
        double inv = 1.0 / std::sqrt(sq);
        for (double& x : vec.values) x *= inv;
    }

    std::lock_guard<std::mutex> lock(mutex_);
    ++provider_calls_;
    cache_.emplace(text, vec);
    return vec;
}

std::size_t EmbeddingService::cache_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

std::size_t EmbeddingService::provider_calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return provider_calls_;
}

}  // namespace reqcomp::sim
