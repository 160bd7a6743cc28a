// Embedding provider contract plus the caching service in front of it.
// Providers return unit-norm vectors; the service validates the contract,
// caches by exact text, and maps empty text to a canonical basis vector so
// degenerate inputs cannot produce NaNs downstream.
#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace reqcomp::sim {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }

    bool operator==(const EmbeddingVector&) const = default;
};

// Standard inner product. Inputs must share a dimension; result is clamped
// into [-1, 1] so unit-vector rounding noise cannot escape the range.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual EmbeddingVector embed(const std::string& text) = 0;
    virtual std::size_t dim() const = 0;
    virtual std::string name() const = 0;
};

// Deterministic test provider: each whitespace token is hashed into one of
// `dim` signed buckets, then the accumulator is L2-normalized. Reproducible
// on every platform, so similarity-dependent tests need no model.
class HashEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(std::size_t dim = 64);

    EmbeddingVector embed(const std::string& text) override;
    std::size_t dim() const override { return dim_; }
    std::string name() const override { return "hash-test"; }

private:
    std::size_t dim_;
};

struct HttpEmbeddingConfig {
    std::string base_url;               // e.g. "http://localhost:8080"
    std::string path = "/v1/embed";
    std::string api_key_env;            // env var holding the credential
    std::size_t dim = 0;                // declared dimension, validated on first call
    int max_attempts = 3;
    int backoff_ms = 100;
    int timeout_sec = 30;
};

// POSTs {"text": ...} and expects {"embedding": [...]}; normalizes the
// response. Declared dim is validated against the first response.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config);
    ~HttpEmbeddingProvider() override;

    EmbeddingVector embed(const std::string& text) override;
    std::size_t dim() const override { return config_.dim; }
    std::string name() const override { return "http"; }

private:
    HttpEmbeddingConfig config_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Cache + contract enforcement in front of a provider. Thread-safe;
// identical keys resolve to identical values by provider determinism, so
// concurrent insertion is last-writer-wins.
class EmbeddingService {
public:
    explicit EmbeddingService(std::shared_ptr<EmbeddingProvider> provider);

    EmbeddingVector embed(const std::string& text);

    std::size_t cache_size() const;
    std::size_t provider_calls() const;

private:
    std::shared_ptr<EmbeddingProvider> provider_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, EmbeddingVector> cache_;
    std::size_t provider_calls_ = 0;
};

}  // namespace reqcomp::sim
