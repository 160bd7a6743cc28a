// Error hierarchy shared across the library. The CLI maps these onto
// process exit codes: ConfigError -> 1, ProviderError -> 2, ValidationError -> 3.
#pragma once

#include <stdexcept>
#include <string>

namespace reqcomp {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration, bad paths, missing templates, unusable CLI input.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A chat or embedding provider failed: transport trouble, refusal, or
// output that cannot be parsed into the documented wire format.
class ProviderError : public Error {
public:
    using Error::Error;
};

// Transient transport failure. Retryable by the gateway.
class TransportError : public ProviderError {
public:
    explicit TransportError(const std::string& msg, int attempts = 1)
        : ProviderError(msg), attempts_(attempts) {}
    int attempts() const { return attempts_; }

private:
    int attempts_;
};

// Structured model output that does not conform to the wire format.
class OutputParseError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

// A domain invariant was violated: bad record, bad file, bad value.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace reqcomp
