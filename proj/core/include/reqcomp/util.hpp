// Small shared helpers: hashing, string munging, and a portable seeded RNG.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace reqcomp {

// FNV-1a 64-bit. Stable across platforms; used for deterministic embeddings
// and prompt fingerprints (not a cryptographic hash).
std::uint64_t fnv1a64(std::string_view text);

std::string to_hex(std::uint64_t value);

std::string trim(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

// Escapes backslash and newline so multi-line field values survive a
// line-oriented format; unescape() is the exact inverse.
std::string escape_field(std::string_view text);
std::string unescape_field(std::string_view text);

bool starts_with(std::string_view text, std::string_view prefix);

// Deterministic RNG wrapper. std::mt19937_64 is fully specified by the
// standard but the distributions are not, so bounded draws and shuffles are
// implemented here to make seeded results identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, bound) via rejection sampling.
    std::uint64_t below(std::uint64_t bound);

    // Uniform double in [0, 1) with 53 random bits.
    double unit();

    template <typename T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(items[i], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace reqcomp
