#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace attackqa {

// FNV-1a 64. Stable across platforms and processes, which std::hash is not.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = kFnvOffset) noexcept {
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

/// 16 lowercase hex digits of fnv1a64(text).
std::string fingerprint(std::string_view text);

/// Mixes a global seed with a row key so per-row randomness is independent of
/// iteration order.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept;

}  // namespace attackqa
