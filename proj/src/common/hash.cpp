#include "attackqa/common/hash.hpp"

#include <array>

namespace attackqa {

std::string to_hex(std::uint64_t value) {
    static constexpr std::array<char, 16> digits{'0', '1', '2', '3', '4', '5', '6', '7',
                                                 '8', '9', 'a', 'b', 'c', 'd', 'e', 'f'};
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string fingerprint(std::string_view text) { return to_hex(fnv1a64(text)); }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept {
    // splitmix64 finalizer over the seed, then fold in the key.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return fnv1a64(key, z ^ kFnvOffset);
}

}  // namespace attackqa
