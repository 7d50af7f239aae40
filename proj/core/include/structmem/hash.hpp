#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace structmem {

// FNV-1a, 64 bit. Used for content fingerprints in manifests and for the
// mock provider's n-gram hashing. Not cryptographic.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<std::uint8_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

inline std::string content_hash(std::string_view data) {
    return to_hex(fnv1a64(data));
}

}  // namespace structmem
