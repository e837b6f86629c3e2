#pragma once

// Counter-based pseudo-random functions.
//
// Every draw is a pure function of (key, index). Keys are derived by hashing
// a parent key with a label, so streams can be split without coordination and
// any element U(t+d) is addressable without generating a prefix.

#include <cstdint>
#include <string_view>

namespace rendezvous {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Output `index` of the SplitMix64 sequence started at state `key`.
constexpr std::uint64_t draw_bits(std::uint64_t key, std::uint64_t index) noexcept {
    return mix64(key + (index + 1) * kGolden);
}

/// Derives a child key. Distinct labels give unrelated keys.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t label) noexcept {
    return mix64(mix64(parent ^ 0x5851F42D4C957F2DULL) + mix64(label + kGolden));
}

/// FNV-1a, used to turn stream names into labels.
constexpr std::uint64_t label_of(std::string_view name) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Maps 64 random bits onto [0, n). Bias is below n / 2^64.
constexpr std::uint64_t bounded(std::uint64_t bits, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

/// Maps 64 random bits onto [0, 1) with 53-bit resolution.
constexpr double unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A keyed, index-addressable stream of random draws.
class CounterStream {
public:
    constexpr CounterStream() = default;
    constexpr explicit CounterStream(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t bits(std::uint64_t index) const noexcept { return draw_bits(key_, index); }
    constexpr std::uint64_t below(std::uint64_t index, std::uint64_t n) const noexcept {
        return bounded(bits(index), n);
    }
    constexpr double unit(std::uint64_t index) const noexcept { return unit_interval(bits(index)); }

    constexpr CounterStream child(std::uint64_t label) const noexcept {
        return CounterStream{derive_key(key_, label)};
    }
    constexpr CounterStream child(std::string_view name) const noexcept { return child(label_of(name)); }

private:
    std::uint64_t key_ = 0;
};

}  // namespace rendezvous
