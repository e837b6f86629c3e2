#pragma once

// Domain types for the two-user multichannel rendezvous problem.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rendezvous/random.hpp"

namespace rendezvous {

// ---------------------------------------------------------------------------
// Errors

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidInstance : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when an instance specification cannot be realized.
struct InfeasibleSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when an exact enumeration would exceed its complexity guard.
class GuardViolation : public std::runtime_error {
public:
    GuardViolation(const std::string& what, std::uint32_t max_n)
        : std::runtime_error(what), max_n_(max_n) {}
    std::uint32_t max_n() const noexcept { return max_n_; }

private:
    std::uint32_t max_n_;
};

// ---------------------------------------------------------------------------
// Channels

struct ChannelId {
    std::uint32_t value = 0;

    constexpr ChannelId() = default;
    constexpr explicit ChannelId(std::uint32_t v) : value(v) {}
    friend constexpr auto operator<=>(ChannelId, ChannelId) = default;
};

/// A user's available channels: a nonempty, strictly increasing subset of [0, N).
class ChannelSet {
public:
    ChannelSet(std::uint32_t n_total, std::vector<std::uint32_t> channels) : n_total_(n_total) {
        if (channels.empty()) throw InvalidInstance("channel set must be nonempty");
        std::sort(channels.begin(), channels.end());
        if (std::adjacent_find(channels.begin(), channels.end()) != channels.end())
            throw InvalidInstance("channel set has duplicate channels");
        if (channels.back() >= n_total)
            throw InvalidInstance("channel " + std::to_string(channels.back()) +
                                  " outside [0, " + std::to_string(n_total) + ")");
        channels_.reserve(channels.size());
        for (auto c : channels) channels_.emplace_back(c);
    }

    ChannelSet(std::uint32_t n_total, std::initializer_list<std::uint32_t> channels)
        : ChannelSet(n_total, std::vector<std::uint32_t>(channels)) {}

    std::uint32_t n_total() const noexcept { return n_total_; }
    std::size_t size() const noexcept { return channels_.size(); }
    std::span<const ChannelId> channels() const noexcept { return channels_; }
    ChannelId operator[](std::size_t i) const { return channels_[i]; }
    auto begin() const noexcept { return channels_.begin(); }
    auto end() const noexcept { return channels_.end(); }

    bool contains(ChannelId c) const noexcept {
        return std::binary_search(channels_.begin(), channels_.end(), c);
    }

    std::vector<std::uint32_t> labels() const {
        std::vector<std::uint32_t> out;
        out.reserve(channels_.size());
        for (auto c : channels_) out.push_back(c.value);
        return out;
    }

    friend bool operator==(const ChannelSet&, const ChannelSet&) = default;

private:
    std::uint32_t n_total_;
    std::vector<ChannelId> channels_;
};

inline std::size_t intersection_size(const ChannelSet& a, const ChannelSet& b) {
    if (a.n_total() != b.n_total())
        throw InvalidInstance("channel sets live in different label spaces (N=" +
                              std::to_string(a.n_total()) + " vs N=" + std::to_string(b.n_total()) + ")");
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

/// Two channel sets over the same N that share at least one channel.
class ProblemInstance {
public:
    ProblemInstance(ChannelSet c1, ChannelSet c2) : c1_(std::move(c1)), c2_(std::move(c2)) {
        if (c1_.n_total() < 2) throw InvalidInstance("N must be at least 2");
        n12_ = intersection_size(c1_, c2_);
        if (n12_ == 0) throw InvalidInstance("channel sets have no common channel");
    }

    std::uint32_t n_total() const noexcept { return c1_.n_total(); }
    const ChannelSet& c1() const noexcept { return c1_; }
    const ChannelSet& c2() const noexcept { return c2_; }
    std::size_t n1() const noexcept { return c1_.size(); }
    std::size_t n2() const noexcept { return c2_.size(); }
    std::size_t n12() const noexcept { return n12_; }
    double jaccard() const noexcept {
        return static_cast<double>(n12_) / static_cast<double>(n1() + n2() - n12_);
    }

    ProblemInstance swapped() const { return ProblemInstance(c2_, c1_); }

    friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;

private:
    ChannelSet c1_;
    ChannelSet c2_;
    std::size_t n12_ = 0;
};

// ---------------------------------------------------------------------------
// Permutations

class Permutation {
public:
    Permutation() = default;

    static Permutation identity(std::uint32_t n) {
        std::vector<std::uint32_t> f(n);
        std::iota(f.begin(), f.end(), 0U);
        return Permutation(std::move(f));
    }

    /// Builds from the forward map; throws if it is not a bijection on [0, size).
    explicit Permutation(std::vector<std::uint32_t> forward) : forward_(std::move(forward)) {
        inverse_.assign(forward_.size(), 0);
        std::vector<bool> seen(forward_.size(), false);
        for (std::uint32_t x = 0; x < forward_.size(); ++x) {
            auto y = forward_[x];
            if (y >= forward_.size() || seen[y]) throw InvalidArgument("not a permutation");
            seen[y] = true;
            inverse_[y] = x;
        }
    }

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(forward_.size()); }
    std::uint32_t operator()(std::uint32_t x) const { return forward_[x]; }
    std::uint32_t inverse(std::uint32_t y) const { return inverse_[y]; }
    std::span<const std::uint32_t> forward_map() const noexcept { return forward_; }

    /// Refills in place with a uniform shuffle drawn from `stream`.
    void shuffle_from(const CounterStream& stream, std::uint32_t n) {
        forward_.resize(n);
        inverse_.resize(n);
        std::iota(forward_.begin(), forward_.end(), 0U);
        for (std::uint32_t i = n; i > 1; --i) {
            auto j = static_cast<std::uint32_t>(stream.below(i - 1, i));
            std::swap(forward_[i - 1], forward_[j]);
        }
        for (std::uint32_t x = 0; x < n; ++x) inverse_[forward_[x]] = x;
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.forward_ == b.forward_; }

private:
    std::vector<std::uint32_t> forward_;
    std::vector<std::uint32_t> inverse_;
};

// ---------------------------------------------------------------------------
// Randomness

enum class SharedStream : std::uint8_t { U, Pi1, Pi2 };

constexpr std::string_view stream_name(SharedStream s) noexcept {
    switch (s) {
        case SharedStream::U: return "U";
        case SharedStream::Pi1: return "pi1";
        case SharedStream::Pi2: return "pi2";
    }
    return "?";
}

/// Hash values and permutations known to both users.
class SharedRandomness {
public:
    SharedRandomness(std::uint64_t seed, std::uint32_t n_total)
        : seed_(seed), n_total_(n_total), root_(seed) {
        if (n_total == 0) throw InvalidArgument("shared randomness needs N >= 1");
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint32_t n_total() const noexcept { return n_total_; }

    CounterStream stream(SharedStream s) const noexcept { return root_.child(stream_name(s)); }

    /// U(t), uniform on [0, N).
    std::uint32_t uniform(std::uint64_t t) const noexcept {
        return static_cast<std::uint32_t>(stream(SharedStream::U).below(t, n_total_));
    }

    Permutation permutation(SharedStream tag) const;

private:
    std::uint64_t seed_;
    std::uint32_t n_total_;
    CounterStream root_;
};

inline Permutation make_permutation(const SharedRandomness& rand, SharedStream tag, std::uint32_t size) {
    if (size == 0) throw InvalidArgument("permutation size must be at least 1");
    Permutation p;
    p.shuffle_from(rand.stream(tag), size);
    return p;
}

inline Permutation SharedRandomness::permutation(SharedStream tag) const {
    return make_permutation(*this, tag, n_total_);
}

/// One user's local coin flips and picks.
class PrivateRandomness {
public:
    explicit PrivateRandomness(std::uint64_t seed) : seed_(seed), stream_(derive_key(seed, label_of("private"))) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t index_below(std::uint64_t draw, std::uint64_t n) const noexcept { return stream_.below(draw, n); }
    double unit(std::uint64_t draw) const noexcept { return stream_.unit(draw); }
    bool bernoulli(std::uint64_t draw, double p) const noexcept { return stream_.unit(draw) < p; }

private:
    std::uint64_t seed_;
    CounterStream stream_;
};

/// First-success slot count of one rendezvous attempt (support {1, 2, ...}).
struct TtrSample {
    std::uint64_t value = 1;

    constexpr TtrSample() = default;
    constexpr explicit TtrSample(std::uint64_t v) : value(v) {
        if (v < 1) throw InvalidArgument("TTR must be at least 1");
    }
    friend constexpr auto operator<=>(TtrSample, TtrSample) = default;
};

}  // namespace rendezvous
