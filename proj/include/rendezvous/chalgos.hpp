#pragma once

// Channel-hopping rules. Each hop is a pure function of the user's channel
// set, a time index and the (shared or private) randomness it consults.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rendezvous/core.hpp"

namespace rendezvous {

enum class AlgorithmKind : std::uint8_t { Random, SynMac, Lsh, Lsh2, Lsh3, Lsh4 };

/// A configured hop rule. Only LSH4 carries parameters.
struct HopAlgorithm {
    AlgorithmKind kind = AlgorithmKind::Random;
    std::uint32_t t0 = 0;
    double p = 0.0;

    static HopAlgorithm random() { return {AlgorithmKind::Random}; }
    static HopAlgorithm synmac() { return {AlgorithmKind::SynMac}; }
    static HopAlgorithm lsh() { return {AlgorithmKind::Lsh}; }
    static HopAlgorithm lsh2() { return {AlgorithmKind::Lsh2}; }
    static HopAlgorithm lsh3() { return {AlgorithmKind::Lsh3}; }
    static HopAlgorithm lsh4(std::uint32_t t0, double p) {
        if (t0 < 1) throw InvalidArgument("LSH4 needs T0 >= 1");
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("LSH4 needs 0 <= p <= 1");
        return {AlgorithmKind::Lsh4, t0, p};
    }

    bool uses_shared_randomness() const noexcept {
        return kind == AlgorithmKind::Lsh || kind == AlgorithmKind::Lsh2 || kind == AlgorithmKind::Lsh3 ||
               kind == AlgorithmKind::Lsh4;
    }

    /// Canonical name: "random", "synmac", "lsh", "lsh2", "lsh3", "lsh4:T0:p".
    std::string name() const {
        switch (kind) {
            case AlgorithmKind::Random: return "random";
            case AlgorithmKind::SynMac: return "synmac";
            case AlgorithmKind::Lsh: return "lsh";
            case AlgorithmKind::Lsh2: return "lsh2";
            case AlgorithmKind::Lsh3: return "lsh3";
            case AlgorithmKind::Lsh4: {
                char buf[64];
                std::snprintf(buf, sizeof buf, "lsh4:%u:%g", t0, p);
                return buf;
            }
        }
        return "?";
    }

    static HopAlgorithm parse(std::string_view text) {
        if (text == "random") return random();
        if (text == "synmac") return synmac();
        if (text == "lsh") return lsh();
        if (text == "lsh2") return lsh2();
        if (text == "lsh3") return lsh3();
        if (text.substr(0, 5) == "lsh4:") {
            std::string rest(text.substr(5));
            auto colon = rest.find(':');
            if (colon == std::string::npos) throw InvalidArgument("expected lsh4:T0:p, got '" + std::string(text) + "'");
            try {
                std::size_t used = 0;
                auto t0 = std::stoul(rest.substr(0, colon), &used);
                if (used != colon) throw std::invalid_argument("T0");
                auto ptext = rest.substr(colon + 1);
                auto p = std::stod(ptext, &used);
                if (used != ptext.size()) throw std::invalid_argument("p");
                return lsh4(static_cast<std::uint32_t>(t0), p);
            } catch (const InvalidArgument&) {
                throw;
            } catch (const std::exception&) {
                throw InvalidArgument("expected lsh4:T0:p, got '" + std::string(text) + "'");
            }
        }
        throw InvalidArgument("unknown algorithm '" + std::string(text) + "'");
    }

    friend bool operator==(const HopAlgorithm&, const HopAlgorithm&) = default;
};

/// Length-T0 list of channels from the owner's set; duplicates allowed.
struct ChannelMultiset {
    std::vector<ChannelId> entries;

    std::size_t size() const noexcept { return entries.size(); }
};

namespace detail {

// argmin over c of (label(c) - u) mod N, with `label` a bijection on [0, N).
template <class LabelFn>
ChannelId nearest_clockwise(const ChannelSet& c, LabelFn label, std::uint32_t u) {
    const std::uint32_t n = c.n_total();
    std::uint32_t best_dist = n;
    ChannelId best{};
    bool tie = false;
    for (auto ch : c) {
        std::uint32_t mapped = label(ch.value);
        std::uint32_t dist = (mapped + n - u) % n;
        if (dist < best_dist) {
            best_dist = dist;
            best = ch;
            tie = false;
        } else if (dist == best_dist) {
            tie = true;
        }
    }
    if (tie) throw std::logic_error("argmin tie in hash hop: labels are not distinct");
    return best;
}

inline void check_hash(std::uint32_t u, std::uint32_t n, const char* what) {
    if (u >= n) throw InvalidArgument(std::string(what) + " out of range [0, N)");
}

}  // namespace detail

/// Hops to the available channel nearest clockwise from u.
inline ChannelId lsh_hop(const ChannelSet& c, std::uint32_t u) {
    detail::check_hash(u, c.n_total(), "hash value");
    return detail::nearest_clockwise(c, [](std::uint32_t x) { return x; }, u);
}

inline ChannelId lsh2_hop(const ChannelSet& c, const Permutation& pi1, const Permutation& pi2, std::uint32_t t) {
    detail::check_hash(t, c.n_total(), "time index");
    if (pi1.size() != c.n_total() || pi2.size() != c.n_total())
        throw InvalidArgument("permutation size differs from N");
    return detail::nearest_clockwise(c, [&](std::uint32_t x) { return pi1(x); }, pi2(t));
}

inline ChannelId lsh3_hop(const ChannelSet& c, const Permutation& pi1, std::uint32_t u) {
    detail::check_hash(u, c.n_total(), "hash value");
    if (pi1.size() != c.n_total()) throw InvalidArgument("permutation size differs from N");
    return detail::nearest_clockwise(c, [&](std::uint32_t x) { return pi1(x); }, u);
}

inline ChannelMultiset lsh4_build_multiset(const ChannelSet& c, const Permutation& pi1, const Permutation& pi2,
                                           std::uint32_t t0) {
    if (t0 < 1) throw InvalidArgument("T0 must be at least 1");
    if (t0 > c.n_total()) throw InvalidArgument("T0 exceeds N");
    ChannelMultiset ms;
    ms.entries.reserve(t0);
    for (std::uint32_t t = 0; t < t0; ++t) ms.entries.push_back(lsh2_hop(c, pi1, pi2, t));
    return ms;
}

inline ChannelId random_hop(const ChannelSet& c, const PrivateRandomness& priv, std::uint64_t draw_index) {
    return c[priv.index_below(draw_index, c.size())];
}

/// Stream for LSH4's mixing coin. Kept apart from the element picks so that
/// with p = 0 the picks coincide draw-for-draw with `random_hop`.
inline PrivateRandomness lsh4_coin_stream(const PrivateRandomness& priv) {
    return PrivateRandomness(derive_key(priv.seed(), label_of("lsh4-coin")));
}

inline ChannelId lsh4_hop(const ChannelSet& c, const ChannelMultiset& ms, double p, const PrivateRandomness& priv,
                          const PrivateRandomness& coin, std::uint64_t draw_index) {
    if (coin.bernoulli(draw_index, p)) return ms.entries[priv.index_below(draw_index, ms.size())];
    return random_hop(c, priv, draw_index);
}

inline ChannelId lsh4_hop(const ChannelSet& c, const ChannelMultiset& ms, double p, const PrivateRandomness& priv,
                          std::uint64_t draw_index) {
    return lsh4_hop(c, ms, p, priv, lsh4_coin_stream(priv), draw_index);
}

/// Channel t mod N when available, otherwise a uniform pick from c.
inline ChannelId synmac_hop(const ChannelSet& c, std::uint64_t t, const PrivateRandomness& priv,
                            std::uint64_t draw_index) {
    ChannelId slot{static_cast<std::uint32_t>(t % c.n_total())};
    if (c.contains(slot)) return slot;
    return random_hop(c, priv, draw_index);
}

/// Sorted view of a channel set under a relabeling, answering
/// nearest-clockwise queries in O(log n). Equivalent to the linear scan in
/// lsh_hop / lsh2_hop / lsh3_hop; the simulation engine uses it per slot.
class HashRing {
public:
    HashRing() = default;

    void rebuild(const ChannelSet& c, const Permutation* relabel) {
        n_ = c.n_total();
        nodes_.clear();
        nodes_.reserve(c.size());
        for (auto ch : c) nodes_.push_back({relabel ? (*relabel)(ch.value) : ch.value, ch});
        std::sort(nodes_.begin(), nodes_.end(), [](const Node& a, const Node& b) { return a.label < b.label; });
    }

    ChannelId hop(std::uint32_t u) const {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), u,
                                   [](const Node& node, std::uint32_t v) { return node.label < v; });
        return it == nodes_.end() ? nodes_.front().channel : it->channel;
    }

    std::uint32_t n_total() const noexcept { return n_; }

private:
    struct Node {
        std::uint32_t label;
        ChannelId channel;
    };
    std::uint32_t n_ = 0;
    std::vector<Node> nodes_;
};

}  // namespace rendezvous
