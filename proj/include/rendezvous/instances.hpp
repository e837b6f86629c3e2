#pragma once

// Problem-instance generators: uniformly scattered channel sets, and the
// contiguous-block layout under which unpermuted hashing is biased.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rendezvous/core.hpp"
#include "rendezvous/random.hpp"

namespace rendezvous {

enum class Layout : std::uint8_t { Uniform, Contiguous };

constexpr std::string_view layout_name(Layout l) noexcept {
    return l == Layout::Uniform ? "uniform" : "contiguous";
}

struct InstanceSpec {
    std::uint32_t n_total = 2;
    std::uint32_t n1 = 1;
    std::uint32_t n2 = 1;
    std::uint32_t n12 = 1;
    Layout layout = Layout::Uniform;

    /// Throws InfeasibleSpec naming the first violated constraint.
    void validate() const {
        auto fail = [&](const std::string& why) {
            throw InfeasibleSpec("infeasible spec N=" + std::to_string(n_total) + " n1=" + std::to_string(n1) +
                                 " n2=" + std::to_string(n2) + " n12=" + std::to_string(n12) + ": " + why);
        };
        if (n_total < 2) fail("requires N >= 2");
        if (n12 < 1) fail("requires n12 >= 1");
        if (n12 > n1 || n12 > n2) fail("requires n12 <= min(n1, n2)");
        if (std::uint64_t{n1} + n2 - n12 > n_total) fail("requires n1 + n2 - n12 <= N");
    }

    double jaccard() const noexcept { return static_cast<double>(n12) / static_cast<double>(n1 + n2 - n12); }

    /// Stable 64-bit key used to derive per-spec random streams.
    std::uint64_t key() const noexcept {
        std::uint64_t k = label_of("instance-spec");
        for (std::uint64_t v : {std::uint64_t{n_total}, std::uint64_t{n1}, std::uint64_t{n2}, std::uint64_t{n12},
                                static_cast<std::uint64_t>(layout)})
            k = derive_key(k, v);
        return k;
    }

    friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

/// Common channels first, then n1-n12 user-1-only and n2-n12 user-2-only
/// channels, all drawn without replacement from [0, N).
inline ProblemInstance gen_uniform(const InstanceSpec& spec, const PrivateRandomness& rng) {
    spec.validate();
    const std::uint32_t take = spec.n1 + spec.n2 - spec.n12;
    // Partial Fisher-Yates over a sparse swap table.
    std::unordered_map<std::uint32_t, std::uint32_t> swapped;
    auto at = [&](std::uint32_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    std::vector<std::uint32_t> picked(take);
    for (std::uint32_t i = 0; i < take; ++i) {
        auto j = i + static_cast<std::uint32_t>(rng.index_below(i, spec.n_total - i));
        auto vi = at(i);
        auto vj = at(j);
        swapped[j] = vi;
        picked[i] = vj;
    }
    std::vector<std::uint32_t> c1(picked.begin(), picked.begin() + spec.n1);
    std::vector<std::uint32_t> c2(picked.begin(), picked.begin() + spec.n12);
    c2.insert(c2.end(), picked.begin() + spec.n1, picked.end());
    return ProblemInstance(ChannelSet(spec.n_total, std::move(c1)), ChannelSet(spec.n_total, std::move(c2)));
}

/// Contiguous blocks (mod N): c1 = [start, start+n1), c2 shifted by n1-n12.
inline ProblemInstance gen_contiguous_at(const InstanceSpec& spec, std::uint32_t start) {
    spec.validate();
    const std::uint32_t n = spec.n_total;
    auto block = [n](std::uint32_t from, std::uint32_t len) {
        std::vector<std::uint32_t> out(len);
        for (std::uint32_t k = 0; k < len; ++k) out[k] = (from + k) % n;
        return out;
    };
    start %= n;
    return ProblemInstance(ChannelSet(n, block(start, spec.n1)),
                           ChannelSet(n, block((start + spec.n1 - spec.n12) % n, spec.n2)));
}

inline ProblemInstance gen_contiguous(const InstanceSpec& spec, const PrivateRandomness& rng) {
    spec.validate();
    return gen_contiguous_at(spec, static_cast<std::uint32_t>(rng.index_below(0, spec.n_total)));
}

inline ProblemInstance generate(const InstanceSpec& spec, const PrivateRandomness& rng) {
    return spec.layout == Layout::Uniform ? gen_uniform(spec, rng) : gen_contiguous(spec, rng);
}

}  // namespace rendezvous
