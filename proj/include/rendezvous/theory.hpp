#pragma once

// Closed-form rendezvous quantities for a pair of channel sets described only
// by their sizes (n1, n2) and overlap n12.

#include <cstdint>
#include <string>

#include "rendezvous/core.hpp"

namespace rendezvous::theory {

struct InstanceProfile {
    std::uint64_t n1 = 1;
    std::uint64_t n2 = 1;
    std::uint64_t n12 = 1;

    InstanceProfile() = default;
    InstanceProfile(std::uint64_t n1_, std::uint64_t n2_, std::uint64_t n12_) : n1(n1_), n2(n2_), n12(n12_) {
        if (n12 < 1 || n12 > n1 || n12 > n2)
            throw InvalidArgument("invalid profile (" + std::to_string(n1) + "," + std::to_string(n2) + "," +
                                  std::to_string(n12) + "): need 1 <= n12 <= min(n1, n2)");
    }
    explicit InstanceProfile(const ProblemInstance& inst) : InstanceProfile(inst.n1(), inst.n2(), inst.n12()) {}

    /// Size of the union, n1 + n2 - n12.
    std::uint64_t union_size() const noexcept { return n1 + n2 - n12; }

    friend bool operator==(const InstanceProfile&, const InstanceProfile&) = default;
};

inline double jaccard(const InstanceProfile& p) {
    return static_cast<double>(p.n12) / static_cast<double>(p.union_size());
}

/// Mean of the geometric TTR of two independent uniform pickers.
inline double random_ettr(const InstanceProfile& p) {
    return static_cast<double>(p.n1) * static_cast<double>(p.n2) / static_cast<double>(p.n12);
}

inline double ettr_lower_bound(const InstanceProfile& p) {
    return (static_cast<double>(p.n1) * static_cast<double>(p.n2) + 1.0) / (static_cast<double>(p.n12) + 1.0);
}

inline double lsh2_limit_ettr(const InstanceProfile& p) { return 1.0 / jaccard(p); }

// Per-slot rendezvous probability of LSH3 under independent hash values at the
// two users. Segment lengths of the hashed ring are approximated as
// Beta(1, u-1) with u the union size.
struct Lsh3CaseTerms {
    double both_in_segment;  // both hash values land in the common channel's own segment
    double user2_absorbed;   // user 2's value lands in the run of user-1-only segments before it
    double user1_absorbed;   // symmetric case for user 1
};

/// Case terms for a single common channel (before multiplying by n12).
inline Lsh3CaseTerms lsh3_case_terms(const InstanceProfile& p) {
    const double u = static_cast<double>(p.union_size());
    const double r1 = static_cast<double>(p.n1 - p.n12) / u;
    const double r2 = static_cast<double>(p.n2 - p.n12) / u;
    return {
        2.0 / (u * (u + 1.0)),
        r1 / (1.0 - r1) / (u * u),
        r2 / (1.0 - r2) / (u * u),
    };
}

inline double lsh3_prob_approx(const InstanceProfile& p) {
    const double u = static_cast<double>(p.union_size());
    const double n1 = static_cast<double>(p.n1);
    const double n2 = static_cast<double>(p.n2);
    const double n12 = static_cast<double>(p.n12);
    return 2.0 * n12 / (u * (u + 1.0)) + n12 / (u * u) * ((n1 - n12) / n2 + (n2 - n12) / n1);
}

inline double lsh3_ettr_approx(const InstanceProfile& p) { return 1.0 / lsh3_prob_approx(p); }

/// Mixed strategy: with probability `mix` pick from a length-t0 multiset.
inline double lsh4_ettr_approx(const InstanceProfile& p, std::uint64_t t0, double mix) {
    if (t0 < 1) throw InvalidArgument("T0 must be at least 1");
    if (!(mix >= 0.0 && mix <= 1.0)) throw InvalidArgument("mixing probability must be in [0, 1]");
    const double base = static_cast<double>(p.n12) / (static_cast<double>(p.n1) * static_cast<double>(p.n2));
    const double m2 = mix * mix;
    return 1.0 / ((1.0 - m2) * base + m2 * jaccard(p) / static_cast<double>(t0));
}

/// Largest multiset size for which pure multiset sampling beats random hopping.
inline double lsh4_t0_bound(const InstanceProfile& p) {
    return static_cast<double>(p.n1) * static_cast<double>(p.n2) / static_cast<double>(p.union_size());
}

}  // namespace rendezvous::theory
