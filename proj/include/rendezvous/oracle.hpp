#pragma once

// Exact single-slot rendezvous probabilities by exhaustive enumeration of the
// shared permutations. Exact rational arithmetic throughout; only feasible on
// tiny label spaces, hence the complexity guards.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rendezvous/chalgos.hpp"
#include "rendezvous/core.hpp"

namespace rendezvous::oracle {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::uint32_t kMaxNLsh2 = 8;
inline constexpr std::uint32_t kMaxNLsh3 = 7;
inline constexpr std::uint32_t kMaxNEttr = 6;

/// An exact probability (or mean) held in lowest terms.
class ExactProb {
public:
    ExactProb() = default;
    explicit ExactProb(Rational v) : value_(std::move(v)) {
        if (value_ < 0) throw InvalidArgument("exact value must be nonnegative");
    }
    ExactProb(const BigInt& num, const BigInt& den) {
        if (den <= 0) throw InvalidArgument("denominator must be positive");
        value_ = Rational(num, den);
        if (value_ < 0) throw InvalidArgument("exact value must be nonnegative");
    }

    BigInt numerator() const { return boost::multiprecision::numerator(value_); }
    BigInt denominator() const { return boost::multiprecision::denominator(value_); }
    const Rational& value() const noexcept { return value_; }
    double to_double() const { return value_.convert_to<double>(); }

    /// "p/q", or "p" when the denominator is 1.
    std::string str() const {
        auto d = denominator();
        if (d == 1) return numerator().str();
        return numerator().str() + "/" + d.str();
    }

    friend bool operator==(const ExactProb& a, const ExactProb& b) { return a.value_ == b.value_; }

private:
    Rational value_{0};
};

inline ExactProb exact_jaccard(const ProblemInstance& inst) {
    return ExactProb(BigInt(inst.n12()), BigInt(inst.n1() + inst.n2() - inst.n12()));
}

namespace detail {

inline void guard(const ProblemInstance& inst, std::uint32_t max_n, const char* what) {
    if (inst.n_total() > max_n)
        throw GuardViolation(std::string(what) + ": N=" + std::to_string(inst.n_total()) +
                                 " exceeds the enumeration limit; use N <= " + std::to_string(max_n),
                             max_n);
}

/// Calls f(pi) for every permutation of [0, n) in lexicographic order.
template <class F>
void for_each_permutation(std::uint32_t n, F&& f) {
    std::vector<std::uint32_t> forward(n);
    std::iota(forward.begin(), forward.end(), 0U);
    do {
        f(Permutation(forward));
    } while (std::next_permutation(forward.begin(), forward.end()));
}

inline BigInt factorial(std::uint32_t n) {
    BigInt f = 1;
    for (std::uint32_t k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace detail

/// P(both users hop to the same channel at one slot) under LSH2, averaged over
/// every pi1 and every value of pi2(t).
inline ExactProb exact_prob_lsh2(const ProblemInstance& inst) {
    detail::guard(inst, kMaxNLsh2, "exact_prob_lsh2");
    const std::uint32_t n = inst.n_total();
    const Permutation slot_value = Permutation::identity(n);  // pi2(t) ranges over all of [0, N)
    std::uint64_t hits = 0;
    detail::for_each_permutation(n, [&](const Permutation& pi1) {
        for (std::uint32_t v = 0; v < n; ++v)
            if (lsh2_hop(inst.c1(), pi1, slot_value, v) == lsh2_hop(inst.c2(), pi1, slot_value, v)) ++hits;
    });
    return ExactProb(BigInt(hits), detail::factorial(n) * n);
}

/// P(collision) under LSH3 with the users' hash values independent
/// (drift_nonzero) or identical (zero drift), averaged over every pi1.
inline ExactProb exact_prob_lsh3(const ProblemInstance& inst, bool drift_nonzero) {
    detail::guard(inst, kMaxNLsh3, "exact_prob_lsh3");
    const std::uint32_t n = inst.n_total();
    BigInt hits = 0;
    std::vector<std::uint64_t> count1(n), count2(n);
    detail::for_each_permutation(n, [&](const Permutation& pi1) {
        std::fill(count1.begin(), count1.end(), 0);
        std::fill(count2.begin(), count2.end(), 0);
        std::uint64_t same = 0;
        for (std::uint32_t u = 0; u < n; ++u) {
            auto h1 = lsh3_hop(inst.c1(), pi1, u);
            auto h2 = lsh3_hop(inst.c2(), pi1, u);
            ++count1[h1.value];
            ++count2[h2.value];
            if (h1 == h2) ++same;
        }
        if (drift_nonzero) {
            std::uint64_t pairs = 0;
            for (std::uint32_t c = 0; c < n; ++c) pairs += count1[c] * count2[c];
            hits += pairs;
        } else {
            hits += same;
        }
    });
    BigInt total = detail::factorial(n) * n;
    if (drift_nonzero) total *= n;
    return ExactProb(hits, total);
}

/// Exact synchronous LSH2 ETTR: mean first-collision slot (counting from 1)
/// over every (pi1, pi2) pair.
inline ExactProb exact_ettr_sync_lsh2(const ProblemInstance& inst) {
    detail::guard(inst, kMaxNEttr, "exact_ettr_sync_lsh2");
    const std::uint32_t n = inst.n_total();
    std::vector<Permutation> all;
    detail::for_each_permutation(n, [&](const Permutation& p) { all.push_back(p); });

    BigInt total_ttr = 0;
    for (const auto& pi1 : all) {
        for (const auto& pi2 : all) {
            std::uint32_t t = 0;
            while (t < n && lsh2_hop(inst.c1(), pi1, pi2, t) != lsh2_hop(inst.c2(), pi1, pi2, t)) ++t;
            if (t == n) throw std::logic_error("LSH2 failed to rendezvous within N slots");
            total_ttr += t + 1;
        }
    }
    BigInt pairs = BigInt(all.size()) * all.size();
    return ExactProb(total_ttr, pairs);
}

}  // namespace rendezvous::oracle
