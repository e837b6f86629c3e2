#pragma once

// Monte Carlo measurement of time-to-rendezvous.
//
// An experiment draws one instance and one clock drift, then runs rendezvous
// attempts back to back until its slot budget is spent. Every attempt starts
// both users at local time 0 with freshly drawn shared randomness, so TTR
// samples within an experiment are i.i.d. The attempt that runs into the end
// of the budget is censored: counted, never averaged.
//
// Results are a pure function of (config, seeds). Experiments run on a worker
// pool but are reduced in experiment-index order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rendezvous/chalgos.hpp"
#include "rendezvous/core.hpp"
#include "rendezvous/instances.hpp"
#include "rendezvous/random.hpp"
#include "rendezvous/theory.hpp"

namespace rendezvous {

enum class Setting : std::uint8_t { Sync, Async };

constexpr std::string_view setting_name(Setting s) noexcept { return s == Setting::Sync ? "sync" : "async"; }

/// Clock offset of user 2 relative to user 1, in slots.
struct Drift {
    enum class Kind : std::uint8_t { Fixed, UniformRange };
    Kind kind = Kind::UniformRange;
    std::uint32_t lo = 1;
    std::uint32_t hi = 100;

    static Drift fixed(std::uint32_t d) { return {Kind::Fixed, d, d}; }
    static Drift uniform(std::uint32_t lo, std::uint32_t hi) {
        if (lo > hi) throw InvalidArgument("drift range lo > hi");
        return {Kind::UniformRange, lo, hi};
    }

    std::uint32_t draw(const CounterStream& s, std::uint64_t index) const noexcept {
        if (kind == Kind::Fixed) return lo;
        return lo + static_cast<std::uint32_t>(s.below(index, std::uint64_t{hi} - lo + 1));
    }

    friend bool operator==(const Drift&, const Drift&) = default;
};

struct SimulationConfig {
    Setting setting = Setting::Sync;
    Drift drift = Drift::uniform(1, 100);
    std::uint64_t slots_budget = 10'000;
    std::uint64_t experiments = 10'000;
    std::uint64_t base_seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const {
        if (slots_budget < 1) throw InvalidArgument("slot budget must be at least 1");
        if (experiments < 1) throw InvalidArgument("experiment count must be at least 1");
    }
};

/// Result of one attempt: a TTR, or censored after `slots_used` slots.
struct AttemptOutcome {
    std::optional<TtrSample> ttr;
    std::uint64_t slots_used = 0;

    bool censored() const noexcept { return !ttr.has_value(); }
};

struct ExperimentStats {
    std::vector<TtrSample> ttrs;
    double ettr = 0.0;
    std::uint64_t mttr = 0;
    std::uint64_t censored = 0;
    std::uint32_t drift = 0;

    bool all_censored() const noexcept { return ttrs.empty(); }
};

// ---------------------------------------------------------------------------

/// Per-attempt hopping state for both users. Holds reusable buffers so the
/// engine allocates once per worker rather than once per attempt.
class AttemptRunner {
public:
    AttemptOutcome run(const ProblemInstance& inst, const HopAlgorithm& alg, const SharedRandomness& shared,
                       const PrivateRandomness& priv1, const PrivateRandomness& priv2, std::uint32_t drift,
                       std::uint64_t max_slots) {
        prepare(inst, alg, shared, priv1, priv2);
        const std::uint32_t n = inst.n_total();
        const bool lsh2_sync = alg.kind == AlgorithmKind::Lsh2 && drift == 0;
        for (std::uint64_t t = 0; t < max_slots; ++t) {
            if (hop(0, t) == hop(1, t + drift)) return {TtrSample(t + 1), t + 1};
            if (lsh2_sync && t + 1 >= n)
                throw std::logic_error("LSH2 synchronous attempt exceeded N slots without rendezvous");
        }
        return {std::nullopt, max_slots};
    }

    /// Single-slot collision test at user-1 time t and user-2 time t + drift.
    bool collides(const ProblemInstance& inst, const HopAlgorithm& alg, const SharedRandomness& shared,
                  const PrivateRandomness& priv1, const PrivateRandomness& priv2, std::uint64_t t,
                  std::uint32_t drift) {
        prepare(inst, alg, shared, priv1, priv2);
        return hop(0, t) == hop(1, t + drift);
    }

private:
    struct User {
        const ChannelSet* set = nullptr;
        const PrivateRandomness* priv = nullptr;
        PrivateRandomness coin{0};
        HashRing ring;
        ChannelMultiset multiset;
    };

    void prepare(const ProblemInstance& inst, const HopAlgorithm& alg, const SharedRandomness& shared,
                 const PrivateRandomness& priv1, const PrivateRandomness& priv2) {
        alg_ = alg;
        n_ = inst.n_total();
        users_[0].set = &inst.c1();
        users_[1].set = &inst.c2();
        users_[0].priv = &priv1;
        users_[1].priv = &priv2;
        u_stream_ = shared.stream(SharedStream::U);
        switch (alg.kind) {
            case AlgorithmKind::Random:
            case AlgorithmKind::SynMac:
                break;
            case AlgorithmKind::Lsh:
                for (auto& u : users_) u.ring.rebuild(*u.set, nullptr);
                break;
            case AlgorithmKind::Lsh2:
            case AlgorithmKind::Lsh3:
            case AlgorithmKind::Lsh4:
                pi1_.shuffle_from(shared.stream(SharedStream::Pi1), n_);
                for (auto& u : users_) u.ring.rebuild(*u.set, &pi1_);
                if (alg.kind != AlgorithmKind::Lsh3) pi2_.shuffle_from(shared.stream(SharedStream::Pi2), n_);
                if (alg.kind == AlgorithmKind::Lsh4) {
                    if (alg.t0 > n_) throw InvalidArgument("T0 exceeds N");
                    for (auto& u : users_) {
                        u.multiset.entries.resize(alg.t0);
                        for (std::uint32_t t = 0; t < alg.t0; ++t) u.multiset.entries[t] = u.ring.hop(pi2_(t));
                        u.coin = lsh4_coin_stream(*u.priv);
                    }
                }
                break;
        }
    }

    ChannelId hop(int who, std::uint64_t t) const {
        const User& u = users_[who];
        switch (alg_.kind) {
            case AlgorithmKind::Random: return random_hop(*u.set, *u.priv, t);
            case AlgorithmKind::SynMac: return synmac_hop(*u.set, t, *u.priv, t);
            case AlgorithmKind::Lsh:
            case AlgorithmKind::Lsh3: return u.ring.hop(static_cast<std::uint32_t>(u_stream_.below(t, n_)));
            case AlgorithmKind::Lsh2: return u.ring.hop(pi2_(static_cast<std::uint32_t>(t % n_)));
            case AlgorithmKind::Lsh4: return lsh4_hop(*u.set, u.multiset, alg_.p, *u.priv, u.coin, t);
        }
        return {};
    }

    HopAlgorithm alg_;
    std::uint32_t n_ = 0;
    User users_[2];
    CounterStream u_stream_;
    Permutation pi1_;
    Permutation pi2_;
};

/// One rendezvous attempt. User 1 hops at local time t, user 2 at t + drift.
inline AttemptOutcome run_attempt(const ProblemInstance& inst, const HopAlgorithm& alg, const SimulationConfig& cfg,
                                  const SharedRandomness& shared, const PrivateRandomness& priv1,
                                  const PrivateRandomness& priv2, std::uint32_t drift) {
    if (cfg.setting == Setting::Sync && drift != 0) throw InvalidArgument("drift must be 0 in the sync setting");
    AttemptRunner runner;
    return runner.run(inst, alg, shared, priv1, priv2, drift, cfg.slots_budget);
}

// ---------------------------------------------------------------------------
// Seed derivation

/// Random streams of one experiment, derived from a root key.
class ExperimentSeeds {
public:
    explicit ExperimentSeeds(CounterStream root) : root_(root) {}

    /// Seeds for experiment `index` of a spec-driven run.
    static ExperimentSeeds for_spec(std::uint64_t base_seed, const InstanceSpec& spec, std::uint64_t index) {
        return ExperimentSeeds(CounterStream(base_seed).child(spec.key()).child(index));
    }
    /// Seeds for experiment `index` on a caller-supplied instance.
    static ExperimentSeeds for_instance(std::uint64_t base_seed, std::uint64_t index) {
        return ExperimentSeeds(CounterStream(base_seed).child("fixed-instance").child(index));
    }

    PrivateRandomness instance_rng() const { return PrivateRandomness(root_.child("instance").key()); }
    std::uint32_t drift(const SimulationConfig& cfg) const {
        return cfg.setting == Setting::Sync ? 0 : cfg.drift.draw(root_.child("drift"), 0);
    }
    SharedRandomness shared(std::uint64_t attempt, std::uint32_t n_total) const {
        return SharedRandomness(root_.child("shared").bits(attempt), n_total);
    }
    PrivateRandomness user(int who, std::uint64_t attempt) const {
        return PrivateRandomness(root_.child(who == 0 ? "user1" : "user2").bits(attempt));
    }

private:
    CounterStream root_;
};

namespace detail {

inline ExperimentStats run_experiment_with(AttemptRunner& runner, const ProblemInstance& inst,
                                           const HopAlgorithm& alg, const SimulationConfig& cfg,
                                           const ExperimentSeeds& seeds) {
    ExperimentStats stats;
    stats.drift = seeds.drift(cfg);
    std::uint64_t used = 0;
    double sum = 0.0;
    for (std::uint64_t attempt = 0; used < cfg.slots_budget; ++attempt) {
        auto shared = seeds.shared(attempt, inst.n_total());
        auto p1 = seeds.user(0, attempt);
        auto p2 = seeds.user(1, attempt);
        auto out = runner.run(inst, alg, shared, p1, p2, stats.drift, cfg.slots_budget - used);
        used += out.slots_used;
        if (out.censored()) {
            ++stats.censored;
            break;
        }
        stats.ttrs.push_back(*out.ttr);
        sum += static_cast<double>(out.ttr->value);
        stats.mttr = std::max(stats.mttr, out.ttr->value);
    }
    if (!stats.ttrs.empty()) stats.ettr = sum / static_cast<double>(stats.ttrs.size());
    return stats;
}

}  // namespace detail

/// Runs one experiment on a fixed instance.
inline ExperimentStats run_experiment(const ProblemInstance& inst, const HopAlgorithm& alg,
                                      const SimulationConfig& cfg, std::uint64_t experiment_index) {
    cfg.validate();
    AttemptRunner runner;
    return detail::run_experiment_with(runner, inst, alg, cfg,
                                       ExperimentSeeds::for_instance(cfg.base_seed, experiment_index));
}

/// Runs one experiment on an instance freshly generated from `spec`.
inline ExperimentStats run_experiment(const InstanceSpec& spec, const HopAlgorithm& alg, const SimulationConfig& cfg,
                                      std::uint64_t experiment_index) {
    cfg.validate();
    spec.validate();
    auto seeds = ExperimentSeeds::for_spec(cfg.base_seed, spec, experiment_index);
    auto inst = generate(spec, seeds.instance_rng());
    AttemptRunner runner;
    return detail::run_experiment_with(runner, inst, alg, cfg, seeds);
}

/// Fraction of independent single-slot trials in which both users collide.
inline double estimate_prob(const ProblemInstance& inst, const HopAlgorithm& alg, const SimulationConfig& cfg,
                            std::uint64_t samples) {
    if (samples < 1) throw InvalidArgument("need at least one sample");
    const CounterStream root = CounterStream(cfg.base_seed).child("estimate-prob");
    const CounterStream drift_stream = root.child("drift");
    AttemptRunner runner;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        SharedRandomness shared(root.child("shared").bits(i), inst.n_total());
        PrivateRandomness p1(root.child("user1").bits(i));
        PrivateRandomness p2(root.child("user2").bits(i));
        std::uint32_t d = cfg.setting == Setting::Sync ? 0 : cfg.drift.draw(drift_stream, i);
        if (runner.collides(inst, alg, shared, p1, p2, 0, d)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    Setting setting = Setting::Sync;
    HopAlgorithm algorithm;
    InstanceSpec spec;
    double jaccard = 0.0;
    std::uint64_t experiments = 0;
    std::uint64_t slots = 0;
    double ettr_mean = 0.0;
    double ettr_ci95 = 0.0;
    double mttr_mean = 0.0;
    std::uint64_t mttr_max = 0;
    std::uint64_t censored = 0;
    std::uint64_t all_censored_experiments = 0;
    std::optional<double> theory_ettr;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

/// Closed-form ETTR to print next to a measurement, when one exists.
inline std::optional<double> theory_ettr_for(const HopAlgorithm& alg, Setting setting,
                                             const theory::InstanceProfile& p) {
    switch (alg.kind) {
        case AlgorithmKind::Random: return theory::random_ettr(p);
        case AlgorithmKind::SynMac: return std::nullopt;
        case AlgorithmKind::Lsh:
        case AlgorithmKind::Lsh2:
            if (setting == Setting::Sync) return theory::lsh2_limit_ettr(p);
            return std::nullopt;
        case AlgorithmKind::Lsh3:
            return setting == Setting::Sync ? theory::lsh2_limit_ettr(p) : theory::lsh3_ettr_approx(p);
        case AlgorithmKind::Lsh4: return theory::lsh4_ettr_approx(p, alg.t0, alg.p);
    }
    return std::nullopt;
}

namespace detail {

struct ExperimentSummary {
    double ettr = 0.0;
    std::uint64_t mttr = 0;
    std::uint64_t censored = 0;
    bool has_samples = false;
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace detail

/// Every (spec, algorithm) pair, one row each, in spec-major order.
inline SweepResult run_sweep(const std::vector<InstanceSpec>& specs, const std::vector<HopAlgorithm>& algs,
                             const SimulationConfig& cfg) {
    cfg.validate();
    for (const auto& s : specs) s.validate();

    struct Job {
        const InstanceSpec* spec;
        const HopAlgorithm* alg;
    };
    std::vector<Job> jobs;
    for (const auto& s : specs)
        for (const auto& a : algs) jobs.push_back({&s, &a});

    const std::uint64_t per_row = cfg.experiments;
    std::vector<detail::ExperimentSummary> results(jobs.size() * per_row);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        AttemptRunner runner;
        for (;;) {
            const std::uint64_t k = next.fetch_add(1, std::memory_order_relaxed);
            if (k >= results.size()) return;
            const Job& job = jobs[k / per_row];
            const std::uint64_t e = k % per_row;
            try {
                auto seeds = ExperimentSeeds::for_spec(cfg.base_seed, *job.spec, e);
                auto inst = generate(*job.spec, seeds.instance_rng());
                auto st = detail::run_experiment_with(runner, inst, *job.alg, cfg, seeds);
                results[k] = {st.ettr, st.mttr, st.censored, !st.all_censored()};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(results.size());
                return;
            }
        }
    };

    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::uint64_t>(detail::resolve_threads(cfg.threads), results.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    SweepResult out;
    out.rows.reserve(jobs.size());
    for (std::size_t r = 0; r < jobs.size(); ++r) {
        SweepRow row;
        row.setting = cfg.setting;
        row.algorithm = *jobs[r].alg;
        row.spec = *jobs[r].spec;
        row.jaccard = row.spec.jaccard();
        row.experiments = per_row;
        row.slots = cfg.slots_budget;

        double sum = 0.0, sum_sq = 0.0, mttr_sum = 0.0;
        std::uint64_t k = 0;
        for (std::uint64_t e = 0; e < per_row; ++e) {
            const auto& s = results[r * per_row + e];
            row.censored += s.censored;
            if (!s.has_samples) {
                ++row.all_censored_experiments;
                continue;
            }
            ++k;
            sum += s.ettr;
            sum_sq += s.ettr * s.ettr;
            mttr_sum += static_cast<double>(s.mttr);
            row.mttr_max = std::max(row.mttr_max, s.mttr);
        }
        if (k > 0) {
            const double kd = static_cast<double>(k);
            row.ettr_mean = sum / kd;
            row.mttr_mean = mttr_sum / kd;
            if (k > 1) {
                const double var = std::max(0.0, (sum_sq - sum * sum / kd) / (kd - 1.0));
                row.ettr_ci95 = 1.96 * std::sqrt(var / kd);
            }
        }
        theory::InstanceProfile profile(row.spec.n1, row.spec.n2, row.spec.n12);
        row.theory_ettr = theory_ettr_for(row.algorithm, cfg.setting, profile);
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace rendezvous
