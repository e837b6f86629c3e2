#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rendezvous/io.hpp"
#include "rendezvous/simengine.hpp"
#include "test_support.hpp"

using namespace rendezvous;
using testing_support::binomial_sigma;

namespace {

const std::vector<HopAlgorithm> kAll = {HopAlgorithm::random(), HopAlgorithm::synmac(), HopAlgorithm::lsh(),
                                        HopAlgorithm::lsh2(),   HopAlgorithm::lsh3(),   HopAlgorithm::lsh4(2, 0.5)};

SimulationConfig sync_cfg(std::uint64_t experiments, std::uint64_t slots, std::uint64_t seed = 0) {
    SimulationConfig cfg;
    cfg.setting = Setting::Sync;
    cfg.experiments = experiments;
    cfg.slots_budget = slots;
    cfg.base_seed = seed;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST(RunAttempt, SingleChannelEachRendezvousImmediately) {
    ProblemInstance inst(ChannelSet(2, {0}), ChannelSet(2, {0}));
    auto cfg = sync_cfg(1, 100);
    for (const auto& alg : kAll) {
        auto out = run_attempt(inst, alg, cfg, SharedRandomness(1, 2), PrivateRandomness(2), PrivateRandomness(3), 0);
        ASSERT_FALSE(out.censored()) << alg.name();
        EXPECT_EQ(out.ttr->value, 1u) << alg.name();
    }
}

TEST(RunAttempt, SyncRejectsDrift) {
    ProblemInstance inst(ChannelSet(4, {0}), ChannelSet(4, {0}));
    EXPECT_THROW(run_attempt(inst, HopAlgorithm::random(), sync_cfg(1, 10), SharedRandomness(1, 4),
                             PrivateRandomness(2), PrivateRandomness(3), 1),
                 InvalidArgument);
}

TEST(RunAttempt, Lsh2SyncNeverExceedsN) {
    std::mt19937_64 gen(5);
    auto cfg = sync_cfg(1, 10'000);
    for (int k = 0; k < 3000; ++k) {
        auto inst = testing_support::random_instance(gen, 2, 64);
        auto out = run_attempt(inst, HopAlgorithm::lsh2(), cfg, SharedRandomness(k, inst.n_total()),
                               PrivateRandomness(1), PrivateRandomness(2), 0);
        ASSERT_FALSE(out.censored());
        ASSERT_LE(out.ttr->value, inst.n_total());
    }
}

TEST(RunAttempt, RandomMeanMatchesGeometric) {
    auto inst = gen_uniform({64, 15, 15, 5}, PrivateRandomness(17));
    auto cfg = sync_cfg(1, 1'000'000);
    AttemptRunner runner;
    constexpr int kAttempts = 100'000;
    double sum = 0;
    for (int a = 0; a < kAttempts; ++a) {
        auto out = runner.run(inst, HopAlgorithm::random(), SharedRandomness(a, 64), PrivateRandomness(2 * a),
                              PrivateRandomness(2 * a + 1), 0, cfg.slots_budget);
        sum += static_cast<double>(out.ttr->value);
    }
    EXPECT_NEAR(sum / kAttempts, 45.0, 0.02 * 45.0);
}

TEST(RunAttempt, CensoredAtBudget) {
    // Distinct single channels would never meet; use a large instance with tiny budget.
    auto inst = gen_uniform({256, 60, 60, 1}, PrivateRandomness(1));
    AttemptRunner runner;
    auto out = runner.run(inst, HopAlgorithm::random(), SharedRandomness(0, 256), PrivateRandomness(1),
                          PrivateRandomness(2), 0, 3);
    if (out.censored()) {
        EXPECT_EQ(out.slots_used, 3u);
    } else {
        EXPECT_LE(out.ttr->value, 3u);
    }
}

TEST(RunExperiment, ImmediateRendezvousFillsBudget) {
    ProblemInstance inst(ChannelSet(2, {0}), ChannelSet(2, {0}));
    auto st = run_experiment(inst, HopAlgorithm::lsh2(), sync_cfg(1, 10), 0);
    EXPECT_EQ(st.ttrs.size(), 10u);
    EXPECT_DOUBLE_EQ(st.ettr, 1.0);
    EXPECT_EQ(st.mttr, 1u);
    EXPECT_EQ(st.censored, 0u);
}

TEST(RunExperiment, Lsh2SamplesBoundedByN) {
    InstanceSpec spec{64, 15, 15, 3};
    for (std::uint64_t e = 0; e < 20; ++e) {
        auto st = run_experiment(spec, HopAlgorithm::lsh2(), sync_cfg(1, 5000, 9), e);
        for (auto t : st.ttrs) ASSERT_LE(t.value, 64u);
        ASSERT_LE(st.mttr, 64u);
    }
}

TEST(RunExperiment, DeterministicReplay) {
    InstanceSpec spec{64, 15, 15, 5};
    for (const auto& alg : kAll) {
        auto a = run_experiment(spec, alg, sync_cfg(1, 3000, 42), 7);
        auto b = run_experiment(spec, alg, sync_cfg(1, 3000, 42), 7);
        EXPECT_EQ(a.ttrs, b.ttrs) << alg.name();
        EXPECT_EQ(a.ettr, b.ettr);
    }
}

TEST(RunExperiment, BudgetAndCensoringInvariants) {
    InstanceSpec spec{256, 60, 60, 2};
    SimulationConfig cfg = sync_cfg(1, 500, 3);
    cfg.setting = Setting::Async;
    cfg.drift = Drift::uniform(1, 100);
    for (const auto& alg : kAll) {
        for (std::uint64_t e = 0; e < 10; ++e) {
            auto st = run_experiment(spec, alg, cfg, e);
            std::uint64_t used = 0;
            for (auto t : st.ttrs) {
                ASSERT_LE(t.value, cfg.slots_budget);
                used += t.value;
            }
            ASSERT_LE(used, cfg.slots_budget);
            ASSERT_LE(st.censored, 1u);
            if (!st.all_censored()) {
                ASSERT_GE(st.ettr, 1.0);
                ASSERT_GE(static_cast<double>(st.mttr), std::ceil(st.ettr));
            }
            ASSERT_GE(st.drift, 1u);
            ASSERT_LE(st.drift, 100u);
        }
    }
}

TEST(RunExperiment, AsyncWithZeroDriftEqualsSync) {
    InstanceSpec spec{64, 15, 15, 6};
    auto sync = sync_cfg(1, 2000, 11);
    auto async = sync;
    async.setting = Setting::Async;
    async.drift = Drift::fixed(0);
    for (const auto& alg : {HopAlgorithm::random(), HopAlgorithm::synmac(), HopAlgorithm::lsh3(),
                            HopAlgorithm::lsh4(10, 0.75)}) {
        for (std::uint64_t e = 0; e < 5; ++e)
            EXPECT_EQ(run_experiment(spec, alg, sync, e).ttrs, run_experiment(spec, alg, async, e).ttrs) << alg.name();
    }
}

TEST(RunAttempt, UserSwapSymmetry) {
    std::mt19937_64 gen(21);
    AttemptRunner runner;
    for (int k = 0; k < 500; ++k) {
        auto inst = testing_support::random_instance(gen, 4, 48);
        auto swapped = inst.swapped();
        SharedRandomness shared(k, inst.n_total());
        PrivateRandomness p1(1000 + k), p2(5000 + k);
        for (const auto& alg : {HopAlgorithm::lsh(), HopAlgorithm::lsh2(), HopAlgorithm::lsh3(),
                                HopAlgorithm::lsh4(3, 0.5), HopAlgorithm::random(), HopAlgorithm::synmac()}) {
            auto a = runner.run(inst, alg, shared, p1, p2, 0, 100'000);
            auto b = runner.run(swapped, alg, shared, p2, p1, 0, 100'000);
            ASSERT_EQ(a.ttr, b.ttr) << alg.name();
        }
    }
}

TEST(EstimateProb, Lsh2SyncMatchesJaccard) {
    auto inst = gen_uniform({64, 15, 15, 5}, PrivateRandomness(8));
    constexpr std::uint64_t kSamples = 100'000;
    const double p = estimate_prob(inst, HopAlgorithm::lsh2(), sync_cfg(1, 1, 4), kSamples);
    EXPECT_NEAR(p, 0.2, 3 * binomial_sigma(0.2, kSamples));
}

TEST(EstimateProb, RandomIsProductOfUniforms) {
    auto inst = gen_uniform({64, 15, 15, 5}, PrivateRandomness(8));
    constexpr std::uint64_t kSamples = 200'000;
    const double expect = 5.0 / 225.0;
    const double p = estimate_prob(inst, HopAlgorithm::random(), sync_cfg(1, 1, 4), kSamples);
    EXPECT_NEAR(p, expect, 3 * binomial_sigma(expect, kSamples));
}

TEST(EstimateProb, Lsh3AsyncNearApproximation) {
    auto inst = gen_uniform({1024, 60, 60, 60}, PrivateRandomness(8));
    auto cfg = sync_cfg(1, 1, 6);
    cfg.setting = Setting::Async;
    const double p = estimate_prob(inst, HopAlgorithm::lsh3(), cfg, 100'000);
    const double approx = theory::lsh3_prob_approx({60, 60, 60});
    EXPECT_NEAR(p, approx, 0.15 * approx);
}

TEST(RunSweep, JaccardGridOfFigureThree) {
    std::vector<InstanceSpec> specs;
    for (std::uint32_t n12 = 1; n12 <= 15; ++n12) specs.push_back({64, 15, 15, n12});
    auto res = run_sweep(specs, {HopAlgorithm::lsh2()}, sync_cfg(2, 200));
    ASSERT_EQ(res.rows.size(), 15u);
    EXPECT_NEAR(res.rows.front().jaccard, 1.0 / 29.0, 1e-12);
    EXPECT_DOUBLE_EQ(res.rows.back().jaccard, 1.0);
    for (std::size_t k = 0; k < res.rows.size(); ++k) {
        const double n12 = k + 1.0;
        EXPECT_NEAR(res.rows[k].jaccard, n12 / (30.0 - n12), 1e-12);
        EXPECT_NEAR(*res.rows[k].theory_ettr, (30.0 - n12) / n12, 1e-9);
    }
}

TEST(RunSweep, SingleExperimentRowEqualsRunExperiment) {
    InstanceSpec spec{64, 15, 15, 4};
    auto cfg = sync_cfg(1, 1500, 77);
    for (const auto& alg : kAll) {
        auto res = run_sweep({spec}, {alg}, cfg);
        auto st = run_experiment(spec, alg, cfg, 0);
        ASSERT_EQ(res.rows.size(), 1u);
        EXPECT_EQ(res.rows[0].ettr_mean, st.ettr);
        EXPECT_EQ(res.rows[0].mttr_max, st.mttr);
        EXPECT_EQ(res.rows[0].mttr_mean, static_cast<double>(st.mttr));
        EXPECT_EQ(res.rows[0].censored, st.censored);
    }
}

TEST(RunSweep, IndependentOfWorkerCount) {
    std::vector<InstanceSpec> specs = {{64, 15, 15, 3}, {64, 15, 15, 9}, {32, 8, 6, 2, Layout::Contiguous}};
    auto cfg = sync_cfg(12, 800, 5);
    cfg.setting = Setting::Async;
    cfg.drift = Drift::uniform(1, 20);
    cfg.threads = 1;
    const auto reference = io::sweep_csv(run_sweep(specs, kAll, cfg));
    for (unsigned threads : {2u, 3u, 8u}) {
        cfg.threads = threads;
        EXPECT_EQ(io::sweep_csv(run_sweep(specs, kAll, cfg)), reference) << threads;
    }
}

TEST(RunSweep, PropagatesInfeasibleSpec) {
    EXPECT_THROW(run_sweep({{16, 10, 10, 2}}, {HopAlgorithm::random()}, sync_cfg(1, 10)), InfeasibleSpec);
}

// ETTR should not increase with n12; checked pairwise at 3 sigma.
TEST(RunSweep, EttrMonotoneInOverlap) {
    auto check = [](const SweepResult& res, std::size_t algs) {
        for (std::size_t a = 0; a < algs; ++a) {
            for (std::size_t k = 0; k + 1 < res.rows.size() / algs; ++k) {
                const auto& lo = res.rows[k * algs + a];
                const auto& hi = res.rows[(k + 1) * algs + a];
                const double tol = 3.0 * std::hypot(lo.ettr_ci95, hi.ettr_ci95) / 1.96;
                EXPECT_LE(hi.ettr_mean, lo.ettr_mean + tol)
                    << lo.algorithm.name() << " n12 " << lo.spec.n12 << " -> " << hi.spec.n12;
            }
        }
    };
    std::vector<InstanceSpec> sync_specs;
    for (std::uint32_t n12 = 1; n12 <= 15; n12 += 2) sync_specs.push_back({64, 15, 15, n12});
    std::vector<HopAlgorithm> sync_algs = {HopAlgorithm::random(), HopAlgorithm::synmac(), HopAlgorithm::lsh(),
                                           HopAlgorithm::lsh2()};
    auto cfg = sync_cfg(60, 2000, 13);
    cfg.threads = 0;
    check(run_sweep(sync_specs, sync_algs, cfg), sync_algs.size());

    std::vector<HopAlgorithm> async_algs = {HopAlgorithm::lsh3(), HopAlgorithm::lsh4(5, 0.75)};
    cfg.setting = Setting::Async;
    check(run_sweep(sync_specs, async_algs, cfg), async_algs.size());
}
