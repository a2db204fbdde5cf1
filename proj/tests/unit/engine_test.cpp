#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "salso/engine.hpp"
#include "salso/errors.hpp"
#include "salso/oracle.hpp"

namespace salso {
namespace {

ClusterLabels L(std::vector<long long> raw) { return canonicalize(raw); }

DrawsMatrix three_item_draws() { return DrawsMatrix::from_raw({{1, 1, 2}, {1, 2, 2}}); }

TEST(RunSeed, DeterministicAndDistinct) {
    EXPECT_EQ(run_seed(7, 3), run_seed(7, 3));
    std::set<std::uint64_t> seen;
    for (std::size_t r = 0; r < 1000; ++r) seen.insert(run_seed(7, r));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(run_seed(7, 0), run_seed(8, 0));
}

TEST(SalsoConfig, ValidationAndResolution) {
    const auto draws = three_item_draws();
    SalsoConfig c;
    EXPECT_EQ(c.resolve_max_clusters(draws), 2);
    c.max_clusters = 50;
    EXPECT_EQ(c.resolve_max_clusters(draws), 3);
    c.max_clusters = 0;
    EXPECT_THROW(c.resolve_max_clusters(draws), InputError);
    SalsoConfig bad;
    bad.n_runs = 0;
    EXPECT_THROW(bad.validate(), InputError);
    bad = SalsoConfig{};
    bad.p_sa = 1.5;
    EXPECT_THROW(bad.validate(), InputError);
}

TEST(RastelliFrielMode, DisablesTheExtensions) {
    const auto c = rastelli_friel_mode(5, 4);
    EXPECT_EQ(c.n_runs, 1u);
    EXPECT_EQ(c.p_sa, 0.0);
    EXPECT_EQ(c.n_max_zealous, 0u);
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.max_clusters, 4);
}

TEST(InitializeSequential, ReproducesASingleDraw) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 25;
        const auto draw = test::random_partition(rng, n, 5);
        const DrawsMatrix draws({draw});
        for (LossKind kind : {LossKind::Binder, LossKind::VI}) {
            const LossEvaluator eval(draws, LossSpec{kind});
            RunState state(eval, draw.num_clusters(), rng());
            state.initialize_sequential();
            EXPECT_EQ(state.labels(), draw);
            EXPECT_TRUE(state.verify());
        }
    }
}

TEST(InitializeSequential, SingleClusterCeiling) {
    std::mt19937_64 rng(67);
    const auto draws = test::random_draws(rng, 10, 12, 4);
    const LossEvaluator eval(draws, LossSpec{});
    RunState state(eval, 1, 3);
    state.initialize_sequential();
    EXPECT_EQ(state.num_clusters(), 1);
    state.sweeten(100);
    EXPECT_EQ(state.labels(), ClusterLabels::from_canonical(std::vector<int>(12, 1)));
}

TEST(InitializeRandom, LabelsAreUniform) {
    const auto draws = DrawsMatrix::from_raw({{1, 2, 3, 4, 1, 2, 3, 4, 1, 2}});
    const LossEvaluator eval(draws, LossSpec{});
    RunState state(eval, 4, 71);
    std::vector<double> counts(4, 0.0);
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        for (int l : state.initialize_random()) {
            ASSERT_GE(l, 1);
            ASSERT_LE(l, 4);
            counts[l - 1] += 1.0;
        }
        ASSERT_LE(state.num_clusters(), 4);
        ASSERT_TRUE(state.verify());
    }
    const double expected = trials * 10.0 / 4.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 16.27);  // 3 degrees of freedom, p = 0.001
}

TEST(RunOnce, InitializationMixFollowsProbability) {
    std::mt19937_64 rng(73);
    const auto draws = test::random_draws(rng, 5, 6, 3);
    const LossEvaluator eval(draws, LossSpec{});
    SalsoConfig c;
    c.p_sa = 0.3;
    c.seed = 99;
    const int runs = 1000;
    int sequential = 0;
    for (int r = 0; r < runs; ++r)
        sequential += run_once(eval, c, r).diagnostics.init == InitMethod::Sequential;
    const double sd = std::sqrt(runs * 0.3 * 0.7);
    EXPECT_NEAR(sequential, runs * 0.3, 4 * sd);
}

TEST(Sweeten, OneScanAtAStrictOptimum) {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = test::random_partition(rng, 12, 4);
        const DrawsMatrix draws(std::vector<ClusterLabels>(5, p));
        const LossEvaluator eval(draws, LossSpec{LossKind::Binder, 1.0 + trial % 3, 1.0});
        RunState state(eval, 12, rng());
        state.assign(p);
        const auto s = state.sweeten(1000);
        EXPECT_EQ(s.scans, 1u);
        EXPECT_EQ(state.labels(), p);
    }
}

// Once converged, further scans can only trade between tied placements.
TEST(Sweeten, ConvergedStateOnlyMovesAlongTies) {
    std::mt19937_64 rng(80);
    for (int trial = 0; trial < 30; ++trial) {
        const auto draws = test::random_draws(rng, 20, 10, 3);
        const LossEvaluator eval(draws, LossSpec{LossKind::Binder, 1.0 + trial % 3, 1.0});
        RunState state(eval, 10, rng());
        state.initialize_random();
        const auto first = state.sweeten(1000);
        EXPECT_FALSE(first.hit_max_scans);
        const double loss = state.current_loss();
        state.sweeten(1000);
        EXPECT_NEAR(state.current_loss(), loss, 1e-12);
    }
}

TEST(Sweeten, NeverIncreasesLoss) {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 60; ++trial) {
        const auto draws = test::random_draws(rng, 15, 12, 4);
        const LossKind kind = trial % 2 ? LossKind::Binder : LossKind::GVI;
        const LossEvaluator eval(draws, LossSpec{kind, 0.5 + trial % 4, 1.0});
        RunState state(eval, 12, rng());
        state.initialize_random();
        const double before = state.current_loss();
        state.sweeten(1000);
        EXPECT_LE(state.current_loss(), before + 1e-12);
        EXPECT_TRUE(state.verify());
    }
}

TEST(Sweeten, RespectsScanCap) {
    std::mt19937_64 rng(89);
    const auto draws = test::random_draws(rng, 30, 20, 5);
    const LossEvaluator eval(draws, LossSpec{});
    RunState state(eval, 20, 1);
    state.initialize_random();
    const auto s = state.sweeten(0);
    EXPECT_EQ(s.scans, 0u);
    EXPECT_TRUE(s.hit_max_scans);
}

TEST(Sweeten, ReachesTheThreeItemOptimum) {
    const auto draws = three_item_draws();
    const LossEvaluator eval(draws, LossSpec{});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RunState state(eval, 3, seed);
        state.assign(L({1, 1, 1}));
        state.sweeten(100);
        EXPECT_NEAR(state.current_loss(), 2.0 / 9.0, 1e-12);
    }
}

TEST(ZealousPhase, ZeroBudgetIsANoOp) {
    std::mt19937_64 rng(97);
    const auto draws = test::random_draws(rng, 10, 8, 3);
    const LossEvaluator eval(draws, LossSpec{});
    RunState state(eval, 8, 5);
    state.initialize_random();
    const auto before = state.labels();
    const auto stats = state.zealous_phase(0);
    EXPECT_EQ(stats.attempts, 0u);
    EXPECT_EQ(state.labels(), before);
}

TEST(ZealousPhase, KeepsOnlyStrictImprovements) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const auto draws = test::random_draws(rng, 15, 10, 4);
        const LossKind kind = trial % 2 ? LossKind::Binder : LossKind::VI;
        const LossEvaluator eval(draws, LossSpec{kind});
        RunState state(eval, 10, rng());
        state.initialize_random();
        state.sweeten(1000);
        const auto before = state.labels();
        const double loss_before = state.current_loss();
        const auto stats = state.zealous_phase(10);
        EXPECT_LE(stats.attempts, 10u);
        EXPECT_LE(stats.attempts, static_cast<std::size_t>(before.num_clusters()));
        if (stats.accepted == 0) {
            EXPECT_EQ(state.labels(), before);
        } else {
            EXPECT_LT(state.current_loss(), loss_before);
        }
        EXPECT_TRUE(state.verify());
    }
}

// Two tight groups that draws agree on, plus a candidate that splits one of
// them evenly between two clusters. Single-item moves cannot repair the
// split but destroying one half and reallocating it can.
TEST(ZealousPhase, EscapesASplitCluster) {
    std::vector<std::vector<long long>> raw(20, {1, 1, 1, 1, 2, 2, 2, 2});
    const DrawsMatrix draws = DrawsMatrix::from_raw(raw);
    const LossEvaluator eval(draws, LossSpec{LossKind::VI});
    const auto split = L({1, 1, 2, 2, 3, 3, 3, 3});
    RunState state(eval, 3, 7);
    state.assign(split);
    state.sweeten(100);
    const auto stuck = state.labels();
    const auto stats = state.zealous_phase(10);
    if (stuck != L({1, 1, 1, 1, 2, 2, 2, 2})) EXPECT_GE(stats.accepted, 1u);
    EXPECT_EQ(state.labels(), L({1, 1, 1, 1, 2, 2, 2, 2}));
}

TEST(VilbObjective, ScoresMatchBoundDifferences) {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng() % 10;
        const auto draws = test::random_draws(rng, 10, n, 3);
        const LossEvaluator eval(draws, LossSpec{LossKind::VILB});
        const auto base = test::random_partition(rng, n, 3);
        const std::size_t item = rng() % n;
        RunState state(eval, static_cast<int>(n), 1);
        state.assign(base);
        std::vector<double> scores;
        bool seen = false;
        state.set_observer([&](const AllocationEvent& e) {
            if (seen || e.item != item) return;
            seen = true;
            const std::vector<int> labels(e.labels.begin(), e.labels.end());
            std::vector<double> full;
            for (std::size_t c = 0; c < e.scores.size(); ++c) {
                auto cand = labels;
                cand[item] = static_cast<int>(c);
                for (int& v : cand) ++v;
                full.push_back(eval(test::canon(cand)));
            }
            for (std::size_t c = 1; c < e.scores.size(); ++c)
                EXPECT_NEAR(e.scores[c] - e.scores[0], static_cast<double>(n) * (full[c] - full[0]), 1e-8);
        });
        state.sweeten(1);
        EXPECT_TRUE(seen);
        EXPECT_TRUE(state.verify());
    }
}

TEST(RunOnce, DiagnosticsAreConsistent) {
    std::mt19937_64 rng(107);
    const auto draws = test::random_draws(rng, 30, 15, 4);
    const LossEvaluator eval(draws, LossSpec{});
    SalsoConfig c;
    c.seed = 11;
    const auto out = run_once(eval, c, 2);
    EXPECT_EQ(out.diagnostics.seed, run_seed(11, 2));
    EXPECT_DOUBLE_EQ(out.loss, expected_loss(draws, out.estimate, LossSpec{}));
    EXPECT_EQ(out.diagnostics.loss, out.loss);
    EXPECT_GE(out.diagnostics.scans, 1u);
    const auto again = run_once(eval, c, 2);
    EXPECT_EQ(again.estimate, out.estimate);
}

TEST(Salso, DeterministicAndIndependentOfWorkers) {
    std::mt19937_64 rng(109);
    const auto draws = synthetic_draws({.n = 25, .k_true = 4, .h = 60, .q = 0.4, .seed = 3});
    for (LossKind kind : {LossKind::Binder, LossKind::VI, LossKind::OMARI, LossKind::VILB}) {
        SalsoConfig c;
        c.seed = 5;
        c.n_runs = 8;
        c.n_workers = 1;
        const auto one = salso(draws, LossSpec{kind}, c);
        c.n_workers = 3;
        const auto three = salso(draws, LossSpec{kind}, c);
        EXPECT_EQ(one.estimate, three.estimate);
        EXPECT_EQ(one.expected_loss, three.expected_loss);
        EXPECT_EQ(one.best_run_index, three.best_run_index);
        ASSERT_EQ(one.runs.size(), 8u);
        for (std::size_t r = 0; r < 8; ++r) EXPECT_EQ(one.runs[r].loss, three.runs[r].loss);
        for (const auto& run : one.runs) EXPECT_GE(run.loss, one.expected_loss);
    }
}

TEST(Salso, SingleRunMatchesRunOnce) {
    const auto draws = synthetic_draws({.n = 20, .k_true = 3, .h = 50, .q = 0.3, .seed = 8});
    SalsoConfig c;
    c.seed = 17;
    c.n_runs = 1;
    const auto s = salso(draws, LossSpec{}, c);
    const auto r = run_once(draws, LossSpec{}, c, 0);
    EXPECT_EQ(s.estimate, r.estimate);
    EXPECT_EQ(s.expected_loss, r.loss);
}

TEST(Salso, MoreRunsNeverHurt) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto draws = synthetic_draws({.n = 30, .k_true = 5, .h = 50, .q = 0.5, .seed = seed});
        SalsoConfig c;
        c.seed = seed;
        c.n_runs = 1;
        const double one = salso(draws, LossSpec{LossKind::VI}, c).expected_loss;
        c.n_runs = 6;
        EXPECT_LE(salso(draws, LossSpec{LossKind::VI}, c).expected_loss, one);
    }
}

TEST(Salso, RespectsClusterCeiling) {
    const auto draws = synthetic_draws({.n = 30, .k_true = 6, .h = 40, .q = 0.6, .seed = 2});
    for (int k : {1, 2, 3, 5}) {
        SalsoConfig c;
        c.max_clusters = k;
        for (LossKind kind : {LossKind::Binder, LossKind::VI, LossKind::NID, LossKind::VILB}) {
            const auto res = salso(draws, LossSpec{kind, 1.0, 0.1}, c);
            EXPECT_LE(res.estimate.num_clusters(), k);
            EXPECT_EQ(res.max_clusters, k);
        }
    }
}

TEST(Salso, VilbValueStaysBelowExpectedVi) {
    const auto draws = synthetic_draws({.n = 20, .k_true = 3, .h = 40, .q = 0.4, .seed = 4});
    const auto res = salso(draws, LossSpec{LossKind::VILB}, SalsoConfig{});
    EXPECT_LE(res.expected_loss, expected_loss(draws, res.estimate, LossSpec{LossKind::VI}) + 1e-9);
}

TEST(Salso, RejectsZeroOneLoss) {
    EXPECT_THROW(salso(three_item_draws(), LossSpec{LossKind::OneZero}, SalsoConfig{}), UsageError);
}

TEST(Salso, FindsTheThreeItemOptimum) {
    const auto res = salso(three_item_draws(), LossSpec{}, SalsoConfig{});
    EXPECT_NEAR(res.expected_loss, 2.0 / 9.0, 1e-12);
    const auto bf = brute_force_minimizer(three_item_draws(), LossSpec{}, 2);
    EXPECT_NE(std::find(bf.minimizers.begin(), bf.minimizers.end(), res.estimate), bf.minimizers.end());
}

} // namespace
} // namespace salso
