#include <gtest/gtest.h>

#include <cmath>

#include "ruin2d/simulate.hpp"

using namespace ruin2d;

namespace {

RiskModel m0(double x) {
    return RiskModel::split(ClaimDistribution::lomax(2, 1), ClaimDistribution::exponential(1), 4.0, 2.0, 0.5, x);
}

RiskModel simple(double x1, double x2) {
    return RiskModel::create(ClaimDistribution::lomax(2, 1), ClaimDistribution::exponential(1), 2.0, 1.5, x1, x2);
}

bool same_counts(const RuinEstimate& a, const RuinEstimate& b) {
    return a.ruined_min == b.ruined_min && a.ruined_max == b.ruined_max && a.psi_min_hat == b.psi_min_hat &&
           a.psi_max_hat == b.psi_max_hat && a.se_min == b.se_min && a.se_max == b.se_max &&
           a.total_events == b.total_events;
}

}  // namespace

TEST(Model, Validation) {
    const auto L = ClaimDistribution::lomax(2, 1);
    const auto E = ClaimDistribution::exponential(1);
    EXPECT_THROW(RiskModel::create(L, E, 1.5, 2.0, 1, 2), DomainError);  // p1 < p2
    EXPECT_THROW(RiskModel::create(L, E, 2.0, 1.0, 1, 2), DomainError);  // p2 = rho
    EXPECT_THROW(RiskModel::create(L, E, 2.0, 1.5, 2, 1), DomainError);  // x2 < x1 without degenerate mode
    EXPECT_NO_THROW(RiskModel::create(L, E, 2.0, 1.5, 2, 1, true));
    const auto m = RiskModel::create(L, E, 2.0, 1.5, 1, 2);
    EXPECT_GT(m.m1(), m.m2());
    EXPECT_GT(m.m2(), 0.0);
    EXPECT_DOUBLE_EQ(m0(100).x1(), 50.0);
    EXPECT_THROW(m.at_capital(10.0), DomainError);
}

TEST(SimulatePath, BigClaimRuinsBothAtOnce) {
    // p1=2, p2=1: b1(1) = 1 + 2 = 3, b2(1) = 2 + 1 = 3.
    const auto model = RiskModel::create(ClaimDistribution::lomax(3, 1), ClaimDistribution::exponential(1), 2.0, 1.0,
                                         1.0, 2.0);
    ScriptedEventSource src({{1.0, 10.0}});
    const auto out = simulate_path(model, 5.0, src);
    ASSERT_TRUE(out.tau_min && out.tau_max);
    EXPECT_DOUBLE_EQ(*out.tau_min, 1.0);
    EXPECT_DOUBLE_EQ(*out.tau_max, 1.0);
    EXPECT_DOUBLE_EQ(*out.overshoot_min, 7.0);
    EXPECT_DOUBLE_EQ(*out.overshoot_max, 7.0);
    EXPECT_EQ(*out.ruin_claim_index_min, 1u);
}

TEST(SimulatePath, MinThenMaxRuin) {
    const auto model = RiskModel::create(ClaimDistribution::lomax(3, 1), ClaimDistribution::exponential(1), 2.0, 1.0,
                                         1.0, 5.0);
    ScriptedEventSource src({{1.0, 4.0}, {2.0, 4.0}});
    const auto out = simulate_path(model, 5.0, src);
    ASSERT_TRUE(out.tau_min && out.tau_max);
    EXPECT_DOUBLE_EQ(*out.tau_min, 1.0);  // S=4 > b1(1)=3
    EXPECT_DOUBLE_EQ(*out.tau_max, 2.0);  // S=8 > b2(2)=7
    EXPECT_DOUBLE_EQ(*out.overshoot_min, 1.0);
    EXPECT_DOUBLE_EQ(*out.overshoot_max, 1.0);
    EXPECT_EQ(*out.ruin_claim_index_min, 1u);
    EXPECT_EQ(*out.ruin_claim_index_max, 2u);
    EXPECT_EQ(out.claims_count, 2u);
}

TEST(SimulatePath, NoArrivalsNoRuin) {
    ScriptedEventSource src({{6.0, 100.0}});
    const auto out = simulate_path(simple(1, 2), 5.0, src);
    EXPECT_FALSE(out.tau_min);
    EXPECT_FALSE(out.tau_max);
    EXPECT_EQ(out.claims_count, 0u);
}

TEST(SimulatePath, RuinRequiresStrictExcess) {
    // S equal to the boundary is not ruin.
    const auto model = RiskModel::create(ClaimDistribution::lomax(3, 1), ClaimDistribution::exponential(1), 2.0, 1.0,
                                         1.0, 5.0);
    ScriptedEventSource src({{1.0, 3.0}, {5.0, 0.5}});
    const auto out = simulate_path(model, 5.0, src);
    EXPECT_FALSE(out.tau_min);
    EXPECT_EQ(out.claims_count, 2u);  // arrival at the horizon counts
}

TEST(SimulatePath, RejectsNonPositiveHorizon) {
    ScriptedEventSource src({});
    EXPECT_THROW(simulate_path(simple(1, 2), 0.0, src), DomainError);
}

TEST(SimulatePath, EventCapThrows) {
    std::vector<std::pair<double, double>> many;
    for (int i = 1; i <= 20; ++i) many.push_back({0.01 * i, 1e-9});
    ScriptedEventSource src(many);
    EXPECT_THROW(simulate_path(simple(1, 2), 1.0, src, nullptr, 0, 10), PartialResultError);
}

TEST(SimulatePath, PathwiseOrderingAndPositiveOvershoots) {
    const auto model = m0(20);
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const auto out = simulate_path(model, 40.0, 5, i);
        if (out.tau_max) {
            ASSERT_TRUE(out.tau_min);
            ASSERT_LE(*out.tau_min, *out.tau_max);
            ASSERT_GT(*out.overshoot_max, 0.0);
        }
        if (out.tau_min) ASSERT_GT(*out.overshoot_min, 0.0);
    }
}

TEST(SimulatePath, RaisingCapitalNeverCreatesRuin) {
    for (std::uint64_t i = 0; i < 5000; ++i) {
        const auto lo = simulate_path(m0(20), 50.0, 77, i);
        const auto hi = simulate_path(m0(40), 50.0, 77, i);
        if (hi.tau_min) ASSERT_TRUE(lo.tau_min) << i;
        if (hi.tau_max) ASSERT_TRUE(lo.tau_max) << i;
        if (hi.tau_min) ASSERT_LE(*lo.tau_min, *hi.tau_min);
    }
}

TEST(Estimate, ReproducibleAcrossWorkers) {
    const auto model = m0(30);
    const auto a = estimate_ruin(model, 30.0, 50000, 11, {.workers = 1});
    const auto b = estimate_ruin(model, 30.0, 50000, 11, {.workers = 8});
    EXPECT_TRUE(same_counts(a, b));
    EXPECT_LE(a.psi_max_hat, a.psi_min_hat);
    EXPECT_NEAR(a.se_min, std::sqrt(a.psi_min_hat * (1 - a.psi_min_hat) / 50000), 1e-15);
    EXPECT_EQ(a.n_paths, 50000u);
    EXPECT_EQ(a.seed, 11u);
}

TEST(Estimate, RejectsTooFewPaths) { EXPECT_THROW(estimate_ruin(m0(30), 30.0, 999, 1), DomainError); }

TEST(Estimate, TotalEventCapGivesPartialResult) {
    try {
        estimate_ruin(m0(30), 30.0, 20000, 1, {.max_total_events = 100000, .chunk = 1000});
        FAIL() << "expected PartialResultError";
    } catch (const PartialResultError& e) {
        EXPECT_LT(e.completed(), 20000u);
        EXPECT_EQ(e.completed() % 1000, 0u);
    }
}

TEST(Estimate, HorizonMonotone) {
    const auto model = m0(20);
    double prev_min = 0.0, prev_max = 0.0;
    for (double T : {5.0, 10.0, 20.0, 40.0}) {
        const auto e = estimate_ruin(model, T, 20000, 3);
        EXPECT_GE(e.psi_min_hat, prev_min);
        EXPECT_GE(e.psi_max_hat, prev_max);
        prev_min = e.psi_min_hat;
        prev_max = e.psi_max_hat;
    }
}

TEST(Estimate, DegenerateReducesToOneLine) {
    const auto claim = ClaimDistribution::lomax(2, 1);
    const auto arrivals = ClaimDistribution::exponential(1);
    const auto model = RiskModel::create(claim, arrivals, 4.0, 2.0, 30.0, 20.0, true);
    ASSERT_TRUE(model.degenerate());
    const auto two = estimate_ruin(model, 40.0, 30000, 21);
    const auto line2 = estimate_one_line_ruin(claim, arrivals, 20.0, 2.0, 40.0, 30000, 21);
    const auto line1 = estimate_one_line_ruin(claim, arrivals, 30.0, 4.0, 40.0, 30000, 21);
    EXPECT_EQ(two.psi_min_hat, line2.psi_min_hat);
    EXPECT_EQ(two.psi_max_hat, line1.psi_min_hat);
}

TEST(Conditional, SamplesAreRuinedWithinHorizon) {
    const auto model = m0(20);
    const auto cs = conditional_ruin_sample(model, 40.0, 500, 13, {.batch = 4096});
    EXPECT_GE(cs.samples.size(), 500u);
    for (const auto& s : cs.samples) {
        ASSERT_LE(s.tau_min, 40.0);
        ASSERT_GT(s.overshoot_min, 0.0);
        if (s.tau_max) ASSERT_LE(s.tau_min, *s.tau_max);
    }
    // Same streams as estimate_ruin: identical ruin frequency on the attempted paths.
    const auto est = estimate_ruin(model, 40.0, cs.attempts, 13);
    EXPECT_EQ(est.ruined_min, cs.ruined_min);
    EXPECT_EQ(est.ruined_max, cs.ruined_max);
}

TEST(Conditional, ReproducibleAcrossWorkers) {
    const auto model = m0(20);
    const auto a = conditional_ruin_sample(model, 40.0, 300, 4, {.workers = 1, .batch = 2048});
    const auto b = conditional_ruin_sample(model, 40.0, 300, 4, {.workers = 6, .batch = 2048});
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        EXPECT_EQ(a.samples[i].path_id, b.samples[i].path_id);
        EXPECT_EQ(a.samples[i].tau_min, b.samples[i].tau_min);
    }
}

TEST(Conditional, TooRareGuard) {
    const auto model = m0(1e9);
    EXPECT_THROW(conditional_ruin_sample(model, 10.0, 1000, 1, {.batch = 1000, .guard_paths = 5000}), TooRareError);
}

TEST(Conditional, CanRequireMaxRuinsToo) {
    const auto cs = conditional_ruin_sample(m0(20), 40.0, 200, 8, {.batch = 1024, .target_max_too = true});
    EXPECT_GE(cs.ruined_max, 200u);
}

TEST(Trace, RowsFollowThePath) {
    const auto model = m0(5);
    const auto rows = trace_paths(model, 20.0, 1, 5);
    ASSERT_FALSE(rows.empty());
    for (std::uint64_t i = 0; i < 5; ++i) {
        const auto out = simulate_path(model, 20.0, 1, i);
        std::uint64_t claims = 0;
        bool saw_min = false;
        for (const auto& r : rows) {
            if (r.path_id != i) continue;
            claims += r.kind == TraceKind::claim;
            if (r.kind == TraceKind::ruin_min) {
                saw_min = true;
                EXPECT_DOUBLE_EQ(r.event_time, *out.tau_min);
                EXPECT_GT(r.surplus, std::min(r.b1, r.b2));
            }
        }
        EXPECT_EQ(claims, out.claims_count);
        EXPECT_EQ(saw_min, out.tau_min.has_value());
    }
}

// Bigger-n oracle run; registered separately as a slow test.
TEST(SlowEstimate, M0AgainstTenMillionPathRun) {
    const auto model = m0(100);
    const auto est = estimate_ruin(model, 100.0, 2'000'000, 1);
    const auto big = estimate_ruin(model, 100.0, 10'000'000, 2);
    EXPECT_LE(std::abs(est.psi_min_hat - big.psi_min_hat), 5.0 * est.se_min);
}
