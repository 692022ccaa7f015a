#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "fitchoice/observables.hpp"
#include "fitchoice/simulation.hpp"

using namespace fitchoice;

namespace {
constexpr auto Low = FitnessClass::Low;
constexpr auto High = FitnessClass::High;
}  // namespace

TEST_CASE("snapshot of G1") {
    const ModelParams p(0.0, 2, 1.9, 0.5);
    const auto cp = snapshot(init_state(p, 1, RootFitness{Low, High}));
    CHECK(cp.n == 1);
    CHECK(cp.M == 1);
    CHECK(cp.M1 == 1);
    CHECK(cp.Mlambda == 1);
    CHECK(cp.X == 1.9);
    CHECK(cp.Z == 1.0);
    CHECK(cp.hub_low == VertexId{0});
    CHECK(cp.hub_high == VertexId{1});
    CHECK(cp.L1_at_max == 1);
    CHECK(cp.Llambda_at_max == 1);
}

TEST_CASE("empty High class") {
    const ModelParams p(0.0, 2, 1.9, 1e-12);
    TreeState s(p, 4, RootFitness{Low, Low});
    for (int i = 0; i < 200; ++i) {
        const auto cp = snapshot(s);
        REQUIRE(cp.Mlambda == 0);
        REQUIRE(!cp.hub_high);
        REQUIRE(cp.Llambda_at_max == 0);
        REQUIRE(cp.X == static_cast<double>(cp.M1));
        REQUIRE(cp.M == cp.M1);
        s.advance();
    }
}

TEST_CASE("incremental snapshot equals a full scan") {
    Engine meta(5);
    for (int trial = 0; trial < 10; ++trial) {
        const ModelParams p(-0.9 + 2.0 * uniform01(meta), 2 + static_cast<int>(uniform_index(meta, 3)),
                            1.0 + uniform01(meta), 0.2 + 0.6 * uniform01(meta));
        TreeState s(p, meta());
        REQUIRE(snapshot(s) == oracle::scan_snapshot(s));
        for (int block = 0; block < 10; ++block) {
            for (int i = 0; i < 1000; ++i) s.advance();
            const auto cp = snapshot(s);
            REQUIRE(cp == oracle::scan_snapshot(s));
            REQUIRE(cp.M == std::max(cp.M1, cp.Mlambda));
            REQUIRE(static_cast<double>(cp.M) >= cp.X / p.lambda() * (1.0 - 1e-15));
            REQUIRE(cp.L1_at_max == level_count(s, Low, cp.M1));
            REQUIRE(cp.Llambda_at_max == level_count(s, High, cp.Mlambda));
        }
    }
}

TEST_CASE("tail_weight") {
    const ModelParams p(0.5, 2, 1.9, 0.5);
    const auto g1 = init_state(p, 1, RootFitness{Low, High});
    CHECK(tail_weight(g1, Low, 0.5) == 1.5);
    CHECK(tail_weight(g1, Low, 1.0) == 0.0);

    TreeState s(p, 9);
    for (int i = 0; i < 3000; ++i) s.advance();
    const auto cp = snapshot(s);
    CHECK(tail_weight(s, Low, static_cast<double>(cp.M)) == 0.0);
    CHECK(tail_weight(s, High, static_cast<double>(cp.M) + 3.0) == 0.0);
    double low_total = 0.0;
    for (VertexId v = 0; v < s.vertex_count(); ++v) {
        if (s.fitness(v) == Low) low_total += static_cast<double>(s.degree(v)) + p.beta();
    }
    CHECK(tail_weight(s, Low, 0.0) == doctest::Approx(low_total).epsilon(1e-12));
}

TEST_CASE("exclusivity holds") {
    SUBCASE("synthetic state") {
        const std::vector<std::int64_t> deg{3, 2};
        const std::vector<FitnessClass> fit{Low, High};
        CHECK(exclusivity_check(deg, fit, 0.0, 1.9));
    }
    SUBCASE("single class") {
        const std::vector<std::int64_t> deg{3, 2, 1};
        const std::vector<FitnessClass> fit{Low, Low, Low};
        CHECK(exclusivity_check(deg, fit, 0.0, 1.9));
    }
    SUBCASE("every reachable 6-edge tree at d=2") {
        const auto trees = oracle::enumerate_trees(0.0, 2, 1.9, 0.5, 6);
        REQUIRE(trees.size() > 1000);
        for (const auto& t : trees) {
            REQUIRE(exclusivity_check(t.degrees, t.fitness, 0.0, 1.9));
        }
    }
    SUBCASE("along simulated trajectories") {
        const ModelParams p(0.0, 3, 1.9, 0.5);
        TreeState s(p, 2);
        for (int i = 0; i < 3000; ++i) {
            s.advance();
            REQUIRE(exclusivity_check(s));
        }
    }
}

TEST_CASE("diagnostic series by direct evaluation") {
    std::vector<Checkpoint> traj;
    for (std::int64_t n = 1; n <= 50; ++n) {
        Checkpoint cp;
        cp.n = n;
        cp.M = n;
        cp.X = static_cast<double>(n);
        traj.push_back(cp);
    }
    const auto u = diagnostics(traj, 1.0);
    const auto y = diagnostics(traj, 2.0);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto n = static_cast<double>(traj[i].n);
        CHECK(u.U[i] == doctest::Approx(n * std::exp(-1.0)).epsilon(1e-14));
        CHECK(y.Y[i] == doctest::Approx(std::exp(2.0) / n).epsilon(1e-14));
        CHECK(u.U[i] > 0.0);
        CHECK(y.Y[i] > 0.0);
    }
    // U_{n+1}/U_n - 1 = 1/n here.
    CHECK(u.U_drift.count == 49);
    double mean = 0.0;
    for (int n = 1; n < 50; ++n) mean += 1.0 / n;
    CHECK(u.U_drift.mean == doctest::Approx(mean / 49).epsilon(1e-12));
    CHECK_THROWS_AS(diagnostics(traj, 0.0), ValidationError);
}

TEST_CASE("U drift is non-positive in the critical regime for c above 2d/(d-1)") {
    const ModelParams p(0.0, 2, 1.9, 0.5);
    TreeState s(p, 2718);
    DriftProbe probe(8.0, 100000, 1000000);
    const CheckpointSchedule dense{1.2, {}, std::pair<std::int64_t, std::int64_t>{100000, 1000000}};
    run(s, 1000000, dense, [&](const Checkpoint& cp) { probe.push(cp); });
    const auto u = probe.U_drift();
    CHECK(u.count == 900000);
    MESSAGE("U drift mean ", u.mean, " +- ", u.stderr_mean);
    CHECK(u.mean <= 2.0 * u.stderr_mean);
}
