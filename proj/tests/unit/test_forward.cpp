#include <doctest.h>

#include <cmath>
#include <vector>

#include "levyfbsde/forward.hpp"
#include "levyfbsde/stats.hpp"

using namespace levyfbsde;

namespace {

JumpSkeleton skeleton_with(std::vector<ShotNoiseJump> jumps, double T = 1.0) {
    JumpSkeleton sk;
    sk.horizon = T;
    sk.level = 1.0;
    sk.jumps = std::move(jumps);
    sk.count = static_cast<std::int64_t>(sk.jumps.size());
    return sk;
}

}  // namespace

TEST_CASE("grid is the superposition of regular and jump times") {
    const JumpSkeleton sk = skeleton_with({{0.3, 1.0, 0.0}, {0.6, -2.0, 0.0}});
    const JumpAdaptedGrid grid = build_grid(4, sk);
    const std::vector<double> want{0.0, 0.25, 0.3, 0.5, 0.6, 0.75, 1.0};
    REQUIRE(grid.t.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(grid.t[i] == doctest::Approx(want[i]));
    CHECK(grid.jump[2] == doctest::Approx(1.0));
    CHECK(grid.jump[4] == doctest::Approx(-2.0));
    CHECK((grid.tag[2] & kJumpNode));
    CHECK((grid.tag[1] & kRegularNode));
}

TEST_CASE("without jumps the lookup floors to the regular grid") {
    const JumpSkeleton sk = skeleton_with({});
    const JumpAdaptedGrid grid = build_grid(4, sk);
    CHECK(grid.t.size() == 5);
    CHECK(grid.last_node_at(0.3) == 1);
    CHECK(grid.t[grid.last_node_at(0.3)] == doctest::Approx(0.25));
    CHECK(grid.last_node_at(0.25) == 1);
    CHECK(grid.last_node_at(1.0) == 4);
}

TEST_CASE("a jump on a regular node merges into one dual-tagged node") {
    const JumpSkeleton sk = skeleton_with({{0.25, 0.9, 0.0}});
    const JumpAdaptedGrid grid = build_grid(4, sk);
    CHECK(grid.t.size() == 5);
    const std::size_t i = grid.last_node_at(0.25);
    CHECK((grid.tag[i] & kJumpNode));
    CHECK((grid.tag[i] & kRegularNode));
    CHECK(grid.jump[i] == doctest::Approx(0.9));
}

TEST_CASE("single update rules") {
    FbsdeProblem p = benchmark_b1(0.0, 0.0, 1.0, 0.0, 1.0).problem;  // b=a=0, h=1
    CHECK(euler_step(p, 1.0, 0.0, 0.25, 0.0, 0.7, 0.0) == doctest::Approx(1.7));
    FbsdeProblem drift = benchmark_b1(1.0, 0.0, 0.0, 0.0, 1.0).problem;  // b=1, a=h=0
    CHECK(euler_step(drift, 1.0, 0.0, 0.25, 0.0, 0.0, 0.0) == doctest::Approx(1.25));
    CHECK_THROWS_AS(euler_step(p, 1.0, 0.5, 0.5, 0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("constant coefficients make the scheme exact at every node") {
    const double b0 = 0.1, a0 = 0.3, h0 = 0.5, x0 = 1.0;
    const BenchmarkProblem bm = benchmark_b1(b0, a0, h0, x0, 1.0);
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    const PathEnsemble ens = simulate_ensemble(bm.problem, gamma, *rep, 10.0, 32, 100, 2024);

    for (const ForwardPath& fp : ens.path) {
        double bsum = 0.0, jsum = 0.0;
        for (std::size_t k = 0; k + 1 < fp.grid.size(); ++k) {
            bsum += fp.db[k];
            jsum += fp.grid.jump[k + 1];
            const double t = fp.grid.t[k + 1];
            const double want = x0 + b0 * t + a0 * bsum + h0 * (jsum - t * ens.zeta1);
            CHECK(fp.x[k + 1] ==
                  doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("same seed gives identical ensembles") {
    const BenchmarkProblem bm = benchmark_b1();
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    const PathEnsemble e1 = simulate_ensemble(bm.problem, gamma, *rep, 3.0, 8, 16, 99);
    const PathEnsemble e2 = simulate_ensemble(bm.problem, gamma, *rep, 3.0, 8, 16, 99);
    REQUIRE(e1.path.size() == e2.path.size());
    for (std::size_t m = 0; m < e1.path.size(); ++m) {
        REQUIRE(e1.path[m].x.size() == e2.path[m].x.size());
        for (std::size_t k = 0; k < e1.path[m].x.size(); ++k)
            CHECK(e1.path[m].x[k] == e2.path[m].x[k]);
    }
}

TEST_CASE("compensated jumps are centered") {
    // Pure jump state with unit jump coefficient starting at zero.
    FbsdeProblem p = benchmark_b1(0.0, 0.0, 1.0, 0.0, 1.0).problem;
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    const int M = 20000;
    const PathEnsemble ens = simulate_ensemble(p, gamma, *rep, 30.0, 4, M, 5150);
    std::vector<double> xT(M);
    for (int m = 0; m < M; ++m) xT[static_cast<std::size_t>(m)] = ens.path[static_cast<std::size_t>(m)].x.back();
    CHECK(std::abs(mean(xT)) < 4.0 * std_error_of_mean(xT));
}

TEST_CASE("pure diffusion terminal matches the Brownian law") {
    const BenchmarkProblem b3 = benchmark_b3();
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    const int M = 20000;
    const PathEnsemble ens = simulate_ensemble(b3.problem, gamma, *rep, 2.0, 16, M, 31);
    std::vector<double> xT(M);
    for (int m = 0; m < M; ++m) xT[static_cast<std::size_t>(m)] = ens.path[static_cast<std::size_t>(m)].x.back();
    // Variance of the sample variance for the normal is about 2/M.
    CHECK(std::abs(variance(xT) - 1.0) < 4.0 * std::sqrt(2.0 / M));
    CHECK(std::abs(mean(xT)) < 4.0 * std_error_of_mean(xT));
}

TEST_CASE("ensemble validates the path count") {
    const BenchmarkProblem bm = benchmark_b1();
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    CHECK_THROWS_AS(simulate_ensemble(bm.problem, gamma, *rep, 3.0, 8, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("forced extra times become common nodes") {
    const BenchmarkProblem bm = benchmark_b1();
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    const PathEnsemble ens =
        simulate_ensemble(bm.problem, gamma, *rep, 3.0, 4, 8, 7, {0.37});
    CHECK(ens.common_times.size() == 6);
    for (std::size_t m = 0; m < ens.path.size(); ++m) {
        const auto idx = ens.common_indices(m);
        CHECK(ens.path[m].grid.t[idx[2]] == doctest::Approx(0.37));
    }
}
