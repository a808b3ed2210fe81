#include <doctest.h>

#include <cmath>
#include <vector>

#include "levyfbsde/harness.hpp"
#include "levyfbsde/study.hpp"

using namespace levyfbsde;

namespace {

SolutionView constant_view(std::vector<double> times, std::size_t paths, double y, double z,
                           double g) {
    SolutionView v;
    v.times = std::move(times);
    v.paths = paths;
    v.y = [y](std::size_t, std::size_t) { return y; };
    v.z = [z](std::size_t, std::size_t) { return z; };
    v.gamma = [g](std::size_t, std::size_t) { return g; };
    return v;
}

}  // namespace

TEST_CASE("identical views have zero error") {
    const std::vector<double> times{0.0, 0.5, 1.0};
    const auto a = constant_view(times, 100, 1.0, 2.0, 3.0);
    const auto b = constant_view(times, 100, 1.0, 2.0, 3.0);
    const ErrorReport rep = empirical_norms(a, b, 2.0);
    CHECK(rep.sup_y_error == 0.0);
    CHECK(rep.z_error == 0.0);
    CHECK(rep.gamma_error == 0.0);
    CHECK(rep.combined == 0.0);
}

TEST_CASE("constant offset in y shows up as the sup error") {
    const std::vector<double> times{0.0, 0.5, 1.0};
    const auto a = constant_view(times, 64, 1.4, 0.0, 0.0);
    const auto b = constant_view(times, 64, 1.0, 0.0, 0.0);
    const ErrorReport rep = empirical_norms(a, b, 3.0);
    CHECK(rep.sup_y_error == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(rep.y_path_sup_error == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("an indicator difference in z integrates to the square root of half the horizon") {
    // z differs by 1 on [0, 0.5), matches on [0.5, 1).
    std::vector<double> times;
    const int K = 101;
    for (int k = 0; k < K; ++k) times.push_back(static_cast<double>(k) / (K - 1));
    SolutionView a = constant_view(times, 50, 0.0, 0.0, 0.0);
    SolutionView b = constant_view(times, 50, 0.0, 0.0, 0.0);
    auto times_copy = times;
    b.z = [times_copy](std::size_t k, std::size_t) { return times_copy[k] < 0.5 ? 1.0 : 0.0; };
    const ErrorReport rep = empirical_norms(a, b, 2.0);
    CHECK(rep.z_error == doctest::Approx(std::sqrt(0.5)).epsilon(0.02));
}

TEST_CASE("grid mismatch is refused") {
    const auto a = constant_view({0.0, 0.5, 1.0}, 10, 0.0, 0.0, 0.0);
    const auto b = constant_view({0.0, 1.0}, 10, 0.0, 0.0, 0.0);
    CHECK_THROWS_AS(empirical_norms(a, b, 2.0), std::invalid_argument);
}

TEST_CASE("restriction picks out matching nodes") {
    const auto a = constant_view({0.0, 0.25, 0.5, 0.75, 1.0}, 10, 1.0, 2.0, 3.0);
    const SolutionView r = restrict_view(a, {0.0, 0.5, 1.0});
    CHECK(r.times.size() == 3);
    CHECK(r.y(1, 0) == 1.0);
    CHECK_THROWS_AS(restrict_view(a, {0.3}), std::invalid_argument);
}

TEST_CASE("rate fits recover synthetic laws exactly") {
    std::vector<double> N{16, 32, 64, 128, 256};
    std::vector<double> err;
    for (double x : N) err.push_back(3.0 * std::pow(x, -0.5));
    const RateFit f = rate_fit(N, err, FitScale::LogLog);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));

    std::vector<double> n{1, 2, 3, 4, 5};
    std::vector<double> decay;
    for (double x : n) decay.push_back(0.7 * std::exp(-x));
    const RateFit g = rate_fit(n, decay, FitScale::SemiLogY);
    CHECK(g.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(g.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(rate_fit({1, 2}, {1, 1}, FitScale::LogLog), std::domain_error);
    CHECK_THROWS_AS(rate_fit({1, 2, 3}, {1.0, 0.0, 1.0}, FitScale::LogLog), std::domain_error);
}

TEST_CASE("paired batch deltas see a systematic gap through shared noise") {
    std::vector<double> a(4000), b(4000);
    RngStream s = RngStream::substream(77, 0, StreamTag::Aux);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double noise = s.normal();
        a[i] = 1.0 + noise;
        b[i] = 0.9 + noise;  // perfectly correlated noise
    }
    const PairedDelta d = paired_batch_delta(a, b, 20);
    CHECK(d.delta == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(d.se < 1e-9);
}

TEST_CASE("a self-referential study reports vanishing errors") {
    // Reference cell identical to the only cell: the coupled runner must
    // reproduce the very same numbers.
    StudySetup setup;
    setup.model = LevyModel::gamma_process(1.0, 1.0);
    setup.method = SeriesMethod::Bondesson;
    const BenchmarkProblem b2 = benchmark_b2();
    setup.problem = b2.problem;
    setup.benchmark = b2;
    setup.cells = {{2.0, 8}};
    setup.reference = ReferenceMode::FineDiscretization;
    setup.reference_cell = {2.0, 8};
    setup.paths = 2000;
    setup.seed = 99;
    const StudyResult result = run_backward_study(setup);
    REQUIRE(result.cells.size() == 1);
    REQUIRE(result.cells[0].ok);
    CHECK(result.cells[0].report.sup_y_error <= 1e-13);
    CHECK(result.cells[0].report.z_error <= 1e-13);
    CHECK(result.cells[0].y0 == doctest::Approx(result.reference_y0).epsilon(1e-14));
}

TEST_CASE("closed-form reference on a benchmark is close at moderate resolution") {
    StudySetup setup;
    setup.model = LevyModel::gamma_process(1.0, 1.0);
    setup.method = SeriesMethod::Bondesson;
    const BenchmarkProblem b1 = benchmark_b1();
    setup.problem = b1.problem;
    setup.benchmark = b1;
    setup.cells = {{5.0, 16}};
    setup.reference = ReferenceMode::ClosedForm;
    setup.paths = 4000;
    setup.seed = 7;
    const StudyResult result = run_backward_study(setup);
    REQUIRE(result.cells[0].ok);
    // The projection of a linear value function is nearly exact.
    CHECK(result.cells[0].report.sup_y_error < 0.05);
    CHECK(result.cells[0].y0_reference == doctest::Approx(1.1));
}

TEST_CASE("empirical forward error of coupled ensembles vanishes at equal settings") {
    const BenchmarkProblem b1 = benchmark_b1();
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    const PathEnsemble e1 = simulate_ensemble(b1.problem, gamma, *rep, 2.0, 8, 64, 5);
    const PathEnsemble e2 = simulate_ensemble(b1.problem, gamma, *rep, 2.0, 8, 64, 5);
    CHECK(empirical_forward_error(e1, e2, 2.0) == 0.0);
}
