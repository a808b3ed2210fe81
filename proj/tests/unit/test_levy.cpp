#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "levyfbsde/errors.hpp"
#include "levyfbsde/levy.hpp"

using namespace levyfbsde;

namespace {

// Independent oracle for the gamma inverse-tail map: E1 by Simpson on a
// log-substituted axis and inversion by plain geometric bisection, no
// shared code with the library path.
double oracle_e1(double x) {
    const int n = 20000;
    const double s_hi = std::log((x + 80.0) / x);
    const double h = s_hi / n;
    auto f = [x](double s) { return std::exp(-x * std::exp(s)); };
    double acc = f(0.0) + f(s_hi);
    for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double oracle_e1_inv(double y) {
    double lo = 1e-30, hi = 50.0;
    while (oracle_e1(lo) < y) lo *= 0.5;
    for (int i = 0; i < 300; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (oracle_e1(mid) > y) lo = mid; else hi = mid;
        if (hi - lo < 1e-13 * hi) break;
    }
    return std::sqrt(lo * hi);
}

// Simpson over [n, n+span] of (E1^{-1}(r))^2.
double oracle_inverse_levy_sigma2(double n, double span = 36.0) {
    const int steps = 1200;  // even
    const double h = span / steps;
    auto f = [](double r) {
        const double v = oracle_e1_inv(r);
        return v * v;
    };
    double s = f(n) + f(n + span);
    for (int i = 1; i < steps; ++i) s += f(n + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("truncated measure mass is the level itself") {
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    CHECK(truncated_measure_mass(gamma, 5.0) == 5.0);
    const LevyModel ts = LevyModel::tempered_stable(0.5, 1.0, 1.0);
    CHECK(truncated_measure_mass(ts, 3.0) == 3.0);
    CHECK(truncated_measure_mass(gamma, 1e-9) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK_THROWS_AS(truncated_measure_mass(gamma, 0.0), std::domain_error);
    CHECK_THROWS_AS(truncated_measure_mass(gamma, -1.0), std::domain_error);
}

TEST_CASE("bondesson discarded second moment closed form") {
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    CHECK(discarded_moment(gamma, *rep, 2.0, 2.0) ==
          doctest::Approx(std::exp(-4.0)).epsilon(1e-8));
    // Nothing discarded at level zero: the full second moment.
    CHECK(discarded_moment(gamma, *rep, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("bondesson closed forms across levels") {
    const double alpha = 1.3, beta = 0.7;
    const LevyModel gamma = LevyModel::gamma_process(alpha, beta);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    for (double n : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double sigma2 = alpha / (beta * beta) * std::exp(-2.0 * n / alpha);
        const double m1 = alpha / beta * (1.0 - std::exp(-n / alpha));
        CHECK(discarded_moment(gamma, *rep, n, 2.0) == doctest::Approx(sigma2).epsilon(1e-8));
        CHECK(retained_moment(gamma, *rep, n, 1.0) == doctest::Approx(m1).epsilon(1e-8));
    }
}

TEST_CASE("inverse levy discarded moment against an independent oracle") {
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::InverseLevy);
    const double got = discarded_moment(gamma, *rep, 4.0, 2.0);
    const double want = oracle_inverse_levy_sigma2(4.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-7));
}

TEST_CASE("retained moments: examples and limits") {
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    CHECK(retained_moment(gamma, *rep, 3.0, 1.0) ==
          doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-8));
    CHECK(retained_moment(gamma, *rep, 60.0, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(retained_moment(gamma, *rep, 0.0, 2.0) == 0.0);
    CHECK_THROWS_AS(retained_moment(gamma, *rep, -1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(retained_moment(gamma, *rep, 1.0, 0.5), std::domain_error);
}

TEST_CASE("moment split adds up to the full moment for every gamma representation") {
    const double alpha = 0.8, beta = 1.4;
    const LevyModel gamma = LevyModel::gamma_process(alpha, beta, 2.5);
    for (SeriesMethod method : {SeriesMethod::Bondesson, SeriesMethod::InverseLevy,
                                SeriesMethod::Rejection, SeriesMethod::Thinning}) {
        const auto rep = make_representation(gamma, method);
        for (double q : {1.0, 2.0, 2.5}) {
            const double full = gamma.full_moment(q);
            double prev_discarded = std::numeric_limits<double>::infinity();
            double prev_retained = 0.0;
            for (double n : {0.5, 1.0, 2.0, 4.0}) {
                const double d = discarded_moment(gamma, *rep, n, q);
                const double r = retained_moment(gamma, *rep, n, q);
                CHECK(d + r == doctest::Approx(full).epsilon(1e-7));
                CHECK(d <= prev_discarded * (1.0 + 1e-12));
                CHECK(r >= prev_retained * (1.0 - 1e-12));
                prev_discarded = d;
                prev_retained = r;
            }
        }
    }
}

TEST_CASE("tempered stable moments add up to the analytic full moment") {
    const double a = 0.5, d = 1.2, l = 0.9;
    const LevyModel ts = LevyModel::tempered_stable(a, d, l);
    const auto rep = make_representation(ts, SeriesMethod::RosinskiTemperedStable);
    for (double q : {1.0, 2.0}) {
        const double full = d * std::tgamma(q - a) * std::pow(l, a - q);
        for (double n : {0.5, 2.0}) {
            const double split = discarded_moment(ts, *rep, n, q) + retained_moment(ts, *rep, n, q);
            CHECK(split == doctest::Approx(full).epsilon(1e-6));
        }
    }
}

TEST_CASE("inverse levy truncation discards the least mass") {
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto inv = make_representation(gamma, SeriesMethod::InverseLevy);
    for (SeriesMethod other : {SeriesMethod::Bondesson, SeriesMethod::Rejection,
                               SeriesMethod::Thinning}) {
        const auto rep = make_representation(gamma, other);
        for (double n : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            CHECK(discarded_moment(gamma, *inv, n, 2.0) <=
                  discarded_moment(gamma, *rep, n, 2.0) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("subordinators have equal signed and absolute retained first moments") {
    const LevyModel gamma = LevyModel::gamma_process(1.1, 0.9);
    const auto rep = make_representation(gamma, SeriesMethod::Thinning);
    for (double n : {0.5, 2.0}) {
        CHECK(retained_signed_first_moment(gamma, *rep, n) ==
              doctest::Approx(retained_moment(gamma, *rep, n, 1.0)).epsilon(1e-10));
    }
}

TEST_CASE("atomic test measure has exact moments, including signed ones") {
    // Atoms ordered by |size|: -2 (w=0.5), 1 (w=1), -0.5 (w=2).
    const LevyModel cp = LevyModel::compound_poisson({{1.0, 1.0}, {-0.5, 2.0}, {-2.0, 0.5}});
    const auto rep = make_representation(cp, SeriesMethod::InverseLevy);

    // Full moments.
    CHECK(cp.full_moment(2.0) == doctest::Approx(0.5 * 4.0 + 1.0 + 2.0 * 0.25));
    CHECK(cp.full_signed_first_moment() == doctest::Approx(0.5 * -2.0 + 1.0 - 2.0 * 0.5));

    // Level inside the second atom: w(-2) = 0.5 kept, w(1) = 0.5 of 1 kept.
    const double n = 1.0;
    CHECK(retained_moment(cp, *rep, n, 2.0) == doctest::Approx(0.5 * 4.0 + 0.5 * 1.0));
    CHECK(discarded_moment(cp, *rep, n, 2.0) ==
          doctest::Approx(cp.full_moment(2.0) - 0.5 * 4.0 - 0.5 * 1.0));
    CHECK(retained_signed_first_moment(cp, *rep, n) == doctest::Approx(0.5 * -2.0 + 0.5 * 1.0));

    // Past the total mass nothing is left out.
    CHECK(discarded_moment(cp, *rep, 10.0, 2.0) == doctest::Approx(0.0));
    CHECK(retained_moment(cp, *rep, 10.0, 2.0) == doctest::Approx(cp.full_moment(2.0)));
}

TEST_CASE("weighted retained moment matches a direct sum for atoms") {
    const LevyModel cp = LevyModel::compound_poisson({{0.8, 2.0}});
    const auto rep = make_representation(cp, SeriesMethod::InverseLevy);
    const auto rho = [](double e) { return std::min(1.0, std::abs(e)); };
    CHECK(retained_weighted_first_moment(cp, *rep, 10.0, rho) ==
          doctest::Approx(2.0 * 0.8 * 0.8).epsilon(1e-12));
}

TEST_CASE("weighted retained moment by quadrature matches the plain moment for rho=1") {
    const LevyModel gamma = LevyModel::gamma_process(1.0, 1.0);
    const auto rep = make_representation(gamma, SeriesMethod::Bondesson);
    const auto one = [](double) { return 1.0; };
    for (double n : {1.0, 3.0}) {
        CHECK(retained_weighted_first_moment(gamma, *rep, n, one) ==
              doctest::Approx(retained_signed_first_moment(gamma, *rep, n)).epsilon(1e-8));
    }
}

TEST_CASE("model validation rejects bad parameters") {
    CHECK_THROWS_AS(LevyModel::gamma_process(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LevyModel::gamma_process(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(LevyModel::tempered_stable(1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LevyModel::tempered_stable(0.5, 1.0, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(LevyModel::compound_poisson({}), std::invalid_argument);
    CHECK_THROWS_AS(LevyModel::compound_poisson({{1.0, -1.0}}), std::invalid_argument);
}

TEST_CASE("unsupported model and representation pairs are rejected") {
    const LevyModel ts = LevyModel::tempered_stable(0.5, 1.0, 1.0);
    CHECK_THROWS_AS(make_representation(ts, SeriesMethod::Bondesson), ConfigError);
    const LevyModel cp = LevyModel::compound_poisson({{1.0, 1.0}});
    CHECK_THROWS_AS(make_representation(cp, SeriesMethod::Thinning), ConfigError);
}
