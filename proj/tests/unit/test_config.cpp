#include <doctest.h>

#include <array>
#include <cmath>

#include "levyfbsde/config.hpp"
#include "levyfbsde/errors.hpp"
#include "levyfbsde/expr.hpp"

using namespace levyfbsde;

TEST_CASE("expressions evaluate with the usual precedence") {
    const Expression e = Expression::parse("1 + 2 * 3", {});
    CHECK(e.eval(std::array<double, 0>{}) == doctest::Approx(7.0));
    const Expression m = Expression::parse("-x * x + 2", {"x"});
    CHECK(m.eval(std::array<double, 1>{3.0}) == doctest::Approx(-7.0));
    const Expression f =
        Expression::parse("min(1, x) * max(x, 0.5) + exp(-x) + sin(x) * cos(x)", {"x"});
    const double x = 0.7;
    CHECK(f.eval(std::array<double, 1>{x}) ==
          doctest::Approx(std::min(1.0, x) * std::max(x, 0.5) + std::exp(-x) +
                          std::sin(x) * std::cos(x)));
    const Expression paren = Expression::parse("(1 + 2) * (3 - 1)", {});
    CHECK(paren.eval(std::array<double, 0>{}) == doctest::Approx(6.0));
    const Expression pi = Expression::parse("cos(pi)", {});
    CHECK(pi.eval(std::array<double, 0>{}) == doctest::Approx(-1.0));
}

TEST_CASE("expression errors are loud and specific") {
    CHECK_THROWS_AS(Expression::parse("x + y", {"x"}), ConfigError);
    CHECK_THROWS_AS(Expression::parse("foo(1)", {}), ConfigError);
    CHECK_THROWS_AS(Expression::parse("1 +", {}), ConfigError);
    CHECK_THROWS_AS(Expression::parse("min(1)", {}), ConfigError);
    CHECK_THROWS_AS(Expression::parse("1 2", {}), ConfigError);
    CHECK_THROWS_AS(Expression::parse("(1", {}), ConfigError);
}

namespace {

const char* kGoodConfig = R"(
# smoke study
[study]
type = study
id = smoke
seed = 42
output = out

[model]
kind = gamma
alpha = 1.0
beta = 1.0
p = 2
representation = bondesson

[problem]
name = b1

[scheme]
N = 8, 16
n = 2
M = 500

[reference]
mode = closed_form
)";

}  // namespace

TEST_CASE("a full configuration round trips into a study setup") {
    const StudyConfig cfg = load_study_config(kGoodConfig);
    CHECK(cfg.id == "smoke");
    CHECK(cfg.seed == 42);
    CHECK(cfg.kind == StudyKind::Backward);
    CHECK(cfg.N_list.size() == 2);
    CHECK(cfg.n_list.size() == 1);
    CHECK(cfg.paths == 500);
    CHECK(cfg.reference == ReferenceMode::ClosedForm);
    const StudySetup setup = make_study_setup(cfg);
    CHECK(setup.cells.size() == 2);
    CHECK(setup.cells[0].n == 2.0);
    CHECK(setup.cells[0].N == 8);
}

TEST_CASE("configuration errors are config errors") {
    // Missing seed.
    CHECK_THROWS_AS(load_study_config(R"(
[study]
type = study
[model]
kind = gamma
alpha = 1
beta = 1
representation = bondesson
[problem]
name = b1
[scheme]
N = 8
n = 2
M = 100
)"),
                    ConfigError);

    // Empty step list.
    CHECK_THROWS_AS(load_study_config(R"(
[study]
type = study
seed = 1
[model]
kind = gamma
alpha = 1
beta = 1
representation = bondesson
[problem]
name = b1
[scheme]
N =
n = 2
M = 100
)"),
                    ConfigError);

    // Unknown key.
    CHECK_THROWS_AS(load_study_config(R"(
[study]
type = study
seed = 1
typo_key = 3
[model]
kind = gamma
alpha = 1
beta = 1
representation = bondesson
[problem]
name = b1
[scheme]
N = 8
n = 2
M = 100
)"),
                    ConfigError);

    // Malformed atoms.
    CHECK_THROWS_AS(load_study_config(R"(
[study]
type = moments
seed = 1
[model]
kind = compound_poisson
atoms = 1.0
representation = inverse_levy
[scheme]
n = 1
)"),
                    ConfigError);

    // Duplicate key.
    CHECK_THROWS_AS(KeyValueConfig::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
    // Key outside a section.
    CHECK_THROWS_AS(KeyValueConfig::parse("x = 1\n"), ConfigError);
}

TEST_CASE("custom problems come from expressions") {
    const StudyConfig cfg = load_study_config(R"(
[study]
type = study
seed = 9
[model]
kind = gamma
alpha = 1
beta = 1
representation = bondesson
[problem]
name = custom
b = sin(x)
a = 0.15 * cos(x) + 0.5
h = 0.2
hx = 0
f = -0.5 * y
g = x
rho = min(1, e)
x0 = 1
T = 1
K = 2
[scheme]
N = 8
n = 2
M = 100
)");
    CHECK(cfg.problem.name == "custom");
    CHECK(cfg.problem.b(0.0, 0.5) == doctest::Approx(std::sin(0.5)));
    CHECK(cfg.problem.a(0.0, 0.0) == doctest::Approx(0.65));
    CHECK(cfg.problem.f(0, 0, 2.0, 0, 0) == doctest::Approx(-1.0));
    CHECK(cfg.problem.rho(0.3) == doctest::Approx(0.3));
    CHECK(cfg.problem.rho(3.0) == doctest::Approx(1.0));
}

TEST_CASE("moments configurations accept several representations") {
    const StudyConfig cfg = load_study_config(R"(
[study]
type = moments
seed = 1
[model]
kind = gamma
alpha = 1
beta = 1
representation = bondesson, inverse_levy
[scheme]
n = 0, 1, 2
)");
    CHECK(cfg.kind == StudyKind::Moments);
    CHECK(cfg.methods.size() == 2);
    CHECK(cfg.n_list.size() == 3);
}

TEST_CASE("stable hashes for the manifest") {
    CHECK(fnv1a_hash("abc") == fnv1a_hash("abc"));
    CHECK(fnv1a_hash("abc") != fnv1a_hash("abd"));
}
