#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levyfbsde/levy.hpp"

namespace levyfbsde {

using Coefficient = std::function<double(double, double)>;              // (t, x)
using Generator = std::function<double(double, double, double, double, double)>;  // (t,x,y,z,q)
using Terminal = std::function<double(double)>;                         // (x)
using JumpWeight = std::function<double(double)>;                       // (e)

// A decoupled forward-backward problem: coefficients as black-box
// evaluables plus the declared regularity metadata the schemes rely on.
struct FbsdeProblem {
    std::string name;
    Coefficient b;   // drift
    Coefficient a;   // diffusion
    Coefficient h;   // jump coefficient
    Generator f;     // generator
    Terminal g;      // terminal condition
    JumpWeight rho;  // weight entering the jump analogue of Z
    Coefficient hx;  // optional derivative of h in x; empty means unknown

    double x0 = 0.0;
    double horizon = 1.0;
    double lipschitz_K = 1.0;

    void validate() const;
};

// A problem together with its closed-form solution, used as an oracle.
// The gamma component depends on the truncated measure through
// zeta_rho = int rho(e) e nu^n(de), so it takes that value explicitly.
struct BenchmarkProblem {
    FbsdeProblem problem;
    std::function<double(double, double)> y_exact;                 // (t, x)
    std::function<double(double, double)> z_exact;                 // (t, x)
    std::function<double(double, double, double)> gamma_exact;     // (t, x, zeta_rho)
    std::string notes;
};

// Linear benchmarks with closed forms that hold exactly under any
// truncated measure, so backward-scheme tests see no truncation error.
BenchmarkProblem benchmark_b1(double b0 = 0.1, double a0 = 0.3, double h0 = 0.5,
                              double x0 = 1.0, double horizon = 1.0);
BenchmarkProblem benchmark_b2(double rate = 0.5, double b0 = 0.1, double a0 = 0.3,
                              double h0 = 0.5, double x0 = 1.0, double horizon = 1.0);
BenchmarkProblem benchmark_b3(double horizon = 1.0);

std::vector<BenchmarkProblem> builtin_benchmarks();
std::optional<BenchmarkProblem> find_benchmark(const std::string& name);

// --- structural check on l(t,x;e) = hx(t,x) e + 1 -------------------------

enum class Assumption2Status { Pass, Fail, NotCheckable };

struct Assumption2Sample {
    int t_samples = 9;
    int x_samples = 25;
    double x_lo = -3.0;
    double x_hi = 3.0;
    int r_samples = 32;
    std::vector<double> mark_quantiles = {0.05, 0.25, 0.5, 0.75, 0.95};
};

struct Assumption2Report {
    Assumption2Status status = Assumption2Status::NotCheckable;
    double min_abs_ell = 0.0;
    double worst_t = 0.0, worst_x = 0.0, worst_e = 0.0;
    bool one_sided = false;           // all values on one side of zero
    bool z_rate_degraded = false;     // set on failure; advisory only
    std::string message;
};

// Samples l over a (t, x) grid against jump sizes representative of the
// truncated measure; advisory, not a proof.
Assumption2Report validate_assumption2(const FbsdeProblem& problem, const LevyModel& model,
                                       const SeriesRepresentation& rep, double n,
                                       const Assumption2Sample& spec = {});

// Sampling-based sanity checks of the declared regularity metadata:
// the jump-weight bound |rho(e)| <= K min(1,|e|) on a log-spaced grid and
// finite-difference Lipschitz estimates against the declared constant.
std::vector<std::string> validate_problem(const FbsdeProblem& problem);

}  // namespace levyfbsde
