#include "levyfbsde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace levyfbsde {

void FbsdeProblem::validate() const {
    if (!b || !a || !h || !f || !g || !rho)
        throw std::invalid_argument("FbsdeProblem: all coefficient functions must be set");
    if (!(horizon > 0.0)) throw std::invalid_argument("FbsdeProblem: horizon must be positive");
    if (!(lipschitz_K > 0.0)) throw std::invalid_argument("FbsdeProblem: Lipschitz constant must be positive");
    if (!std::isfinite(x0)) throw std::invalid_argument("FbsdeProblem: initial value must be finite");
}

namespace {

JumpWeight default_rho() {
    return [](double e) { return std::copysign(std::min(1.0, std::abs(e)), e); };
}

}  // namespace

BenchmarkProblem benchmark_b1(double b0, double a0, double h0, double x0, double horizon) {
    BenchmarkProblem bm;
    FbsdeProblem& p = bm.problem;
    p.name = "b1";
    p.b = [b0](double, double) { return b0; };
    p.a = [a0](double, double) { return a0; };
    p.h = [h0](double, double) { return h0; };
    p.hx = [](double, double) { return 0.0; };
    p.f = [](double, double, double, double, double) { return 0.0; };
    p.g = [](double x) { return x; };
    p.rho = default_rho();
    p.x0 = x0;
    p.horizon = horizon;
    p.lipschitz_K = 1.0 + std::abs(b0) + std::abs(a0) + std::abs(h0);
    const double T = horizon;
    bm.y_exact = [b0, T](double t, double x) { return x + b0 * (T - t); };
    bm.z_exact = [a0](double, double) { return a0; };
    bm.gamma_exact = [h0](double, double, double zr) { return h0 * zr; };
    bm.notes = "zero generator, linear terminal; Y is the conditional mean of X_T";
    return bm;
}

BenchmarkProblem benchmark_b2(double rate, double b0, double a0, double h0, double x0,
                              double horizon) {
    BenchmarkProblem bm;
    FbsdeProblem& p = bm.problem;
    p.name = "b2";
    p.b = [b0](double, double) { return b0; };
    p.a = [a0](double, double) { return a0; };
    p.h = [h0](double, double) { return h0; };
    p.hx = [](double, double) { return 0.0; };
    p.f = [rate](double, double, double y, double, double) { return -rate * y; };
    p.g = [](double x) { return x; };
    p.rho = default_rho();
    p.x0 = x0;
    p.horizon = horizon;
    p.lipschitz_K = std::max(1.0 + std::abs(b0) + std::abs(a0) + std::abs(h0), rate);
    const double T = horizon;
    bm.y_exact = [b0, rate, T](double t, double x) {
        return std::exp(-rate * (T - t)) * (x + b0 * (T - t));
    };
    bm.z_exact = [a0, rate, T](double t, double) { return std::exp(-rate * (T - t)) * a0; };
    bm.gamma_exact = [h0, rate, T](double t, double, double zr) {
        return std::exp(-rate * (T - t)) * h0 * zr;
    };
    bm.notes = "discounting generator; solves the linear equation for the conditional mean";
    return bm;
}

BenchmarkProblem benchmark_b3(double horizon) {
    BenchmarkProblem bm;
    FbsdeProblem& p = bm.problem;
    p.name = "b3";
    p.b = [](double, double) { return 0.0; };
    p.a = [](double, double) { return 1.0; };
    p.h = [](double, double) { return 0.0; };
    p.hx = [](double, double) { return 0.0; };
    p.f = [](double, double, double, double, double) { return 0.0; };
    p.g = [](double x) { return x; };
    p.rho = default_rho();
    p.x0 = 0.0;
    p.horizon = horizon;
    p.lipschitz_K = 2.0;
    bm.y_exact = [](double, double x) { return x; };
    bm.z_exact = [](double, double) { return 1.0; };
    bm.gamma_exact = [](double, double, double) { return 0.0; };
    bm.notes = "pure diffusion; Y equals the Brownian state";
    return bm;
}

std::vector<BenchmarkProblem> builtin_benchmarks() {
    return {benchmark_b1(), benchmark_b2(), benchmark_b3()};
}

std::optional<BenchmarkProblem> find_benchmark(const std::string& name) {
    for (BenchmarkProblem& bm : builtin_benchmarks())
        if (bm.problem.name == name) return bm;
    return std::nullopt;
}

Assumption2Report validate_assumption2(const FbsdeProblem& problem, const LevyModel& model,
                                       const SeriesRepresentation& rep, double n,
                                       const Assumption2Sample& spec) {
    problem.validate();
    model.validate();
    Assumption2Report report;
    if (!problem.hx) {
        report.status = Assumption2Status::NotCheckable;
        report.message = "derivative of h not provided; structural condition cannot be checked";
        return report;
    }
    const std::vector<double> es = rep.support_samples(n, spec.r_samples, spec.mark_quantiles);
    if (es.empty()) {
        report.status = Assumption2Status::NotCheckable;
        report.message = "no representative jump sizes at this truncation level";
        return report;
    }

    double min_abs = std::numeric_limits<double>::infinity();
    double min_signed = std::numeric_limits<double>::infinity();
    double max_signed = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < spec.t_samples; ++it) {
        const double t = problem.horizon * (spec.t_samples == 1 ? 0.0 : static_cast<double>(it) / (spec.t_samples - 1));
        for (int ix = 0; ix < spec.x_samples; ++ix) {
            const double x = spec.x_lo + (spec.x_hi - spec.x_lo) *
                                             (spec.x_samples == 1 ? 0.5 : static_cast<double>(ix) / (spec.x_samples - 1));
            const double slope = problem.hx(t, x);
            for (double e : es) {
                const double ell = slope * e + 1.0;
                min_signed = std::min(min_signed, ell);
                max_signed = std::max(max_signed, ell);
                if (std::abs(ell) < min_abs) {
                    min_abs = std::abs(ell);
                    report.worst_t = t;
                    report.worst_x = x;
                    report.worst_e = e;
                }
            }
        }
    }

    report.min_abs_ell = min_abs;
    report.one_sided = (min_signed > 0.0) || (max_signed < 0.0);
    const double bound = 1.0 / problem.lipschitz_K;
    const bool ok = report.one_sided && min_abs >= bound;
    report.status = ok ? Assumption2Status::Pass : Assumption2Status::Fail;
    report.z_rate_degraded = !ok;
    std::ostringstream os;
    if (ok) {
        os << "min |l| = " << min_abs << " >= 1/K = " << bound << " on the sampled grid";
    } else {
        os << "l(t,x;e) in [" << min_signed << ", " << max_signed << "]; min |l| = " << min_abs
           << " at (t=" << report.worst_t << ", x=" << report.worst_x << ", e=" << report.worst_e
           << "), below 1/K = " << bound << "; expect the degraded rate for the Z component";
    }
    report.message = os.str();
    return report;
}

std::vector<std::string> validate_problem(const FbsdeProblem& problem) {
    problem.validate();
    std::vector<std::string> warnings;

    // Jump-weight bound on a log-spaced grid, both signs.
    double worst_ratio = 0.0, worst_e = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double mag = std::pow(10.0, -6.0 + 12.0 * i / 60.0);
        for (double e : {mag, -mag}) {
            const double cap = problem.lipschitz_K * std::min(1.0, std::abs(e));
            const double val = std::abs(problem.rho(e));
            if (cap > 0.0 && val / cap > worst_ratio) {
                worst_ratio = val / cap;
                worst_e = e;
            }
        }
    }
    if (worst_ratio > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "rho exceeds K*min(1,|e|) at e=" << worst_e << " (ratio " << worst_ratio << ")";
        warnings.push_back(os.str());
    }

    // Finite-difference Lipschitz spot checks on a sampled box.
    const double T = problem.horizon;
    const double dx = 1e-4;
    double max_slope = 0.0;
    for (int it = 0; it <= 8; ++it) {
        const double t = T * it / 8.0;
        for (int ix = 0; ix <= 16; ++ix) {
            const double x = -4.0 + 8.0 * ix / 16.0;
            for (const Coefficient* c : {&problem.b, &problem.a, &problem.h}) {
                const double s = std::abs(((*c)(t, x + dx) - (*c)(t, x - dx)) / (2.0 * dx));
                max_slope = std::max(max_slope, s);
            }
            const double gs = std::abs((problem.g(x + dx) - problem.g(x - dx)) / (2.0 * dx));
            max_slope = std::max(max_slope, gs);
            const double fs = std::abs((problem.f(t, x + dx, 0, 0, 0) - problem.f(t, x - dx, 0, 0, 0)) / (2.0 * dx));
            max_slope = std::max(max_slope, fs);
        }
    }
    if (max_slope > problem.lipschitz_K * (1.0 + 1e-6)) {
        std::ostringstream os;
        os << "finite-difference slope " << max_slope << " exceeds the declared constant "
           << problem.lipschitz_K;
        warnings.push_back(os.str());
    }
    return warnings;
}

}  // namespace levyfbsde
