#include "levyfbsde/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "levyfbsde/errors.hpp"

namespace levyfbsde {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;
constexpr int kMaxIter = 400;

// Power series around 0, good for x <= 1.
double e1_series(double x) {
    double sum = -kEulerGamma - std::log(x);
    double term = 1.0;
    for (int k = 1; k <= kMaxIter; ++k) {
        term *= -x / k;
        const double add = -term / k;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum) + 1e-300) return sum;
    }
    throw NumericError("expint_e1: series did not converge");
}

// Modified Lentz continued fraction, good for x > 1.
double e1_contfrac(double x) {
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h * std::exp(-x);
    }
    throw NumericError("expint_e1: continued fraction did not converge");
}

}  // namespace

double expint_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("expint_e1: argument must be positive");
    return x <= 1.0 ? e1_series(x) : e1_contfrac(x);
}

double expint_e1_inv(double y) {
    if (!(y > 0.0)) throw std::domain_error("expint_e1_inv: argument must be positive");
    if (y > 690.0) return 0.0;  // E1(x) = y forces x below the denormal range

    // Bracket the decreasing function. Small-argument asymptotics give the
    // left guess, exp(-x)/x the right one.
    double lo = std::exp(-y - kEulerGamma);           // E1(lo) >= y
    lo = std::max(lo * 0.5, 1e-308);
    double hi = std::max(2.0 * std::log1p(1.0 / y), 4.0 * lo);
    while (expint_e1(hi) > y) hi *= 2.0;
    while (expint_e1(lo) < y) lo *= 0.5;

    // The root can sit hundreds of orders of magnitude below the upper
    // end, so fall back to geometric rather than arithmetic bisection,
    // with the mean taken in log space to dodge underflow.
    const auto geo_mean = [](double a, double b) {
        return std::exp(0.5 * (std::log(a) + std::log(b)));
    };
    double x = geo_mean(lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double f = expint_e1(x) - y;
        if (f > 0.0) lo = x; else hi = x;
        const double deriv = -std::exp(-x) / x;
        const double next_newton = x - f / deriv;
        const double next = (next_newton > lo && next_newton < hi) ? next_newton
                                                                   : geo_mean(lo, hi);
        if (std::abs(next - x) <= 1e-12 * std::abs(next)) return next;
        x = next;
    }
    throw NumericError("expint_e1_inv: no convergence");
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericError("gamma_p: series did not converge");
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericError("gamma_q: continued fraction did not converge");
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_contfrac(a, x);
}

double lower_incomplete_gamma(double a, double x) {
    if (x == std::numeric_limits<double>::infinity()) return std::tgamma(a);
    return gamma_p(a, x) * std::tgamma(a);
}

}  // namespace levyfbsde
