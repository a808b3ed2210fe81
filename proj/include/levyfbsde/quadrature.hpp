#pragma once

#include <functional>
#include <string>

namespace levyfbsde {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 4000;
    // Tail extension stops once a doubled segment contributes less than
    // this fraction of the accumulated value.
    double tail_fraction = 1e-14;
    std::string label;  // carried into failure diagnostics
};

// Adaptive Gauss-Kronrod 7-15 on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

// Integral over [a, inf) by segment doubling with the adaptive rule on
// each segment. Requires an eventually decaying integrand.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureOptions& opt = {});

}  // namespace levyfbsde
