#pragma once

namespace levyfbsde {

// Exponential integral E1(x) = int_x^inf exp(-u)/u du, x > 0.
double expint_e1(double x);

// Inverse of E1 on (0, inf): returns x with E1(x) = y. Safeguarded Newton
// on a monotone bracket, tolerance 1e-12 relative. Arguments beyond the
// double exponent range (y > ~690) return 0.
double expint_e1_inv(double y);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Unnormalized lower incomplete gamma, int_0^x t^(a-1) e^(-t) dt.
double lower_incomplete_gamma(double a, double x);

}  // namespace levyfbsde
