#include "levyfbsde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "levyfbsde/errors.hpp"

namespace levyfbsde {

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct RuleResult {
    double value;
    double error;
};

RuleResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = half * kXgk[j];
        const double f1 = f(center - x);
        const double f2 = f(center + x);
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
    }
    RuleResult out;
    out.value = result_kronrod * half;
    out.error = std::abs((result_kronrod - result_gauss) * half);
    if (!std::isfinite(out.value))
        throw IntegrationError("quadrature: non-finite integrand value");
    return out;
}

struct Segment {
    double a, b, value, error;
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, opt);

    RuleResult whole = gk15(f, a, b);
    std::vector<Segment> segs{{a, b, whole.value, whole.error}};
    double total = whole.value;
    double total_err = whole.error;
    int splits = 0;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (++splits > opt.max_subdivisions)
            throw IntegrationError("quadrature: subdivision limit on " +
                                   (opt.label.empty() ? std::string("integral") : opt.label));
        auto worst = std::max_element(segs.begin(), segs.end(),
                                      [](const Segment& l, const Segment& r) { return l.error < r.error; });
        const Segment s = *worst;
        segs.erase(worst);
        const double mid = 0.5 * (s.a + s.b);
        const RuleResult left = gk15(f, s.a, mid);
        const RuleResult right = gk15(f, mid, s.b);
        total += left.value + right.value - s.value;
        total_err += left.error + right.error - s.error;
        segs.push_back({s.a, mid, left.value, left.error});
        segs.push_back({mid, s.b, right.value, right.error});
    }
    return total;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureOptions& opt) {
    double lo = a;
    double len = std::max(1.0, std::abs(a));
    double total = 0.0;
    for (int k = 0; k < 220; ++k) {
        const double piece = integrate(f, lo, lo + len, opt);
        total += piece;
        lo += len;
        len *= 2.0;
        if (k > 0 && std::abs(piece) <= opt.tail_fraction * std::max(std::abs(total), opt.abs_tol))
            return total;
    }
    throw IntegrationError("quadrature: tail did not decay on " +
                           (opt.label.empty() ? std::string("semi-infinite integral") : opt.label));
}

}  // namespace levyfbsde
