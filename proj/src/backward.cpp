#include "levyfbsde/backward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "levyfbsde/errors.hpp"
#include "levyfbsde/parallel.hpp"
#include "levyfbsde/stats.hpp"

namespace levyfbsde {

void RegressionSpec::validate() const {
    if (basis == RegressionBasis::GlobalPolynomial && degree < 0)
        throw std::invalid_argument("regression: degree must be nonnegative");
    if (basis == RegressionBasis::PartitionedLinear) {
        if (bins < 1) throw std::invalid_argument("regression: need at least one bin");
        if (!(state_hi > state_lo)) throw std::invalid_argument("regression: empty state range");
    }
    if (ridge < 0.0) throw std::invalid_argument("regression: ridge weight must be nonnegative");
}

int RegressionSpec::dimension() const {
    return basis == RegressionBasis::GlobalPolynomial ? degree + 1 : 2 * bins;
}

double gamma_weight(const JumpSkeleton& skeleton, double s, double t, const JumpWeight& rho,
                    double zeta_rho) {
    if (s > t) throw std::domain_error("gamma_weight: interval start exceeds end");
    double sum = 0.0;
    for (const ShotNoiseJump& j : skeleton.jumps) {
        if (j.time > t) break;
        if (j.time > s) sum += rho(j.size) * j.size;
    }
    return sum - (t - s) * zeta_rho;
}

namespace {

// Basis evaluation at one node. Polynomials are standardized with the
// node's empirical moments; a zero spread collapses to the constant.
struct NodeBasis {
    RegressionBasis type;
    int dim = 1;
    double mu = 0.0, sd = 1.0;
    int bins = 1;
    double lo = 0.0, hi = 1.0;

    void eval(double x, double* phi) const {
        if (type == RegressionBasis::GlobalPolynomial) {
            const double u = sd > 0.0 ? (x - mu) / sd : 0.0;
            double p = 1.0;
            for (int j = 0; j < dim; ++j) {
                phi[j] = p;
                p *= u;
            }
        } else {
            std::fill(phi, phi + dim, 0.0);
            const double w = (hi - lo) / bins;
            int b = static_cast<int>(std::floor((x - lo) / w));
            b = std::clamp(b, 0, bins - 1);
            const double center = lo + (b + 0.5) * w;
            phi[2 * b] = 1.0;
            phi[2 * b + 1] = (x - center) / (0.5 * w);
        }
    }
};

NodeBasis make_node_basis(const RegressionSpec& spec, std::span<const double> x) {
    NodeBasis nb;
    nb.type = spec.basis;
    if (spec.basis == RegressionBasis::GlobalPolynomial) {
        nb.mu = mean(x);
        std::vector<double> centered(x.size());
        for (std::size_t m = 0; m < x.size(); ++m) centered[m] = (x[m] - nb.mu) * (x[m] - nb.mu);
        const double var = pairwise_sum(centered) / static_cast<double>(x.size());
        nb.sd = std::sqrt(std::max(var, 0.0));
        nb.dim = nb.sd > 1e-13 * (1.0 + std::abs(nb.mu)) ? spec.degree + 1 : 1;
        if (nb.dim == 1) nb.sd = 0.0;
    } else {
        nb.bins = spec.bins;
        nb.lo = spec.state_lo;
        nb.hi = spec.state_hi;
        nb.dim = 2 * spec.bins;
    }
    return nb;
}

// Dense symmetric solve; returns false when the matrix is not positive
// definite at the current ridge level.
bool cholesky_solve(std::vector<double> G, int d, std::vector<std::vector<double>*> rhs) {
    for (int j = 0; j < d; ++j) {
        double diag = G[static_cast<std::size_t>(j) * d + j];
        for (int k = 0; k < j; ++k) {
            const double l = G[static_cast<std::size_t>(j) * d + k];
            diag -= l * l;
        }
        if (!(diag > 0.0)) return false;
        const double ljj = std::sqrt(diag);
        G[static_cast<std::size_t>(j) * d + j] = ljj;
        for (int i = j + 1; i < d; ++i) {
            double v = G[static_cast<std::size_t>(i) * d + j];
            for (int k = 0; k < j; ++k)
                v -= G[static_cast<std::size_t>(i) * d + k] * G[static_cast<std::size_t>(j) * d + k];
            G[static_cast<std::size_t>(i) * d + j] = v / ljj;
        }
    }
    for (std::vector<double>* b : rhs) {
        std::vector<double>& v = *b;
        for (int i = 0; i < d; ++i) {
            double s = v[static_cast<std::size_t>(i)];
            for (int k = 0; k < i; ++k) s -= G[static_cast<std::size_t>(i) * d + k] * v[static_cast<std::size_t>(k)];
            v[static_cast<std::size_t>(i)] = s / G[static_cast<std::size_t>(i) * d + i];
        }
        for (int i = d - 1; i >= 0; --i) {
            double s = v[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < d; ++k) s -= G[static_cast<std::size_t>(k) * d + i] * v[static_cast<std::size_t>(k)];
            v[static_cast<std::size_t>(i)] = s / G[static_cast<std::size_t>(i) * d + i];
        }
    }
    return true;
}

struct NormalEquations {
    std::vector<double> gram;          // d*d, symmetric
    std::vector<double> rhs_e, rhs_z, rhs_g;
};

// Block accumulation with a fixed pairwise combine tree, so sums do not
// depend on the thread count.
NormalEquations accumulate_block(const NodeBasis& nb, std::span<const double> x,
                                 std::span<const double> y_next, std::span<const double> db,
                                 std::span<const double> gw, double inv_dt, std::size_t lo,
                                 std::size_t hi) {
    const int d = nb.dim;
    NormalEquations ne;
    ne.gram.assign(static_cast<std::size_t>(d) * d, 0.0);
    ne.rhs_e.assign(static_cast<std::size_t>(d), 0.0);
    ne.rhs_z.assign(static_cast<std::size_t>(d), 0.0);
    ne.rhs_g.assign(static_cast<std::size_t>(d), 0.0);
    std::vector<double> phi(static_cast<std::size_t>(d));
    for (std::size_t m = lo; m < hi; ++m) {
        nb.eval(x[m], phi.data());
        const double ye = y_next[m];
        const double yz = ye * db[m] * inv_dt;
        const double yg = ye * gw[m] * inv_dt;
        for (int i = 0; i < d; ++i) {
            const double pi = phi[static_cast<std::size_t>(i)];
            if (pi == 0.0) continue;
            ne.rhs_e[static_cast<std::size_t>(i)] += pi * ye;
            ne.rhs_z[static_cast<std::size_t>(i)] += pi * yz;
            ne.rhs_g[static_cast<std::size_t>(i)] += pi * yg;
            for (int j = 0; j <= i; ++j)
                ne.gram[static_cast<std::size_t>(i) * d + j] += pi * phi[static_cast<std::size_t>(j)];
        }
    }
    return ne;
}

void combine(NormalEquations& into, const NormalEquations& from) {
    for (std::size_t i = 0; i < into.gram.size(); ++i) into.gram[i] += from.gram[i];
    for (std::size_t i = 0; i < into.rhs_e.size(); ++i) {
        into.rhs_e[i] += from.rhs_e[i];
        into.rhs_z[i] += from.rhs_z[i];
        into.rhs_g[i] += from.rhs_g[i];
    }
}

NormalEquations accumulate_tree(const NodeBasis& nb, std::span<const double> x,
                                std::span<const double> y_next, std::span<const double> db,
                                std::span<const double> gw, double inv_dt, std::size_t lo,
                                std::size_t hi) {
    if (hi - lo <= 2048) return accumulate_block(nb, x, y_next, db, gw, inv_dt, lo, hi);
    const std::size_t mid = lo + (hi - lo) / 2;
    NormalEquations left = accumulate_tree(nb, x, y_next, db, gw, inv_dt, lo, mid);
    NormalEquations right = accumulate_tree(nb, x, y_next, db, gw, inv_dt, mid, hi);
    combine(left, right);
    return left;
}

double predict(const NodeBasis& nb, const std::vector<double>& coef, double x) {
    std::vector<double> phi(static_cast<std::size_t>(nb.dim));
    nb.eval(x, phi.data());
    double s = 0.0;
    for (int j = 0; j < nb.dim; ++j) s += coef[static_cast<std::size_t>(j)] * phi[static_cast<std::size_t>(j)];
    return s;
}

NodeBasis basis_from_fit(const RegressionSpec& spec, const BackwardSolution::NodeFit& fit) {
    NodeBasis nb;
    nb.type = spec.basis;
    if (spec.basis == RegressionBasis::GlobalPolynomial) {
        nb.mu = fit.mu;
        nb.sd = fit.sd;
        nb.dim = static_cast<int>(fit.coef_e.size());
    } else {
        nb.bins = spec.bins;
        nb.lo = spec.state_lo;
        nb.hi = spec.state_hi;
        nb.dim = 2 * spec.bins;
    }
    return nb;
}

}  // namespace

double BackwardSolution::cond_mean_value(std::size_t k, double x) const {
    return predict(basis_from_fit(spec, fits.at(k)), fits[k].coef_e, x);
}
double BackwardSolution::z_value(std::size_t k, double x) const {
    return predict(basis_from_fit(spec, fits.at(k)), fits[k].coef_z, x);
}
double BackwardSolution::gamma_value(std::size_t k, double x) const {
    return predict(basis_from_fit(spec, fits.at(k)), fits[k].coef_g, x);
}

BackwardStepResult backward_step(std::span<const double> x_k, std::span<const double> y_next,
                                 std::span<const double> db, std::span<const double> gw,
                                 double t_k, double dt, const FbsdeProblem& problem,
                                 const RegressionSpec& spec, double clip_bound) {
    spec.validate();
    const std::size_t M = x_k.size();
    if (y_next.size() != M || db.size() != M || gw.size() != M)
        throw std::invalid_argument("backward_step: input lengths differ");
    for (double v : y_next)
        if (!std::isfinite(v)) throw NumericError("backward_step: non-finite input values");

    if (static_cast<int>(M) < 10 * spec.dimension()) {
        std::ostringstream os;
        os << "backward_step: " << M << " paths cannot support a basis of dimension "
           << spec.dimension() << "; need at least " << 10 * spec.dimension();
        throw std::invalid_argument(os.str());
    }

    const NodeBasis nb = make_node_basis(spec, x_k);
    const int d = nb.dim;
    NormalEquations ne = accumulate_tree(nb, x_k, y_next, db, gw, 1.0 / dt, 0, M);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            ne.gram[static_cast<std::size_t>(i) * d + j] = ne.gram[static_cast<std::size_t>(j) * d + i];

    BackwardStepResult out;
    out.fit.mu = nb.mu;
    out.fit.sd = nb.sd;
    out.fit.diag.degenerate_design = (spec.basis == RegressionBasis::GlobalPolynomial && d == 1);

    // Pin empty columns (unoccupied bins) so the factorization can run.
    for (int j = 0; j < d; ++j) {
        if (ne.gram[static_cast<std::size_t>(j) * d + j] == 0.0) {
            ne.gram[static_cast<std::size_t>(j) * d + j] = 1.0;
            ++out.fit.diag.dropped_columns;
        }
    }

    // Ridge escalation on factorization failure; the weight used is
    // reported in the diagnostics.
    double trace = 0.0;
    for (int j = 0; j < d; ++j) trace += ne.gram[static_cast<std::size_t>(j) * d + j];
    double ridge = spec.ridge;
    std::vector<double> ce, cz, cg;
    for (int attempt = 0;; ++attempt) {
        std::vector<double> G = ne.gram;
        if (ridge > 0.0)
            for (int j = 0; j < d; ++j) G[static_cast<std::size_t>(j) * d + j] += ridge;
        ce = ne.rhs_e;
        cz = ne.rhs_z;
        cg = ne.rhs_g;
        if (cholesky_solve(std::move(G), d, {&ce, &cz, &cg})) break;
        if (attempt >= 12) throw NumericError("backward_step: regression normal equations unsolvable");
        ridge = ridge > 0.0 ? ridge * 100.0 : 1e-12 * trace / d;
    }
    out.fit.diag.ridge_used = ridge;
    out.fit.coef_e = ce;
    out.fit.coef_z = cz;
    out.fit.coef_g = cg;

    out.y.resize(M);
    out.z.resize(M);
    out.gamma.resize(M);
    out.cond_mean.resize(M);

    const double K = problem.lipschitz_K;
    if (dt * K >= 1.0)
        throw NumericError("backward_step: step too large for the declared Lipschitz constant");

    std::vector<double> phi(static_cast<std::size_t>(d));
    int worst_iters = 0;
    int clipped = 0;
    for (std::size_t m = 0; m < M; ++m) {
        nb.eval(x_k[m], phi.data());
        double e = 0.0, z = 0.0, q = 0.0;
        for (int j = 0; j < d; ++j) {
            e += ce[static_cast<std::size_t>(j)] * phi[static_cast<std::size_t>(j)];
            z += cz[static_cast<std::size_t>(j)] * phi[static_cast<std::size_t>(j)];
            q += cg[static_cast<std::size_t>(j)] * phi[static_cast<std::size_t>(j)];
        }
        out.cond_mean[m] = e;
        out.z[m] = z;
        out.gamma[m] = q;

        // Picard iteration for the implicit generator coupling.
        double y = e;
        int it = 0;
        for (; it < 50; ++it) {
            const double next = e + dt * problem.f(t_k, x_k[m], y, z, q);
            if (std::abs(next - y) <= 1e-12 * std::max(1.0, std::abs(next))) {
                y = next;
                break;
            }
            y = next;
        }
        if (it >= 50) {
            std::ostringstream os;
            os << "backward_step: fixed point did not converge at t=" << t_k << ", path " << m;
            throw NumericError(os.str());
        }
        worst_iters = std::max(worst_iters, it + 1);
        if (std::abs(y) > clip_bound) {
            y = std::copysign(clip_bound, y);
            ++clipped;
        }
        out.y[m] = y;
    }
    out.fit.diag.max_fixed_point_iters = worst_iters;
    out.fit.diag.clipped = clipped;
    return out;
}

CommonGridData extract_common_grid(const PathEnsemble& ensemble, const JumpWeight& rho,
                                   double zeta_rho) {
    const std::size_t M = static_cast<std::size_t>(ensemble.paths);
    const std::vector<double>& times = ensemble.common_times;
    const std::size_t K = times.size();
    CommonGridData data;
    data.times = times;
    data.paths = ensemble.paths;
    data.X.assign(K, std::vector<double>(M));
    data.DB.assign(K - 1, std::vector<double>(M));
    data.GW.assign(K - 1, std::vector<double>(M));
    parallel_for(M, [&](std::size_t m) {
        const ForwardPath& fp = ensemble.path[m];
        const std::vector<std::size_t> idx = ensemble.common_indices(m);
        for (std::size_t k = 0; k < K; ++k) data.X[k][m] = fp.x[idx[k]];
        for (std::size_t k = 0; k + 1 < K; ++k) {
            double s = 0.0;
            for (std::size_t i = idx[k]; i < idx[k + 1]; ++i) s += fp.db[i];
            data.DB[k][m] = s;
            data.GW[k][m] = gamma_weight(fp.skeleton, times[k], times[k + 1], rho, zeta_rho);
        }
    });
    return data;
}

BackwardSolution solve_backward_on(const CommonGridData& data, const FbsdeProblem& problem,
                                   const RegressionSpec& spec, double zeta_rho) {
    spec.validate();
    problem.validate();
    const std::size_t M = static_cast<std::size_t>(data.paths);
    const std::vector<double>& times = data.times;
    const std::size_t K = times.size();
    if (K < 2) throw std::invalid_argument("solve_backward: need at least two common times");
    if (static_cast<int>(M) < 10 * spec.dimension()) {
        std::ostringstream os;
        os << "solve_backward: " << M << " paths cannot support a basis of dimension "
           << spec.dimension() << "; need at least " << 10 * spec.dimension();
        throw std::invalid_argument(os.str());
    }

    BackwardSolution sol;
    sol.times = times;
    sol.paths = data.paths;
    sol.spec = spec;
    sol.zeta_rho = zeta_rho;
    sol.y.assign(K, std::vector<double>(M));
    sol.fits.resize(K - 1);

    // Terminal condition.
    for (std::size_t m = 0; m < M; ++m) sol.y[K - 1][m] = problem.g(data.X[K - 1][m]);

    double bound = spec.truncation_bound;
    if (!(bound > 0.0) || std::isnan(bound)) {
        double worst = 0.0;
        for (std::size_t m = 0; m < M; ++m) worst = std::max(worst, std::abs(sol.y[K - 1][m]));
        bound = 10.0 * std::max(worst, 1e-8);
    }
    sol.clip_bound = bound;

    for (std::size_t k = K - 1; k-- > 0;) {
        BackwardStepResult step =
            backward_step(data.X[k], sol.y[k + 1], data.DB[k], data.GW[k], times[k],
                          times[k + 1] - times[k], problem, spec, bound);
        sol.y[k] = std::move(step.y);
        sol.fits[k] = std::move(step.fit);
    }

    sol.y0_mean = mean(sol.y[0]);
    sol.y0_se = sol.y[0].size() > 1 && variance(sol.y[0]) > 0.0 ? std_error_of_mean(sol.y[0]) : 0.0;
    return sol;
}

BackwardSolution solve_backward(const PathEnsemble& ensemble, const FbsdeProblem& problem,
                                const RegressionSpec& spec, double zeta_rho) {
    return solve_backward_on(extract_common_grid(ensemble, problem.rho, zeta_rho), problem, spec,
                             zeta_rho);
}

}  // namespace levyfbsde
