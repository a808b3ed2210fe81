#include "levyfbsde/harness.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "levyfbsde/errors.hpp"
#include "levyfbsde/stats.hpp"

namespace levyfbsde {

namespace {

void require_common_grid(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("empirical_norms: solutions live on different grids; refine to a common one");
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a[k] - b[k]) > 1e-12 * std::max(1.0, std::abs(a[k])))
            throw std::invalid_argument("empirical_norms: grid times differ; refine to a common grid");
}

}  // namespace

std::shared_ptr<StateMatrix> common_states(const PathEnsemble& ens) {
    auto X = std::make_shared<StateMatrix>();
    X->assign(ens.common_times.size(), std::vector<double>(static_cast<std::size_t>(ens.paths)));
    for (std::size_t m = 0; m < static_cast<std::size_t>(ens.paths); ++m) {
        const auto idx = ens.common_indices(m);
        for (std::size_t k = 0; k < ens.common_times.size(); ++k)
            (*X)[k][m] = ens.path[m].x[idx[k]];
    }
    return X;
}

SolutionView make_view(std::shared_ptr<const BackwardSolution> sol,
                       std::shared_ptr<const StateMatrix> states) {
    SolutionView v;
    v.times = sol->times;
    v.paths = static_cast<std::size_t>(sol->paths);
    v.y = [sol](std::size_t k, std::size_t m) { return sol->y[k][m]; };
    v.z = [sol, states](std::size_t k, std::size_t m) {
        const std::size_t kk = std::min(k, sol->fits.size() - 1);
        return sol->z_value(kk, (*states)[k][m]);
    };
    v.gamma = [sol, states](std::size_t k, std::size_t m) {
        const std::size_t kk = std::min(k, sol->fits.size() - 1);
        return sol->gamma_value(kk, (*states)[k][m]);
    };
    return v;
}

SolutionView make_view(const BackwardSolution& sol, const PathEnsemble& ens) {
    return make_view(std::make_shared<BackwardSolution>(sol), common_states(ens));
}

SolutionView make_view(const BenchmarkProblem& bm, std::shared_ptr<const StateMatrix> states,
                       std::vector<double> times, double zeta_rho) {
    SolutionView v;
    v.times = std::move(times);
    v.paths = states->empty() ? 0 : (*states)[0].size();
    auto times_ptr = std::make_shared<std::vector<double>>(v.times);
    auto y = bm.y_exact;
    auto z = bm.z_exact;
    auto q = bm.gamma_exact;
    v.y = [states, times_ptr, y](std::size_t k, std::size_t m) {
        return y((*times_ptr)[k], (*states)[k][m]);
    };
    v.z = [states, times_ptr, z](std::size_t k, std::size_t m) {
        return z((*times_ptr)[k], (*states)[k][m]);
    };
    v.gamma = [states, times_ptr, q, zeta_rho](std::size_t k, std::size_t m) {
        return q((*times_ptr)[k], (*states)[k][m], zeta_rho);
    };
    return v;
}

SolutionView make_view(const BenchmarkProblem& bm, const PathEnsemble& ens, double zeta_rho) {
    return make_view(bm, common_states(ens), ens.common_times, zeta_rho);
}

namespace {

SolutionView remap_view(const SolutionView& v, std::vector<double> times,
                        std::shared_ptr<std::vector<std::size_t>> map) {
    SolutionView out;
    out.times = std::move(times);
    out.paths = v.paths;
    auto fy = v.y;
    auto fz = v.z;
    auto fg = v.gamma;
    out.y = [map, fy](std::size_t k, std::size_t m) { return fy((*map)[k], m); };
    out.z = [map, fz](std::size_t k, std::size_t m) { return fz((*map)[k], m); };
    out.gamma = [map, fg](std::size_t k, std::size_t m) { return fg((*map)[k], m); };
    return out;
}

}  // namespace

SolutionView restrict_view(const SolutionView& v, const std::vector<double>& coarse_times) {
    auto map = std::make_shared<std::vector<std::size_t>>();
    map->reserve(coarse_times.size());
    for (double ct : coarse_times) {
        const auto it = std::lower_bound(v.times.begin(), v.times.end(), ct - 1e-12);
        if (it == v.times.end() || std::abs(*it - ct) > 1e-10 * std::max(1.0, std::abs(ct)))
            throw std::invalid_argument("restrict_view: time is not a node of the source view");
        map->push_back(static_cast<std::size_t>(it - v.times.begin()));
    }
    return remap_view(v, coarse_times, std::move(map));
}

SolutionView extend_view(const SolutionView& v, const std::vector<double>& fine_times) {
    auto map = std::make_shared<std::vector<std::size_t>>();
    map->reserve(fine_times.size());
    for (double ft : fine_times) {
        const auto it = std::upper_bound(v.times.begin(), v.times.end(), ft + 1e-12);
        if (it == v.times.begin())
            throw std::invalid_argument("extend_view: time precedes the source grid");
        map->push_back(static_cast<std::size_t>(it - v.times.begin()) - 1);
    }
    return remap_view(v, fine_times, std::move(map));
}

ErrorReport empirical_norms(const SolutionView& a, const SolutionView& b, double p) {
    if (p < 2.0) throw std::domain_error("empirical_norms: p must be at least 2");
    require_common_grid(a.times, b.times);
    if (a.paths != b.paths || a.paths == 0)
        throw std::invalid_argument("empirical_norms: path counts differ");

    const std::size_t K = a.times.size();
    const std::size_t M = a.paths;

    ErrorReport rep;
    rep.p = p;
    rep.M = static_cast<int>(M);

    std::vector<double> node_mean(K, 0.0);
    std::vector<double> work(M);
    std::vector<double> path_sup(M, 0.0);
    std::vector<double> zq(M, 0.0);
    std::vector<double> gq(M, 0.0);

    std::vector<double> sup_batch;  // per-path p-th power at the sup node
    std::size_t sup_node = 0;

    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t m = 0; m < M; ++m) {
            const double d = std::abs(a.y(k, m) - b.y(k, m));
            work[m] = std::pow(d, p);
            path_sup[m] = std::max(path_sup[m], work[m]);
        }
        node_mean[k] = mean(work);
        if (node_mean[k] >= node_mean[sup_node]) sup_node = k;
    }
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double dt = a.times[k + 1] - a.times[k];
        for (std::size_t m = 0; m < M; ++m) {
            const double dz = a.z(k, m) - b.z(k, m);
            const double dg = a.gamma(k, m) - b.gamma(k, m);
            zq[m] += dz * dz * dt;
            gq[m] += dg * dg * dt;
        }
    }

    rep.sup_y_error = std::pow(*std::max_element(node_mean.begin(), node_mean.end()), 1.0 / p);
    rep.y_path_sup_error = std::pow(mean(path_sup), 1.0 / p);
    for (std::size_t m = 0; m < M; ++m) {
        zq[m] = std::pow(zq[m], p / 2.0);
        gq[m] = std::pow(gq[m], p / 2.0);
    }
    rep.z_error = std::pow(mean(zq), 1.0 / p);
    rep.gamma_error = std::pow(mean(gq), 1.0 / p);
    rep.combined = std::pow(std::pow(rep.sup_y_error, p) + std::pow(rep.z_error, p) +
                                std::pow(rep.gamma_error, p),
                            1.0 / p);

    // Uncertainty of the sup-node moment via batch means, mapped through
    // the p-th root by the delta method.
    sup_batch.resize(M);
    for (std::size_t m = 0; m < M; ++m) {
        const double d = std::abs(a.y(sup_node, m) - b.y(sup_node, m));
        sup_batch[m] = std::pow(d, p);
    }
    if (M >= 40) {
        const BatchStats bs = batch_means(sup_batch, 20);
        const double mu = std::max(bs.mean, 1e-300);
        rep.sup_y_se = bs.se / (p * std::pow(mu, 1.0 - 1.0 / p));
    }
    return rep;
}

double empirical_forward_error(const PathEnsemble& a, const PathEnsemble& b, double p) {
    require_common_grid(a.common_times, b.common_times);
    if (a.paths != b.paths) throw std::invalid_argument("empirical_forward_error: path counts differ");
    const std::size_t M = static_cast<std::size_t>(a.paths);
    const std::size_t K = a.common_times.size();
    std::vector<double> sup(M, 0.0);
    for (std::size_t m = 0; m < M; ++m) {
        const auto ia = a.common_indices(m);
        const auto ib = b.common_indices(m);
        for (std::size_t k = 0; k < K; ++k)
            sup[m] = std::max(sup[m], std::abs(a.path[m].x[ia[k]] - b.path[m].x[ib[k]]));
        sup[m] = std::pow(sup[m], p);
    }
    return std::pow(mean(sup), 1.0 / p);
}

RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& err, FitScale scale) {
    if (x.size() != err.size() || x.size() < 3)
        throw std::domain_error("rate_fit: need at least three points");
    std::vector<double> xs(x.size()), ys(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(err[i] > 0.0)) throw std::domain_error("rate_fit: error values must be positive");
        if (scale == FitScale::LogLog) {
            if (!(x[i] > 0.0)) throw std::domain_error("rate_fit: abscissae must be positive");
            xs[i] = std::log(x[i]);
        } else {
            xs[i] = x[i];
        }
        ys[i] = std::log(err[i]);
    }
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::domain_error("rate_fit: degenerate abscissae");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

PairedDelta paired_batch_delta(const std::vector<double>& a, const std::vector<double>& b,
                               int batches) {
    if (a.size() != b.size()) throw std::invalid_argument("paired_batch_delta: length mismatch");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const BatchStats bs = batch_means(diff, batches);
    return {bs.mean, bs.se};
}

}  // namespace levyfbsde
