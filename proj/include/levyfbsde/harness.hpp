#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "levyfbsde/backward.hpp"
#include "levyfbsde/forward.hpp"

namespace levyfbsde {

using StateMatrix = std::vector<std::vector<double>>;  // [node][path]

// Pathwise view of one backward solution on a common grid, abstracting
// over computed solutions and closed-form references.
struct SolutionView {
    std::vector<double> times;
    // value(node k, path m)
    std::function<double(std::size_t, std::size_t)> y;
    std::function<double(std::size_t, std::size_t)> z;
    std::function<double(std::size_t, std::size_t)> gamma;
    std::size_t paths = 0;
};

SolutionView make_view(std::shared_ptr<const BackwardSolution> sol,
                       std::shared_ptr<const StateMatrix> states);
SolutionView make_view(const BackwardSolution& sol, const PathEnsemble& ens);
// Closed forms evaluated pathwise along the given states.
SolutionView make_view(const BenchmarkProblem& bm, std::shared_ptr<const StateMatrix> states,
                       std::vector<double> times, double zeta_rho);
SolutionView make_view(const BenchmarkProblem& bm, const PathEnsemble& ens, double zeta_rho);

// View sampled at a coarser set of times; every requested time must be a
// node of the source view.
SolutionView restrict_view(const SolutionView& v, const std::vector<double>& coarse_times);

// Piecewise-constant extension onto a finer time set: each requested time
// reads the last source node at or before it, matching the scheme's
// between-node convention.
SolutionView extend_view(const SolutionView& v, const std::vector<double>& fine_times);

std::shared_ptr<StateMatrix> common_states(const PathEnsemble& ens);

struct ErrorReport {
    double n = 0.0;
    int N = 0;
    int M = 0;
    double p = 2.0;
    std::uint64_t seed = 0;
    std::string model_id, problem_id;

    // sup over nodes of the path-averaged p-th moment, p-th root
    double sup_y_error = 0.0;
    // p-th root of the path-averaged sup over nodes (the pathwise form)
    double y_path_sup_error = 0.0;
    double z_error = 0.0;      // time-quadrature H^p style
    double gamma_error = 0.0;  // same, jump channel
    double combined = 0.0;     // (sup_y^p + z^p + gamma^p)^(1/p)
    double forward_error = 0.0;

    // Batch-means uncertainty of sup_y_error, for noise bands.
    double sup_y_se = 0.0;
};

// Both inputs must live on the same common grid (times equal to 1e-12).
ErrorReport empirical_norms(const SolutionView& a, const SolutionView& b, double p);

// E[sup over common nodes |X_a - X_b|^p]^(1/p), pathwise over coupled
// ensembles on a shared common grid.
double empirical_forward_error(const PathEnsemble& a, const PathEnsemble& b, double p);

enum class FitScale { LogLog, SemiLogY };

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares of log(err) against log(x) or x.
RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& err,
                 FitScale scale = FitScale::LogLog);

// Paired batch comparison of two per-path statistics; the difference of
// means and its standard error over matched batches.
struct PairedDelta {
    double delta = 0.0;
    double se = 0.0;
};
PairedDelta paired_batch_delta(const std::vector<double>& a, const std::vector<double>& b,
                               int batches = 20);

}  // namespace levyfbsde
