#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "levyfbsde/forward.hpp"
#include "levyfbsde/problem.hpp"

namespace levyfbsde {

enum class RegressionBasis {
    GlobalPolynomial,
    PartitionedLinear,
};

struct RegressionSpec {
    RegressionBasis basis = RegressionBasis::GlobalPolynomial;
    int degree = 3;          // polynomial basis
    int bins = 8;            // partitioned basis
    double state_lo = -5.0;  // partition range
    double state_hi = 5.0;
    double ridge = 0.0;
    // Clip level for the solved values; NaN selects ten times the
    // empirical terminal range.
    double truncation_bound = std::numeric_limits<double>::quiet_NaN();

    void validate() const;
    int dimension() const;
};

struct NodeDiagnostics {
    int max_fixed_point_iters = 0;
    double ridge_used = 0.0;
    int clipped = 0;
    int dropped_columns = 0;
    bool degenerate_design = false;
};

// Compensated rho-weighted jump sum over (s, t].
double gamma_weight(const JumpSkeleton& skeleton, double s, double t, const JumpWeight& rho,
                    double zeta_rho);

// Estimates of the scheme triple on the common grid, with the regression
// fits retained so the diffusion and jump components can be evaluated at
// any state.
struct BackwardSolution {
    std::vector<double> times;
    int paths = 0;
    std::vector<std::vector<double>> y;  // [node][path]

    struct NodeFit {
        double mu = 0.0, sd = 1.0;  // polynomial standardization
        std::vector<double> coef_e, coef_z, coef_g;
        NodeDiagnostics diag;
    };
    std::vector<NodeFit> fits;  // one per interval start node
    RegressionSpec spec;
    double clip_bound = 0.0;
    double zeta_rho = 0.0;

    double y0_mean = 0.0;
    double y0_se = 0.0;

    double cond_mean_value(std::size_t k, double x) const;
    double z_value(std::size_t k, double x) const;
    double gamma_value(std::size_t k, double x) const;
};

// One implicit step: regressions for the conditional expectations at node
// k followed by the per-path fixed-point solve of the generator coupling.
struct BackwardStepResult {
    std::vector<double> y, z, gamma, cond_mean;
    BackwardSolution::NodeFit fit;
};

BackwardStepResult backward_step(std::span<const double> x_k, std::span<const double> y_next,
                                 std::span<const double> db, std::span<const double> gw,
                                 double t_k, double dt, const FbsdeProblem& problem,
                                 const RegressionSpec& spec, double clip_bound);

// Cross-path data on a common grid: states at every common time, Brownian
// increments and compensated rho-weighted jump sums per common interval.
struct CommonGridData {
    std::vector<double> times;               // K
    int paths = 0;                           // M
    std::vector<std::vector<double>> X;      // K x M
    std::vector<std::vector<double>> DB;     // (K-1) x M
    std::vector<std::vector<double>> GW;     // (K-1) x M
};

CommonGridData extract_common_grid(const PathEnsemble& ensemble, const JumpWeight& rho,
                                   double zeta_rho);

BackwardSolution solve_backward_on(const CommonGridData& data, const FbsdeProblem& problem,
                                   const RegressionSpec& spec, double zeta_rho);

// Full backward sweep over the ensemble's common grid. zeta_rho is the
// rho-weighted first moment of the retained measure.
BackwardSolution solve_backward(const PathEnsemble& ensemble, const FbsdeProblem& problem,
                                const RegressionSpec& spec, double zeta_rho);

}  // namespace levyfbsde
