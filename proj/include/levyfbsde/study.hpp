#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyfbsde/backward.hpp"
#include "levyfbsde/harness.hpp"
#include "levyfbsde/levy.hpp"
#include "levyfbsde/problem.hpp"

namespace levyfbsde {

// One (n, N) grid cell of a study.
struct StudyCell {
    double n = 0.0;
    int N = 0;
};

enum class ReferenceMode {
    ClosedForm,
    FineDiscretization,
    SelfOnly,  // no reference; cells report their own summaries
};

struct StudySetup {
    LevyModel model;
    SeriesMethod method = SeriesMethod::Bondesson;
    FbsdeProblem problem;
    std::optional<BenchmarkProblem> benchmark;  // required for ClosedForm references

    std::vector<StudyCell> cells;
    ReferenceMode reference = ReferenceMode::FineDiscretization;
    StudyCell reference_cell;  // for FineDiscretization

    int paths = 1000;
    double p = 2.0;
    std::uint64_t seed = 1;
    RegressionSpec regression;

    std::string id = "study";
};

struct CellResult {
    StudyCell cell;
    bool ok = false;
    std::string message;
    ErrorReport report;
    double y0 = 0.0;
    double y0_se = 0.0;
    double y0_reference = 0.0;  // reference estimate or closed form at the same nodes
};

struct StudyResult {
    StudySetup setup;  // as run
    std::vector<CellResult> cells;
    double reference_y0 = 0.0;
    // Per-path p-th power of the Y difference at the worst node, one
    // vector per cell, for paired monotonicity tests.
    std::vector<std::vector<double>> sup_node_samples;
};

// Simulates every cell against the configured reference with common
// random numbers: one Brownian bridge map and one master skeleton per
// path serve all cells. The backward solve runs per cell on its regular
// grid. Cells that fail record their error and the study continues.
StudyResult run_backward_study(const StudySetup& setup);

// Forward-only strong error at the terminal time against a coupled fine
// reference; nothing is retained per path.
struct ForwardRatePoint {
    int N = 0;
    double l2_error = 0.0;
};
struct ForwardRateResult {
    std::vector<ForwardRatePoint> points;
    RateFit fit;
};
ForwardRateResult run_forward_rate_study(const FbsdeProblem& problem, const LevyModel& model,
                                         SeriesMethod method, double n,
                                         const std::vector<int>& N_list, int N_reference,
                                         int paths, std::uint64_t seed);

// Moment-functional table rows for one representation.
struct MomentRow {
    double n = 0.0;
    TruncationMoments moments;
};
std::vector<MomentRow> moments_table(const LevyModel& model, SeriesMethod method,
                                     const std::vector<double>& levels);

}  // namespace levyfbsde
