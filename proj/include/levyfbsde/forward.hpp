#pragma once

#include <cstdint>
#include <vector>

#include "levyfbsde/problem.hpp"
#include "levyfbsde/rng.hpp"
#include "levyfbsde/shotnoise.hpp"

namespace levyfbsde {

enum NodeTag : std::uint8_t {
    kRegularNode = 1,
    kJumpNode = 2,
    kExtraNode = 4,
};

// Superposition of the regular grid, the forced common times and the jump
// times of one skeleton. Jumps land exactly on nodes.
struct JumpAdaptedGrid {
    std::vector<double> t;         // strictly increasing, t.front()=0, t.back()=T
    std::vector<double> jump;      // jump size arriving at each node (0 if none)
    std::vector<std::uint8_t> tag;
    int regular_steps = 0;
    double horizon = 0.0;

    std::size_t size() const { return t.size(); }
    // Index of the last node <= time.
    std::size_t last_node_at(double time) const;
};

JumpAdaptedGrid build_grid(int regular_steps, const JumpSkeleton& skeleton,
                           const std::vector<double>& extra_times = {});

// One Euler update over (t0, t1]. The jump (if any) lands at t1 and is
// applied with the pre-jump coefficient value.
double euler_step(const FbsdeProblem& problem, double x, double t0, double t1, double db,
                  double jump, double zeta1);

struct ForwardPath {
    JumpSkeleton skeleton;
    JumpAdaptedGrid grid;
    std::vector<double> x;   // state at every node
    std::vector<double> db;  // Brownian increment over (t[k], t[k+1]], size()-1 entries
};

// Runs the recursion along a grid given per-interval Brownian increments.
std::vector<double> simulate_states(const FbsdeProblem& problem, const JumpAdaptedGrid& grid,
                                    const std::vector<double>& db, double zeta1);

struct PathEnsemble {
    double level = 0.0;      // n
    int regular_steps = 0;   // N
    int paths = 0;           // M
    std::uint64_t seed = 0;
    double zeta1 = 0.0;
    std::vector<double> common_times;  // regular grid plus forced extras
    std::vector<ForwardPath> path;

    // Per-path values at the common times.
    std::vector<std::size_t> common_indices(std::size_t path_index) const;
};

// M independent paths, each with its own skeleton and grid; deterministic
// in (seed, path index) and independent of scheduling.
PathEnsemble simulate_ensemble(const FbsdeProblem& problem, const LevyModel& model,
                               const SeriesRepresentation& rep, double n, int regular_steps,
                               int paths, std::uint64_t seed,
                               const std::vector<double>& extra_times = {});

}  // namespace levyfbsde
