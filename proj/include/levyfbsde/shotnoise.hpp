#pragma once

#include <cstdint>
#include <vector>

#include "levyfbsde/levy.hpp"
#include "levyfbsde/rng.hpp"

namespace levyfbsde {

// One retained series term placed on [0, T].
struct ShotNoiseJump {
    double time = 0.0;   // uniform placement, sorted and made strictly increasing
    double size = 0.0;   // nonzero
    double epoch = 0.0;  // Poisson arrival G_i, kept so levels can be re-cut
};

// The truncated jump part of one path: finitely many jumps plus the
// retained first moment used to compensate them.
struct JumpSkeleton {
    double horizon = 0.0;  // T
    double level = 0.0;    // n
    double zeta1 = 0.0;    // signed first moment of the retained measure
    std::vector<ShotNoiseJump> jumps;      // sorted by time
    std::vector<double> epoch_arrivals;    // all G_i <= n*T, increasing
    std::vector<double> epoch_centering;   // per-epoch constants; empty when all zero
    std::int64_t count = 0;                // epochs, including rejected proposals
    std::int64_t rejected = 0;             // proposals mapped to size zero and dropped
    double centering_sum = 0.0;

    // Sum of jump sizes on (s, t].
    double jump_sum(double s, double t) const;
    // Compensated increment on (s, t]: jumps minus (t-s) * zeta1.
    double increment(double s, double t) const;
    // Raw truncated process value at t, including centering drift.
    double process_value(double t) const;
};

// Arrival times of a unit-rate Poisson process up to the horizon.
std::vector<double> sample_epochs(double horizon, RngStream& stream);

// Draws a full skeleton at level n. zeta1 must be the precomputed retained
// first moment for (model, representation, n); sampling itself stays free
// of quadrature.
JumpSkeleton sample_skeleton(const SeriesRepresentation& rep, double n, double horizon,
                             double zeta1, RngStream epochs, RngStream marks, RngStream times);

// Re-cuts a skeleton to a lower level sharing the same draws; sub-level
// skeletons are exact subsets of the parent.
JumpSkeleton cut_skeleton(const JumpSkeleton& parent, double n, double zeta1);

}  // namespace levyfbsde
