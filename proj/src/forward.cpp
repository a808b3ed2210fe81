#include "levyfbsde/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "levyfbsde/errors.hpp"
#include "levyfbsde/parallel.hpp"

namespace levyfbsde {

std::size_t JumpAdaptedGrid::last_node_at(double time) const {
    if (time < t.front()) throw std::domain_error("grid: time before start");
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    return static_cast<std::size_t>(it - t.begin()) - 1;
}

JumpAdaptedGrid build_grid(int regular_steps, const JumpSkeleton& skeleton,
                           const std::vector<double>& extra_times) {
    if (regular_steps < 1) throw std::domain_error("build_grid: need at least one step");
    const double T = skeleton.horizon;
    if (!(T > 0.0)) throw ConfigError("build_grid: skeleton has no horizon");
    for (const ShotNoiseJump& j : skeleton.jumps)
        if (j.time < 0.0 || j.time > T)
            throw ConfigError("build_grid: skeleton jump outside the horizon");

    struct Entry {
        double t;
        double jump;
        std::uint8_t tag;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(regular_steps) + 1 + skeleton.jumps.size() +
                    extra_times.size());
    for (int k = 0; k <= regular_steps; ++k)
        entries.push_back({T * k / regular_steps, 0.0, kRegularNode});
    for (double et : extra_times) {
        if (et < 0.0 || et > T) throw ConfigError("build_grid: forced time outside the horizon");
        entries.push_back({et, 0.0, kExtraNode});
    }
    for (const ShotNoiseJump& j : skeleton.jumps) entries.push_back({j.time, j.size, kJumpNode});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& l, const Entry& r) { return l.t < r.t; });

    // Merge nodes closer than the degenerate-interval cutoff; jump sizes
    // accumulate and tags combine.
    const double merge_eps = 1e-14 * T;
    JumpAdaptedGrid grid;
    grid.regular_steps = regular_steps;
    grid.horizon = T;
    for (const Entry& e : entries) {
        if (!grid.t.empty() && e.t - grid.t.back() <= merge_eps) {
            grid.jump.back() += e.jump;
            // A regular or forced time is the canonical key for lookups.
            if ((e.tag & (kRegularNode | kExtraNode)) &&
                !(grid.tag.back() & (kRegularNode | kExtraNode)))
                grid.t.back() = e.t;
            grid.tag.back() |= e.tag;
        } else {
            grid.t.push_back(e.t);
            grid.jump.push_back(e.jump);
            grid.tag.push_back(e.tag);
        }
    }
    return grid;
}

double euler_step(const FbsdeProblem& problem, double x, double t0, double t1, double db,
                  double jump, double zeta1) {
    if (!(t1 > t0)) throw std::domain_error("euler_step: interval must have positive length");
    const double dt = t1 - t0;
    const double bx = problem.b(t0, x);
    const double ax = problem.a(t0, x);
    const double hx = problem.h(t0, x);
    const double next = x + bx * dt + ax * db + hx * (jump - dt * zeta1);
    if (!std::isfinite(next)) {
        std::ostringstream os;
        os << "euler_step: non-finite state at t=" << t0 << ", x=" << x;
        throw NumericError(os.str());
    }
    return next;
}

std::vector<double> simulate_states(const FbsdeProblem& problem, const JumpAdaptedGrid& grid,
                                    const std::vector<double>& db, double zeta1) {
    if (db.size() + 1 != grid.t.size())
        throw std::invalid_argument("simulate_states: increment count does not match the grid");
    std::vector<double> x(grid.t.size());
    x[0] = problem.x0;
    for (std::size_t k = 0; k + 1 < grid.t.size(); ++k)
        x[k + 1] = euler_step(problem, x[k], grid.t[k], grid.t[k + 1], db[k], grid.jump[k + 1], zeta1);
    return x;
}

std::vector<std::size_t> PathEnsemble::common_indices(std::size_t path_index) const {
    const JumpAdaptedGrid& grid = path.at(path_index).grid;
    std::vector<std::size_t> idx(common_times.size());
    for (std::size_t k = 0; k < common_times.size(); ++k) {
        const double ct = common_times[k];
        auto it = std::lower_bound(grid.t.begin(), grid.t.end(), ct);
        std::size_t i = static_cast<std::size_t>(it - grid.t.begin());
        if (i == grid.t.size() ||
            (i > 0 && ct - grid.t[i - 1] < grid.t[i] - ct))
            --i;
        if (std::abs(grid.t[i] - ct) > 1e-12 * std::max(1.0, grid.horizon))
            throw NumericError("common_indices: requested time is not a grid node");
        idx[k] = i;
    }
    return idx;
}

PathEnsemble simulate_ensemble(const FbsdeProblem& problem, const LevyModel& model,
                               const SeriesRepresentation& rep, double n, int regular_steps,
                               int paths, std::uint64_t seed,
                               const std::vector<double>& extra_times) {
    problem.validate();
    if (paths < 1) throw std::invalid_argument("simulate_ensemble: need at least one path");
    const double T = problem.horizon;
    const double zeta1 = retained_signed_first_moment(model, rep, n);

    PathEnsemble ens;
    ens.level = n;
    ens.regular_steps = regular_steps;
    ens.paths = paths;
    ens.seed = seed;
    ens.zeta1 = zeta1;
    for (int k = 0; k <= regular_steps; ++k) ens.common_times.push_back(T * k / regular_steps);
    for (double et : extra_times) ens.common_times.push_back(et);
    std::sort(ens.common_times.begin(), ens.common_times.end());
    ens.common_times.erase(std::unique(ens.common_times.begin(), ens.common_times.end()),
                           ens.common_times.end());

    ens.path.resize(static_cast<std::size_t>(paths));
    parallel_for(static_cast<std::size_t>(paths), [&](std::size_t m) {
        ForwardPath& fp = ens.path[m];
        fp.skeleton = sample_skeleton(rep, n, T, zeta1,
                                      RngStream::substream(seed, m, StreamTag::Epochs),
                                      RngStream::substream(seed, m, StreamTag::Marks),
                                      RngStream::substream(seed, m, StreamTag::JumpTimes));
        fp.grid = build_grid(regular_steps, fp.skeleton, extra_times);
        RngStream bm = RngStream::substream(seed, m, StreamTag::Brownian);
        fp.db.resize(fp.grid.size() - 1);
        for (std::size_t k = 0; k + 1 < fp.grid.size(); ++k)
            fp.db[k] = std::sqrt(fp.grid.t[k + 1] - fp.grid.t[k]) * bm.normal();
        fp.x = simulate_states(problem, fp.grid, fp.db, zeta1);
    });
    return ens;
}

}  // namespace levyfbsde
