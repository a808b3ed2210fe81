#include "levyfbsde/study.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "levyfbsde/errors.hpp"
#include "levyfbsde/parallel.hpp"
#include "levyfbsde/stats.hpp"

namespace levyfbsde {

namespace {

struct LevelConstants {
    double zeta1 = 0.0;
    double zeta_rho = 0.0;
};

std::map<double, LevelConstants> level_constants(const LevyModel& model,
                                                 const SeriesRepresentation& rep,
                                                 const std::vector<double>& levels,
                                                 const JumpWeight& rho) {
    std::map<double, LevelConstants> out;
    for (double n : levels) {
        if (out.count(n)) continue;
        LevelConstants lc;
        lc.zeta1 = retained_signed_first_moment(model, rep, n);
        lc.zeta_rho = retained_weighted_first_moment(model, rep, n, rho);
        out[n] = lc;
    }
    return out;
}

// Processing order for the shared Brownian map: coarse grids first, then
// finer ones, so refinement draws condition on already-fixed coarse
// values.
std::vector<std::size_t> insertion_order(const std::vector<StudyCell>& cells) {
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (cells[l].N != cells[r].N) return cells[l].N < cells[r].N;
        return cells[l].n < cells[r].n;
    });
    return order;
}

}  // namespace

StudyResult run_backward_study(const StudySetup& setup) {
    setup.problem.validate();
    setup.model.validate();
    setup.regression.validate();
    if (setup.cells.empty()) throw ConfigError("study: no cells configured");
    if (setup.paths < 1) throw ConfigError("study: path count must be positive");
    if (setup.reference == ReferenceMode::ClosedForm && !setup.benchmark)
        throw ConfigError("study: closed-form reference needs a benchmark problem");
    for (const StudyCell& c : setup.cells) {
        if (!(c.n > 0.0)) throw ConfigError("study: truncation level must be positive");
        if (c.N < 1) throw ConfigError("study: step count must be positive");
    }

    const auto rep = make_representation(setup.model, setup.method);
    const double T = setup.problem.horizon;
    const std::size_t M = static_cast<std::size_t>(setup.paths);

    // All simulated cells; the fine-discretization reference is one more.
    std::vector<StudyCell> sim_cells = setup.cells;
    std::size_t ref_index = sim_cells.size();
    if (setup.reference == ReferenceMode::FineDiscretization) {
        if (!(setup.reference_cell.n > 0.0) || setup.reference_cell.N < 1)
            throw ConfigError("study: fine-discretization reference cell not configured");
        sim_cells.push_back(setup.reference_cell);
    }

    std::vector<double> levels;
    for (const StudyCell& c : sim_cells) levels.push_back(c.n);
    const auto consts = level_constants(setup.model, *rep, levels, setup.problem.rho);
    double n_max = 0.0;
    for (const StudyCell& c : sim_cells) n_max = std::max(n_max, c.n);
    const double zeta1_max = consts.at(n_max).zeta1;

    const std::vector<std::size_t> order = insertion_order(sim_cells);

    // Common-grid data per simulated cell.
    std::vector<CommonGridData> data(sim_cells.size());
    for (std::size_t c = 0; c < sim_cells.size(); ++c) {
        const std::size_t K = static_cast<std::size_t>(sim_cells[c].N) + 1;
        data[c].paths = setup.paths;
        data[c].times.resize(K);
        for (std::size_t k = 0; k < K; ++k)
            data[c].times[k] = T * static_cast<double>(k) / sim_cells[c].N;
        data[c].X.assign(K, std::vector<double>(M));
        data[c].DB.assign(K - 1, std::vector<double>(M));
        data[c].GW.assign(K - 1, std::vector<double>(M));
    }

    // One master skeleton and one Brownian map per path serve every cell.
    parallel_for(M, [&](std::size_t m) {
        const JumpSkeleton master = sample_skeleton(
            *rep, n_max, T, zeta1_max, RngStream::substream(setup.seed, m, StreamTag::Epochs),
            RngStream::substream(setup.seed, m, StreamTag::Marks),
            RngStream::substream(setup.seed, m, StreamTag::JumpTimes));
        BrownianPath bp(RngStream::substream(setup.seed, m, StreamTag::Brownian));

        for (std::size_t oi : order) {
            const StudyCell& cell = sim_cells[oi];
            const LevelConstants& lc = consts.at(cell.n);
            const JumpSkeleton sk = cut_skeleton(master, cell.n, lc.zeta1);
            const JumpAdaptedGrid grid = build_grid(cell.N, sk);
            std::vector<double> db(grid.size() - 1);
            double b_prev = bp.value(grid.t[0]);
            for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
                const double b_next = bp.value(grid.t[k + 1]);
                db[k] = b_next - b_prev;
                b_prev = b_next;
            }
            const std::vector<double> x = simulate_states(setup.problem, grid, db, lc.zeta1);

            CommonGridData& d = data[oi];
            const std::size_t K = d.times.size();
            std::size_t gi = 0;
            double b_at_prev_common = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                // Regular times are grid nodes by construction.
                while (grid.t[gi] < d.times[k] - 1e-12 * std::max(1.0, T)) ++gi;
                d.X[k][m] = x[gi];
                const double b_here = bp.value(grid.t[gi]);
                if (k > 0) d.DB[k - 1][m] = b_here - b_at_prev_common;
                b_at_prev_common = b_here;
                if (k + 1 < K)
                    d.GW[k][m] =
                        gamma_weight(sk, d.times[k], d.times[k + 1], setup.problem.rho, lc.zeta_rho);
            }
        }
    });

    StudyResult result;
    result.setup = setup;
    result.cells.resize(setup.cells.size());
    result.sup_node_samples.resize(setup.cells.size());

    // Reference view on its own grid.
    std::shared_ptr<const BackwardSolution> ref_sol;
    SolutionView ref_view;
    bool have_ref_view = false;
    if (setup.reference == ReferenceMode::FineDiscretization) {
        const LevelConstants& lc = consts.at(sim_cells[ref_index].n);
        ref_sol = std::make_shared<BackwardSolution>(
            solve_backward_on(data[ref_index], setup.problem, setup.regression, lc.zeta_rho));
        auto ref_states = std::make_shared<StateMatrix>(std::move(data[ref_index].X));
        data[ref_index] = CommonGridData{};
        ref_view = make_view(ref_sol, ref_states);
        have_ref_view = true;
        result.reference_y0 = ref_sol->y0_mean;
    }

    for (std::size_t c = 0; c < setup.cells.size(); ++c) {
        CellResult& cr = result.cells[c];
        cr.cell = setup.cells[c];
        try {
            const LevelConstants& lc = consts.at(setup.cells[c].n);
            auto sol = std::make_shared<BackwardSolution>(
                solve_backward_on(data[c], setup.problem, setup.regression, lc.zeta_rho));
            const std::vector<double> cell_times = data[c].times;
            auto states = std::make_shared<StateMatrix>(std::move(data[c].X));
            data[c].DB.clear();
            data[c].GW.clear();
            const SolutionView view = make_view(sol, states);
            cr.y0 = sol->y0_mean;
            cr.y0_se = sol->y0_se;

            // Against a fine reference the cell solution is extended
            // piecewise-constant onto the reference grid, so the
            // comparison sees the between-node motion the error
            // functional is about. A closed form is exact at the cell's
            // own nodes, so there the cell grid is the comparison grid.
            SolutionView mine, other;
            bool have_other = false;
            if (setup.reference == ReferenceMode::ClosedForm) {
                mine = view;
                other = make_view(*setup.benchmark, states, cell_times, lc.zeta_rho);
                cr.y0_reference = setup.benchmark->y_exact(0.0, setup.problem.x0);
                have_other = true;
            } else if (have_ref_view) {
                mine = extend_view(view, ref_view.times);
                other = ref_view;
                cr.y0_reference = result.reference_y0;
                have_other = true;
            }

            if (have_other) {
                cr.report = empirical_norms(mine, other, setup.p);
                cr.report.n = setup.cells[c].n;
                cr.report.N = setup.cells[c].N;
                cr.report.M = setup.paths;
                cr.report.seed = setup.seed;
                cr.report.model_id = setup.model.id();
                cr.report.problem_id = setup.problem.name;

                // Pathwise sup-over-nodes samples for paired comparisons.
                std::vector<double>& samples = result.sup_node_samples[c];
                samples.assign(M, 0.0);
                for (std::size_t k = 0; k < mine.times.size(); ++k)
                    for (std::size_t m = 0; m < M; ++m) {
                        const double dv = std::abs(mine.y(k, m) - other.y(k, m));
                        samples[m] = std::max(samples[m], std::pow(dv, setup.p));
                    }
            }
            cr.ok = true;
        } catch (const std::exception& ex) {
            cr.ok = false;
            cr.message = ex.what();
        }
    }
    return result;
}

ForwardRateResult run_forward_rate_study(const FbsdeProblem& problem, const LevyModel& model,
                                         SeriesMethod method, double n,
                                         const std::vector<int>& N_list, int N_reference,
                                         int paths, std::uint64_t seed) {
    problem.validate();
    model.validate();
    if (N_list.empty()) throw ConfigError("forward rate study: empty step list");
    if (paths < 2) throw ConfigError("forward rate study: need at least two paths");
    const auto rep = make_representation(model, method);
    const double T = problem.horizon;
    const double zeta1 = retained_signed_first_moment(model, *rep, n);

    std::vector<int> all_N = N_list;
    std::sort(all_N.begin(), all_N.end());
    if (N_reference <= all_N.back())
        throw ConfigError("forward rate study: reference step count must exceed every cell");
    all_N.push_back(N_reference);  // finest runs last per the coupling order

    const std::size_t M = static_cast<std::size_t>(paths);
    std::vector<std::vector<double>> sqdiff(all_N.size() - 1, std::vector<double>(M, 0.0));

    parallel_for(M, [&](std::size_t m) {
        const JumpSkeleton sk = sample_skeleton(
            *rep, n, T, zeta1, RngStream::substream(seed, m, StreamTag::Epochs),
            RngStream::substream(seed, m, StreamTag::Marks),
            RngStream::substream(seed, m, StreamTag::JumpTimes));
        BrownianPath bp(RngStream::substream(seed, m, StreamTag::Brownian));
        std::vector<double> terminal(all_N.size());
        for (std::size_t c = 0; c < all_N.size(); ++c) {
            const JumpAdaptedGrid grid = build_grid(all_N[c], sk);
            std::vector<double> db(grid.size() - 1);
            double b_prev = bp.value(grid.t[0]);
            for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
                const double b_next = bp.value(grid.t[k + 1]);
                db[k] = b_next - b_prev;
                b_prev = b_next;
            }
            terminal[c] = simulate_states(problem, grid, db, zeta1).back();
        }
        // all_N is sorted, the reference is the largest entry.
        const double ref = terminal.back();
        for (std::size_t c = 0; c + 1 < all_N.size(); ++c) {
            const double d = terminal[c] - ref;
            sqdiff[c][m] = d * d;
        }
    });

    ForwardRateResult out;
    std::vector<double> xs, es;
    for (std::size_t c = 0; c + 1 < all_N.size(); ++c) {
        if (all_N[c] == N_reference) continue;
        ForwardRatePoint pt;
        pt.N = all_N[c];
        pt.l2_error = std::sqrt(mean(sqdiff[c]));
        out.points.push_back(pt);
        xs.push_back(pt.N);
        es.push_back(pt.l2_error);
    }
    out.fit = rate_fit(xs, es, FitScale::LogLog);
    return out;
}

std::vector<MomentRow> moments_table(const LevyModel& model, SeriesMethod method,
                                     const std::vector<double>& levels) {
    if (levels.empty()) throw ConfigError("moments table: empty level list");
    const auto rep = make_representation(model, method);
    std::vector<MomentRow> rows;
    rows.reserve(levels.size());
    for (double n : levels) {
        MomentRow row;
        row.n = n;
        if (n == 0.0) {
            row.moments.n = 0.0;
            row.moments.sigma2 = discarded_moment(model, *rep, 0.0, 2.0);
            row.moments.sigma_p = discarded_moment(model, *rep, 0.0, model.moment_order_p);
            row.moments.m1_abs = 0.0;
            row.moments.m_p = 0.0;
            row.moments.zeta1 = 0.0;
        } else {
            row.moments = compute_truncation_moments(model, *rep, n);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace levyfbsde
