#include "bsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bsde/brownian_lattice.hpp"
#include "bsde/catalog.hpp"
#include "bsde/parallel.hpp"

namespace bsde {

double default_c_p(double p) { return std::pow(4.0, p - 1.0); }

namespace {

void check_problem(const Problem& problem, const BrownianLattice& lattice) {
    if (problem.xi.size() != lattice.paths()) {
        throw std::invalid_argument("solver: xi must have one value per path");
    }
    if (!(problem.p > 1.0)) throw std::invalid_argument("solver: p must be > 1");
    if (problem.generator.z_dim != lattice.dimension()) {
        throw std::invalid_argument("solver: generator z dimension != lattice dimension");
    }
}

struct CoeffWriter {
    CoefficientTable* table = nullptr;
    std::size_t K = 0;
    std::size_t d = 0;

    void ensure(std::size_t points) {
        if (!table) return;
        if (table->y_coeffs.empty()) {
            table->basis_size = K;
            table->z_dim = d;
            table->y_coeffs.assign(points * K, 0.0);
            table->z_coeffs.assign(points * d * K, 0.0);
            table->valid.assign(points, 0);
        }
    }
    void write_y(std::size_t i, const std::vector<double>& beta) {
        if (!table) return;
        std::copy(beta.begin(), beta.end(), table->y_coeffs.begin() + i * K);
        table->valid[i] = 1;
    }
    void write_z(std::size_t i, std::size_t c, const std::vector<double>& beta) {
        if (!table) return;
        std::copy(beta.begin(), beta.end(), table->z_coeffs.begin() + (i * d + c) * K);
    }
};

} // namespace

void picard_step(const Problem& problem, const BrownianLattice& lattice,
                 const SolverConfig& config, std::size_t lo, std::size_t hi,
                 const std::vector<std::size_t>& win_lo, const std::vector<std::size_t>& win_hi,
                 const AdaptedProcess& prevY, const AdaptedProcess& prevZ, AdaptedProcess& outY,
                 AdaptedProcess& outZ, CoefficientTable* coeffs) {
    const TimeGrid& grid = lattice.grid();
    const std::size_t paths = lattice.paths();
    const std::size_t d = lattice.dimension();
    const GeneratorSpec& g = problem.generator;
    if (hi > grid.points() - 1 || lo >= hi) {
        throw std::invalid_argument("picard_step: bad index range");
    }

    // Driver on the previous iterate over active points only; frozen points
    // contribute zero.
    AdaptedProcess gvals(paths, grid.points());
    parallel_for(paths, config.workers, [&](std::size_t p) {
        for (std::size_t i = win_lo[p]; i < win_hi[p]; ++i) {
            gvals.at(p, i) = g(p, i, prevY.at(p, i), prevZ.vec(p, i));
        }
    });

    CoeffWriter writer{coeffs, config.basis.size(d), d};
    writer.ensure(grid.points());

    std::vector<std::size_t> rows;
    std::vector<double> target, ztarget;
    rows.reserve(paths);
    target.reserve(paths);
    ztarget.reserve(paths);

    for (std::size_t i = hi; i-- > lo;) {
        rows.clear();
        target.clear();
        for (std::size_t p = 0; p < paths; ++p) {
            if (win_lo[p] <= i && i < win_hi[p]) {
                rows.push_back(p);
                target.push_back(outY.at(p, i + 1) + gvals.at(p, i) * grid.dt(i));
            }
        }
        if (rows.empty()) continue;

        const auto yfit = regress_at(target, rows, i, lattice, config.basis);
        for (std::size_t r = 0; r < rows.size(); ++r) outY.at(rows[r], i) = yfit.fitted[r];
        writer.write_y(i, yfit.coefficients);

        const double dt = grid.dt(i);
        for (std::size_t c = 0; c < d; ++c) {
            ztarget.clear();
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const std::size_t p = rows[r];
                ztarget.push_back((outY.at(p, i + 1) - yfit.fitted[r]) *
                                  lattice.increment(p, i, c) / dt);
            }
            const auto zfit = regress_at(ztarget, rows, i, lattice, config.basis);
            for (std::size_t r = 0; r < rows.size(); ++r) outZ.at(rows[r], i, c) = zfit.fitted[r];
            writer.write_z(i, c, zfit.coefficients);
        }
    }
}

namespace {

// Shared Picard loop over one subinterval, operating in place on the global
// state arrays. Returns diagnostics; throws on non-convergence.
SubintervalDiagnostics picard_loop(const Problem& problem, const BrownianLattice& lattice,
                                   const SolverConfig& config, std::size_t sub_index,
                                   std::size_t lo, std::size_t hi,
                                   const std::vector<std::size_t>& win_lo,
                                   const std::vector<std::size_t>& win_hi, AdaptedProcess& stateY,
                                   AdaptedProcess& stateZ, const SolutionPair* warm,
                                   CoefficientTable* coeffs) {
    const TimeGrid& grid = lattice.grid();
    const std::size_t paths = lattice.paths();
    const std::size_t d = lattice.dimension();

    SubintervalDiagnostics diag;
    diag.subinterval = sub_index;
    diag.lo = lo;
    diag.hi = hi;

    // Iterate arrays; windows carry the initial guess, everything else the
    // boundary data already in the state.
    AdaptedProcess curY = stateY;
    AdaptedProcess curZ = stateZ;
    for (std::size_t p = 0; p < paths; ++p) {
        for (std::size_t i = win_lo[p]; i < win_hi[p]; ++i) {
            switch (config.initial_guess) {
                case InitialGuess::TerminalFlat:
                    curY.at(p, i) = stateY.at(p, win_hi[p]);
                    for (std::size_t c = 0; c < d; ++c) curZ.at(p, i, c) = 0.0;
                    break;
                case InitialGuess::Zero:
                    curY.at(p, i) = 0.0;
                    for (std::size_t c = 0; c < d; ++c) curZ.at(p, i, c) = 0.0;
                    break;
                case InitialGuess::Warm:
                    curY.at(p, i) = warm->Y.at(p, i);
                    for (std::size_t c = 0; c < d; ++c) curZ.at(p, i, c) = warm->Z.at(p, i, c);
                    break;
            }
        }
    }

    const double p_exp = problem.p;
    AdaptedProcess nextY = stateY;
    AdaptedProcess nextZ = stateZ;
    AdaptedProcess deltaY(paths, grid.points());
    AdaptedProcess deltaZ(paths, grid.points(), d);

    for (std::size_t iter = 1; iter <= config.max_picard_iterations; ++iter) {
        nextY = stateY;
        nextZ = stateZ;
        picard_step(problem, lattice, config, lo, hi, win_lo, win_hi, curY, curZ, nextY, nextZ,
                    coeffs);

        for (std::size_t k = 0; k < deltaY.data.size(); ++k) {
            deltaY.data[k] = nextY.data[k] - curY.data[k];
        }
        for (std::size_t k = 0; k < deltaZ.data.size(); ++k) {
            deltaZ.data[k] = nextZ.data[k] - curZ.data[k];
        }
        const double dist = sp_norm_windowed(deltaY, p_exp, win_lo, win_hi) +
                            mp_norm_windowed(deltaZ, grid, p_exp, win_lo, win_hi);
        if (!diag.distances.empty() && diag.distances.back() > 0.0) {
            diag.ratios.push_back(dist / diag.distances.back());
        }
        diag.distances.push_back(dist);
        diag.iterations = iter;

        curY.data.swap(nextY.data);
        curZ.data.swap(nextZ.data);

        if (dist <= config.picard_tolerance) {
            diag.converged = true;
            break;
        }
        const auto& ds = diag.distances;
        constexpr std::size_t window = 6;
        if (ds.size() > window) {
            double window_min = ds.back(), window_max = ds.back();
            for (std::size_t k = ds.size() - window; k < ds.size(); ++k) {
                window_min = std::min(window_min, ds[k]);
                window_max = std::max(window_max, ds[k]);
            }
            double best_before = ds.front();
            for (std::size_t k = 0; k + window < ds.size(); ++k) {
                best_before = std::min(best_before, ds[k]);
            }
            if (window_max <= config.stagnation_floor * ds.front() &&
                window_min >= 0.8 * best_before) {
                diag.converged = true;
                diag.stagnated = true;
                break;
            }
        }
    }

    // Ratios for k >= 2, i.e. skipping d_2/d_1.
    for (std::size_t k = 1; k < diag.ratios.size(); ++k) {
        if (diag.ratios[k] > 1.0) diag.ratio_exceeded_one = true;
    }

    if (!diag.converged) {
        std::ostringstream msg;
        msg << "picard iteration did not converge on subinterval " << sub_index << " ([" << lo
            << "," << hi << "]) after " << diag.iterations << " iterations; distance trace:";
        for (double v : diag.distances) msg << " " << v;
        msg << "; consider a larger subinterval count";
        throw SolverError(msg.str(), {diag});
    }

    stateY.data.swap(curY.data);
    stateZ.data.swap(curZ.data);
    return diag;
}

} // namespace

SubintervalResult solve_subinterval(const Problem& problem, const BrownianLattice& lattice,
                                    const SolverConfig& config, std::size_t from, std::size_t to,
                                    const std::vector<double>& terminal_values) {
    check_problem(problem, lattice);
    if (terminal_values.size() != lattice.paths()) {
        throw std::invalid_argument("solve_subinterval: one terminal value per path required");
    }
    const std::size_t paths = lattice.paths();
    const std::size_t d = lattice.dimension();

    SubintervalResult result;
    result.Y = AdaptedProcess(paths, lattice.grid().points());
    result.Z = AdaptedProcess(paths, lattice.grid().points(), d);
    for (std::size_t p = 0; p < paths; ++p) result.Y.at(p, to) = terminal_values[p];

    std::vector<std::size_t> win_lo(paths, from), win_hi(paths, to);
    result.diagnostics = picard_loop(problem, lattice, config, 1, from, to, win_lo, win_hi,
                                     result.Y, result.Z, nullptr, nullptr);
    return result;
}

SolutionPair solve(const Problem& problem, const BrownianLattice& lattice,
                   const SolverConfig& config, const SolutionPair* warm_start) {
    check_problem(problem, lattice);
    if (config.initial_guess == InitialGuess::Warm) {
        if (!warm_start || !warm_start->Y.same_shape(AdaptedProcess(
                               lattice.paths(), lattice.grid().points()))) {
            throw std::invalid_argument("solve: warm start requires a same-shape prior solution");
        }
    }

    const TimeGrid& grid = lattice.grid();
    const std::size_t paths = lattice.paths();
    const std::size_t d = lattice.dimension();
    const std::size_t last = grid.points() - 1;
    const GeneratorSpec& g = problem.generator;

    SolutionPair solution;
    const double c_p = config.c_p > 0.0 ? config.c_p : default_c_p(problem.p);
    solution.required_subintervals_hint =
        required_subintervals(problem.p, g.budget_bound, c_p);
    solution.used_subintervals =
        config.subintervals > 0 ? config.subintervals : solution.required_subintervals_hint;
    solution.partition_below_required =
        solution.used_subintervals < solution.required_subintervals_hint;

    if (!g.u || !g.v) throw std::invalid_argument("solve: generator coefficient processes required");
    const auto budget = compute_budget(*g.u, *g.v, grid, g.budget_bound);
    solution.partition = build_partition(budget, solution.used_subintervals);

    solution.Y = AdaptedProcess(paths, grid.points());
    solution.Z = AdaptedProcess(paths, grid.points(), d);
    for (std::size_t p = 0; p < paths; ++p) solution.Y.at(p, last) = problem.xi[p];

    CoefficientTable* coeffs = nullptr;
    if (config.record_coefficients && solution.partition.uniform_across_paths()) {
        solution.coefficients.portable = true;
        coeffs = &solution.coefficients;
    }

    const std::size_t N = solution.used_subintervals;
    std::vector<std::size_t> win_lo(paths), win_hi(paths);
    for (std::size_t k = N; k >= 1; --k) {
        std::size_t lo = last, hi = 0;
        for (std::size_t p = 0; p < paths; ++p) {
            win_lo[p] = solution.partition.index(p, k - 1);
            win_hi[p] = solution.partition.index(p, k);
            lo = std::min(lo, win_lo[p]);
            hi = std::max(hi, win_hi[p]);
        }
        if (lo == hi) continue; // empty slice on every path

        auto diag = picard_loop(problem, lattice, config, k, lo, hi, win_lo, win_hi, solution.Y,
                                solution.Z, warm_start, coeffs);
        if (diag.ratio_exceeded_one) solution.ratios_exceeded_one = true;
        solution.diagnostics.push_back(std::move(diag));
    }

    // Z has no step after the final grid point; repeat the last fitted value
    // so summary tables stay rectangular.
    if (last >= 1) {
        for (std::size_t p = 0; p < paths; ++p) {
            for (std::size_t c = 0; c < d; ++c) solution.Z.at(p, last, c) = solution.Z.at(p, last - 1, c);
        }
    }

    const auto residual = discrete_residual(problem, lattice, solution);
    double acc = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        for (std::size_t i = 0; i < last; ++i) acc += std::abs(residual.at(p, i));
    }
    solution.residual_mean = acc / static_cast<double>(paths * last);
    return solution;
}

AdaptedProcess driver_values(const Problem& problem, const BrownianLattice& lattice,
                             const SolutionPair& solution) {
    const std::size_t paths = lattice.paths();
    const std::size_t points = lattice.grid().points();
    AdaptedProcess out(paths, points);
    for (std::size_t p = 0; p < paths; ++p) {
        for (std::size_t i = 0; i + 1 < points; ++i) {
            out.at(p, i) = problem.generator(p, i, solution.Y.at(p, i), solution.Z.vec(p, i));
        }
    }
    return out;
}

AdaptedProcess discrete_residual(const Problem& problem, const BrownianLattice& lattice,
                                 const SolutionPair& solution) {
    const std::size_t paths = lattice.paths();
    const std::size_t points = lattice.grid().points();
    const std::size_t d = lattice.dimension();
    AdaptedProcess out(paths, points);
    for (std::size_t p = 0; p < paths; ++p) {
        for (std::size_t i = 0; i + 1 < points; ++i) {
            const double gval =
                problem.generator(p, i, solution.Y.at(p, i), solution.Z.vec(p, i));
            double zdb = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                zdb += solution.Z.at(p, i, c) * lattice.increment(p, i, c);
            }
            out.at(p, i) = solution.Y.at(p, i) - solution.Y.at(p, i + 1) -
                           gval * lattice.grid().dt(i) + zdb;
        }
    }
    return out;
}

AdaptedProcess evaluate_fitted_y(const SolutionPair& solution, const BrownianLattice& target,
                                 const std::vector<double>& xi_on_target,
                                 const RegressionBasis& basis) {
    if (!solution.coefficients.portable) {
        throw std::invalid_argument("evaluate_fitted_y: solution has no portable coefficients");
    }
    const std::size_t points = target.grid().points();
    const std::size_t K = solution.coefficients.basis_size;
    if (solution.coefficients.valid.size() != points) {
        throw std::invalid_argument("evaluate_fitted_y: grid shape mismatch");
    }
    if (xi_on_target.size() != target.paths()) {
        throw std::invalid_argument("evaluate_fitted_y: one terminal value per path required");
    }
    AdaptedProcess out(target.paths(), points);
    for (std::size_t i = 0; i + 1 < points; ++i) {
        if (!solution.coefficients.valid[i]) {
            throw std::invalid_argument("evaluate_fitted_y: missing coefficients at index " +
                                        std::to_string(i));
        }
        std::span<const double> beta(solution.coefficients.y_coeffs.data() + i * K, K);
        const auto vals = evaluate_coefficients(beta, i, target, basis);
        for (std::size_t p = 0; p < target.paths(); ++p) out.at(p, i) = vals[p];
    }
    for (std::size_t p = 0; p < target.paths(); ++p) out.at(p, points - 1) = xi_on_target[p];
    return out;
}

double measure_noise_floor(const Problem& problem, const BrownianLattice& lattice,
                           const SolverConfig& config, std::uint64_t shifted_seed) {
    SolverConfig cfg = config;
    cfg.record_coefficients = true;
    const auto base = solve(problem, lattice, cfg);
    if (!base.coefficients.portable) {
        throw std::invalid_argument(
            "measure_noise_floor: path-dependent partition; fitted solutions are not portable");
    }

    BrownianLattice shifted(lattice.grid(), lattice.dimension(), lattice.paths(), shifted_seed,
                            cfg.workers);
    Problem shifted_problem = problem;
    shifted_problem.xi = problem.xi_builder ? problem.xi_builder(shifted)
                                            : make_xi(problem.xi_label, shifted);
    const auto other = solve(shifted_problem, shifted, cfg);

    const auto transferred = evaluate_fitted_y(other, lattice, problem.xi, cfg.basis);
    return sp_distance(base.Y, transferred, problem.p);
}

} // namespace bsde
