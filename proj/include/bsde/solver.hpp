#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsde/generator.hpp"
#include "bsde/norms.hpp"
#include "bsde/partition.hpp"
#include "bsde/regression.hpp"

namespace bsde {

enum class InitialGuess {
    TerminalFlat, // Y = subinterval terminal value held flat, Z = 0 (default)
    Zero,         // Y = 0, Z = 0
    Warm,         // start from a provided solution
};

struct SolverConfig {
    RegressionBasis basis{3, true};
    double picard_tolerance = 1e-8;   // on the empirical S^p + M^p distance
    std::size_t max_picard_iterations = 60;
    std::size_t subintervals = 0;     // 0 = auto via required_subintervals
    double c_p = 0.0;                 // 0 = default 4^{p-1}
    unsigned workers = 1;
    InitialGuess initial_guess = InitialGuess::TerminalFlat;
    bool record_coefficients = true;
    // Numerically evaluated drivers (grid-search regularizations) carry a
    // small evaluation jitter that caps how far the iteration can contract:
    // distances stop shrinking and bounce inside the fixed point's jitter
    // ball. Once the best distance has stopped improving over a trailing
    // window and the whole window sits below this fraction of the first
    // distance, the iterate is accepted as converged and flagged as
    // stagnated in the diagnostics.
    double stagnation_floor = 1e-2;
};

struct SubintervalDiagnostics {
    std::size_t subinterval = 0; // 1-based, processed backward from N to 1
    std::size_t lo = 0;          // global range solved
    std::size_t hi = 0;
    std::size_t iterations = 0;
    std::vector<double> distances; // d_1, d_2, ... successive Picard distances
    std::vector<double> ratios;    // d_{k+1} / d_k
    bool converged = false;
    bool stagnated = false;          // stopped at the evaluation-jitter plateau
    bool ratio_exceeded_one = false; // some d_{k+1}/d_k > 1 for k >= 2
};

// Per-time-index fitted coefficient tables. Only meaningful when the
// stopping-time partition is identical across paths, in which case the fitted
// solution is a single function of the Brownian state per time index and can
// be evaluated on an independent lattice (noise-floor measurements).
struct CoefficientTable {
    std::size_t basis_size = 0;
    std::size_t z_dim = 0;
    std::vector<double> y_coeffs;    // points x basis_size
    std::vector<double> z_coeffs;    // points x z_dim x basis_size
    std::vector<char> valid;         // per time index
    bool portable = false;
};

struct SolutionPair {
    AdaptedProcess Y; // scalar
    AdaptedProcess Z; // d components; the final index repeats the last fitted value
    std::vector<SubintervalDiagnostics> diagnostics;
    PartitionSpec partition;
    std::size_t used_subintervals = 0;
    std::size_t required_subintervals_hint = 0;
    bool partition_below_required = false; // fewer subintervals than the contraction bound asks
    bool ratios_exceeded_one = false;
    double residual_mean = 0.0; // mean |Y_i - Y_{i+1} - g dt + Z dB| over (path, step)
    CoefficientTable coefficients;

    bool contraction_flagged() const { return partition_below_required || ratios_exceeded_one; }
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& message, std::vector<SubintervalDiagnostics> diag)
        : std::runtime_error(message), diagnostics(std::move(diag)) {}
    std::vector<SubintervalDiagnostics> diagnostics;
};

// One application of the fixed-point mapping on the global index range
// [lo, hi] with per-path active windows [win_lo[p], win_hi[p]): evaluates the
// driver on the previous iterate (zero where frozen), then sweeps backward
//   Y_{t_i} = E^[ Y_{t_{i+1}} + g_{t_i} dt_i | state at t_i ]
//   Z_{t_i} = E^[ (Y_{t_{i+1}} - Y-fit_{t_i}) dB_i | state at t_i ] / dt_i
// where E^ is the per-time least-squares projection over the paths active at
// that index. Subtracting the F_{t_i}-measurable Y-fit leaves the identity
// intact and strips the predictable part of the increment's variance.
// On entry outY/outZ must hold the boundary data at and beyond each path's
// window end; entries below win_lo[p] are left untouched.
void picard_step(const Problem& problem, const BrownianLattice& lattice,
                 const SolverConfig& config, std::size_t lo, std::size_t hi,
                 const std::vector<std::size_t>& win_lo, const std::vector<std::size_t>& win_hi,
                 const AdaptedProcess& prevY, const AdaptedProcess& prevZ, AdaptedProcess& outY,
                 AdaptedProcess& outZ, CoefficientTable* coeffs = nullptr);

struct SubintervalResult {
    AdaptedProcess Y;
    AdaptedProcess Z;
    SubintervalDiagnostics diagnostics;
};

// Iterates picard_step on the uniform window [from, to] with the given
// terminal values until the empirical S^p + M^p distance between successive
// iterates drops below tolerance. Throws SolverError with the distance trace
// when max iterations are exhausted.
SubintervalResult solve_subinterval(const Problem& problem, const BrownianLattice& lattice,
                                    const SolverConfig& config, std::size_t from, std::size_t to,
                                    const std::vector<double>& terminal_values);

// Full solve: builds the stopping-time partition (auto subinterval count
// unless configured), then chains subinterval solves backward, each one
// reusing the already-finalized values at and beyond its per-path window end
// as terminal data. Warm start requires a same-shape prior solution.
SolutionPair solve(const Problem& problem, const BrownianLattice& lattice,
                   const SolverConfig& config, const SolutionPair* warm_start = nullptr);

// Driver values g(t, Y_t, Z_t) realized along a solution.
AdaptedProcess driver_values(const Problem& problem, const BrownianLattice& lattice,
                             const SolutionPair& solution);

// Pathwise discrete dynamics residual Y_i - Y_{i+1} - g_i dt + Z_i . dB_i.
AdaptedProcess discrete_residual(const Problem& problem, const BrownianLattice& lattice,
                                 const SolutionPair& solution);

// Evaluates a recorded fitted solution on another lattice of the same shape;
// xi_on_target supplies the terminal values there. Requires portable
// coefficient tables.
AdaptedProcess evaluate_fitted_y(const SolutionPair& solution, const BrownianLattice& target,
                                 const std::vector<double>& xi_on_target,
                                 const RegressionBasis& basis);

// Empirical S^p distance between two independently fitted solutions of the
// same problem, evaluated on the first solve's lattice: the statistical
// noise floor used to calibrate comparison tolerances.
double measure_noise_floor(const Problem& problem, const BrownianLattice& lattice,
                           const SolverConfig& config, std::uint64_t shifted_seed);

double default_c_p(double p);

} // namespace bsde
