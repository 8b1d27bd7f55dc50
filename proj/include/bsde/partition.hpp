#pragma once

#include <cstddef>
#include <vector>

#include "bsde/adapted_process.hpp"
#include "bsde/time_grid.hpp"

namespace bsde {

// Running pathwise integral of u_t + v_t^2, the quantity the coefficient
// bound constrains. running(p, i) is the integral over [0, t_i]; it is
// nondecreasing in i on every path because u and v are nonnegative.
struct CumulativeBudget {
    AdaptedProcess running; // paths x points, scalar
    double bound = 0.0;     // declared M

    // Largest single-step contribution over all (path, step); the grid-slack
    // term of every budget statement at grid resolution.
    double max_step_increment = 0.0;
};

CumulativeBudget compute_budget(const AdaptedProcess& u, const AdaptedProcess& v,
                                const TimeGrid& grid, double bound);

// Per-path first-passage indices realizing the stopping times
// T_i = inf{ t >= T_{i-1} : integral_0^t (u + v^2) ds >= i M / N } ^ T,
// snapped to the first grid index at or after the crossing.
struct PartitionSpec {
    std::size_t subintervals = 0;            // N
    std::size_t points = 0;                  // grid points, for bounds checks
    std::vector<std::size_t> indices;        // paths x (N+1), path-major

    std::size_t index(std::size_t path, std::size_t i) const {
        return indices[path * (subintervals + 1) + i];
    }
    std::size_t paths() const { return indices.size() / (subintervals + 1); }

    // True when every path has the same stopping indices (deterministic
    // coefficients); fitted-solution transfer between lattices needs this.
    bool uniform_across_paths() const;
};

PartitionSpec build_partition(const CumulativeBudget& budget, std::size_t subintervals);

// Smallest N with M/N <= min((4 c_p)^{-1/p}, (4 c_p)^{-2/p}); the subdivision
// count that makes the fixed-point mapping a strict contraction per slice.
std::size_t required_subintervals(double p, double M, double c_p);

} // namespace bsde
