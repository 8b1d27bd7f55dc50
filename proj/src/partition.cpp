#include "bsde/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsde {

CumulativeBudget compute_budget(const AdaptedProcess& u, const AdaptedProcess& v,
                                const TimeGrid& grid, double bound) {
    if (!u.scalar() || !v.scalar()) throw std::invalid_argument("compute_budget: scalar u, v required");
    if (!u.same_shape(v)) throw std::invalid_argument("compute_budget: u and v shapes differ");
    if (u.points != grid.points()) throw std::invalid_argument("compute_budget: process/grid mismatch");
    if (!(bound > 0.0)) throw std::invalid_argument("compute_budget: bound must be positive");

    CumulativeBudget b;
    b.bound = bound;
    b.running = AdaptedProcess(u.paths, u.points);
    double max_step = 0.0;
    for (std::size_t p = 0; p < u.paths; ++p) {
        double acc = 0.0;
        b.running.at(p, 0) = 0.0;
        for (std::size_t i = 0; i + 1 < u.points; ++i) {
            const double rate = u.at(p, i) + v.at(p, i) * v.at(p, i);
            if (rate < 0.0) throw std::invalid_argument("compute_budget: negative coefficient");
            const double inc = rate * grid.dt(i);
            max_step = std::max(max_step, inc);
            acc += inc;
            b.running.at(p, i + 1) = acc;
        }
    }
    b.max_step_increment = max_step;
    return b;
}

bool PartitionSpec::uniform_across_paths() const {
    const std::size_t n = subintervals + 1;
    for (std::size_t p = 1; p < paths(); ++p) {
        for (std::size_t i = 0; i < n; ++i) {
            if (indices[p * n + i] != indices[i]) return false;
        }
    }
    return true;
}

PartitionSpec build_partition(const CumulativeBudget& budget, std::size_t subintervals) {
    if (subintervals < 1) throw std::invalid_argument("build_partition: N must be >= 1");
    const std::size_t paths = budget.running.paths;
    const std::size_t points = budget.running.points;
    const std::size_t last = points - 1;
    const double M = budget.bound;

    PartitionSpec spec;
    spec.subintervals = subintervals;
    spec.points = points;
    spec.indices.assign(paths * (subintervals + 1), 0);

    for (std::size_t p = 0; p < paths; ++p) {
        std::size_t* idx = spec.indices.data() + p * (subintervals + 1);
        idx[0] = 0;
        std::size_t j = 0;
        for (std::size_t i = 1; i <= subintervals; ++i) {
            const double threshold = M * static_cast<double>(i) / static_cast<double>(subintervals);
            // Tolerance absorbs roundoff so exact crossings land on their grid point.
            const double eps = 1e-12 * (1.0 + std::abs(threshold));
            j = std::max(j, idx[i - 1]);
            while (j < last && budget.running.at(p, j) < threshold - eps) ++j;
            idx[i] = j;
        }
        idx[subintervals] = last; // T_N = T by definition
    }
    return spec;
}

std::size_t required_subintervals(double p, double M, double c_p) {
    if (!(p > 1.0)) throw std::invalid_argument("required_subintervals: p must be > 1");
    if (!(M > 0.0)) throw std::invalid_argument("required_subintervals: M must be > 0");
    if (!(c_p > 0.0)) throw std::invalid_argument("required_subintervals: c_p must be > 0");
    const double threshold =
        std::min(std::pow(4.0 * c_p, -1.0 / p), std::pow(4.0 * c_p, -2.0 / p));
    const double ratio = M / threshold;
    // Snap near-integer ratios down before ceiling so exact thresholds give the
    // intended N (pow is not exact).
    const double n = std::ceil(ratio - 1e-9 * (1.0 + ratio));
    return static_cast<std::size_t>(std::max(1.0, n));
}

} // namespace bsde
