#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bsde/adapted_process.hpp"
#include "bsde/time_grid.hpp"

namespace bsde {

// A bundle of simulated Brownian paths on a shared grid: the probabilistic
// substrate for everything else. Both the per-step increments and the
// cumulative values B_{t_i} are stored (values at index 0 are exactly 0).
//
// Increments for path p come from an independent SplitMix64 substream derived
// from (seed, p), so generation parallelizes over paths without affecting
// reproducibility.
class BrownianLattice {
public:
    BrownianLattice(TimeGrid grid, std::size_t dimension, std::size_t paths, std::uint64_t seed,
                    unsigned workers = 1);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dimension() const { return dimension_; }
    std::size_t paths() const { return paths_; }
    std::uint64_t seed() const { return seed_; }

    // Increment of component c over step i on path p (step i spans [t_i, t_{i+1})).
    double increment(std::size_t p, std::size_t i, std::size_t c = 0) const {
        return increments_.at(p, i, c);
    }
    std::span<const double> increment_vec(std::size_t p, std::size_t i) const {
        return increments_.vec(p, i);
    }

    // B at grid point i on path p.
    double value(std::size_t p, std::size_t i, std::size_t c = 0) const {
        return values_.at(p, i, c);
    }
    std::span<const double> state(std::size_t p, std::size_t i) const {
        return values_.vec(p, i);
    }

    const AdaptedProcess& values() const { return values_; }
    const AdaptedProcess& increments() const { return increments_; }

    // Debug dumps; path-major layout with a one-line header (see README).
    void dump_csv(const std::string& path) const;
    void dump_binary(const std::string& path) const;

private:
    TimeGrid grid_;
    std::size_t dimension_;
    std::size_t paths_;
    std::uint64_t seed_;
    AdaptedProcess increments_; // paths x steps x d (points index is the step index)
    AdaptedProcess values_;     // paths x (steps+1) x d
};

BrownianLattice generate_lattice(const TimeGrid& grid, std::size_t dimension, std::size_t paths,
                                 std::uint64_t seed, unsigned workers = 1);

// Sum of z_{t_i} . dB_i over steps in [from, to), one value per path. z must
// have the lattice's component count (uses the value at the step's left
// endpoint, which keeps the discrete sum a martingale).
std::vector<double> pathwise_ito_integral(const AdaptedProcess& z, const BrownianLattice& lattice,
                                          std::size_t from, std::size_t to);

} // namespace bsde
