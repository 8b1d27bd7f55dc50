#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "bsde/time_grid.hpp"

namespace bsde {

// Per-path, per-grid-time values of an adapted process. Layout is
// path-major: value(p, i, c) = data[(p * points + i) * components + c].
//
// Adaptedness is a usage contract, not a machine-checked property: the value
// stored at time index i may depend only on Brownian increments with step
// index < i (plus time-0 data). Everything built here follows left-endpoint
// conventions so that contract holds by construction.
struct AdaptedProcess {
    std::size_t paths = 0;
    std::size_t points = 0;
    std::size_t components = 1;
    std::vector<double> data;

    AdaptedProcess() = default;

    AdaptedProcess(std::size_t paths_, std::size_t points_, std::size_t components_ = 1,
                   double fill = 0.0)
        : paths(paths_), points(points_), components(components_),
          data(paths_ * points_ * components_, fill) {
        if (paths == 0 || points == 0 || components == 0) {
            throw std::invalid_argument("AdaptedProcess: zero dimension");
        }
    }

    double& at(std::size_t p, std::size_t i, std::size_t c = 0) {
        return data[(p * points + i) * components + c];
    }
    double at(std::size_t p, std::size_t i, std::size_t c = 0) const {
        return data[(p * points + i) * components + c];
    }
    std::span<const double> vec(std::size_t p, std::size_t i) const {
        return {data.data() + (p * points + i) * components, components};
    }
    std::span<double> vec(std::size_t p, std::size_t i) {
        return {data.data() + (p * points + i) * components, components};
    }

    bool scalar() const { return components == 1; }

    bool same_shape(const AdaptedProcess& o) const {
        return paths == o.paths && points == o.points && components == o.components;
    }

    static AdaptedProcess constant(std::size_t paths, std::size_t points, double value,
                                   std::size_t components = 1) {
        AdaptedProcess p(paths, points, components, value);
        return p;
    }
};

// Left-endpoint Riemann sum of a scalar process over [times[from], times[to]],
// one value per path.
std::vector<double> pathwise_lebesgue_integral(const AdaptedProcess& p, const TimeGrid& grid,
                                               std::size_t from, std::size_t to);

} // namespace bsde
