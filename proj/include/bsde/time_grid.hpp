#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bsde {

// Discrete time axis 0 = t_0 < t_1 < ... < t_n = T shared by every process
// in one experiment.
class TimeGrid {
public:
    // Uniform grid with `steps` intervals on [0, horizon].
    TimeGrid(double horizon, std::size_t steps) {
        if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be >= 1");
        times_.resize(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i) {
            times_[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
        }
        times_.back() = horizon;
    }

    // Explicit (possibly non-uniform) grid; must start at 0 and increase strictly.
    explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
        if (times_.size() < 2) throw std::invalid_argument("TimeGrid: need at least two points");
        if (times_.front() != 0.0) throw std::invalid_argument("TimeGrid: must start at 0");
        for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
            if (!(times_[i] < times_[i + 1])) {
                throw std::invalid_argument("TimeGrid: times must be strictly increasing");
            }
        }
    }

    double horizon() const { return times_.back(); }
    std::size_t steps() const { return times_.size() - 1; }
    std::size_t points() const { return times_.size(); }
    double time(std::size_t i) const { return times_[i]; }
    double dt(std::size_t i) const { return times_[i + 1] - times_[i]; }
    double max_dt() const {
        double m = 0.0;
        for (std::size_t i = 0; i < steps(); ++i) m = std::max(m, dt(i));
        return m;
    }
    const std::vector<double>& times() const { return times_; }

    bool same_shape(const TimeGrid& other) const { return times_ == other.times_; }

private:
    std::vector<double> times_;
};

} // namespace bsde
