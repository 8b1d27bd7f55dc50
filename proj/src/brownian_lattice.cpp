#include "bsde/brownian_lattice.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "bsde/parallel.hpp"
#include "bsde/rng.hpp"

namespace bsde {

BrownianLattice::BrownianLattice(TimeGrid grid, std::size_t dimension, std::size_t paths,
                                 std::uint64_t seed, unsigned workers)
    : grid_(std::move(grid)),
      dimension_(dimension),
      paths_(paths),
      seed_(seed),
      increments_(paths, grid_.steps(), dimension),
      values_(paths, grid_.points(), dimension) {
    if (dimension_ == 0) throw std::invalid_argument("BrownianLattice: dimension must be >= 1");
    if (paths_ == 0) throw std::invalid_argument("BrownianLattice: paths must be >= 1");

    const std::size_t steps = grid_.steps();
    std::vector<double> sqrt_dt(steps);
    for (std::size_t i = 0; i < steps; ++i) sqrt_dt[i] = std::sqrt(grid_.dt(i));

    parallel_for(paths_, workers, [&](std::size_t p) {
        SplitMix64 rng(derive_seed(seed_, p));
        for (std::size_t c = 0; c < dimension_; ++c) values_.at(p, 0, c) = 0.0;
        for (std::size_t i = 0; i < steps; ++i) {
            for (std::size_t c = 0; c < dimension_; ++c) {
                const double dB = sqrt_dt[i] * rng.next_normal();
                increments_.at(p, i, c) = dB;
                values_.at(p, i + 1, c) = values_.at(p, i, c) + dB;
            }
        }
    });
}

BrownianLattice generate_lattice(const TimeGrid& grid, std::size_t dimension, std::size_t paths,
                                 std::uint64_t seed, unsigned workers) {
    return BrownianLattice(grid, dimension, paths, seed, workers);
}

void BrownianLattice::dump_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_csv: cannot open " + path);
    out << "# brownian lattice v1 seed=" << seed_ << " paths=" << paths_
        << " steps=" << grid_.steps() << " d=" << dimension_ << "\n";
    out << "path,t_index,t";
    for (std::size_t c = 0; c < dimension_; ++c) out << ",B" << (c + 1);
    out << "\n";
    char buf[64];
    for (std::size_t p = 0; p < paths_; ++p) {
        for (std::size_t i = 0; i < grid_.points(); ++i) {
            out << p << ',' << i;
            std::snprintf(buf, sizeof buf, ",%.17g", grid_.time(i));
            out << buf;
            for (std::size_t c = 0; c < dimension_; ++c) {
                std::snprintf(buf, sizeof buf, ",%.17g", value(p, i, c));
                out << buf;
            }
            out << "\n";
        }
    }
}

void BrownianLattice::dump_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("dump_binary: cannot open " + path);
    const char magic[8] = {'B', 'L', 'A', 'T', '1', 0, 0, 0};
    out.write(magic, 8);
    const std::uint64_t dims[4] = {paths_, grid_.steps(), dimension_, seed_};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(grid_.times().data()),
              static_cast<std::streamsize>(grid_.points() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(values_.data.data()),
              static_cast<std::streamsize>(values_.data.size() * sizeof(double)));
}

std::vector<double> pathwise_lebesgue_integral(const AdaptedProcess& p, const TimeGrid& grid,
                                               std::size_t from, std::size_t to) {
    if (!p.scalar()) throw std::invalid_argument("pathwise_lebesgue_integral: scalar process required");
    // `from` and `to` are grid point indices; the sum covers steps [from, to).
    if (from > to || to > grid.steps()) {
        throw std::out_of_range("pathwise_lebesgue_integral: bad index range");
    }
    if (p.points != grid.points()) {
        throw std::invalid_argument("pathwise_lebesgue_integral: process/grid point mismatch");
    }
    std::vector<double> out(p.paths, 0.0);
    for (std::size_t path = 0; path < p.paths; ++path) {
        double acc = 0.0;
        for (std::size_t i = from; i < to; ++i) acc += p.at(path, i) * grid.dt(i);
        out[path] = acc;
    }
    return out;
}

std::vector<double> pathwise_ito_integral(const AdaptedProcess& z, const BrownianLattice& lattice,
                                          std::size_t from, std::size_t to) {
    if (z.components != lattice.dimension()) {
        throw std::invalid_argument("pathwise_ito_integral: component count != lattice dimension");
    }
    if (from > to || to > lattice.grid().steps()) {
        throw std::out_of_range("pathwise_ito_integral: bad index range");
    }
    if (z.paths != lattice.paths() || z.points != lattice.grid().points()) {
        throw std::invalid_argument("pathwise_ito_integral: process/lattice shape mismatch");
    }
    std::vector<double> out(z.paths, 0.0);
    for (std::size_t path = 0; path < z.paths; ++path) {
        double acc = 0.0;
        for (std::size_t i = from; i < to; ++i) {
            for (std::size_t c = 0; c < z.components; ++c) {
                acc += z.at(path, i, c) * lattice.increment(path, i, c);
            }
        }
        out[path] = acc;
    }
    return out;
}

} // namespace bsde
