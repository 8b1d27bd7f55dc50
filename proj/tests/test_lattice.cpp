#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bsde/brownian_lattice.hpp"
#include "bsde/rng.hpp"

using namespace bsde;

TEST_CASE("single-step increment variance is the step length") {
    // T = 1, one step: the only increment is B_1, variance 1.
    TimeGrid grid(1.0, 1);
    auto lattice = generate_lattice(grid, 1, 100000, 7);
    double mean = 0.0;
    for (std::size_t p = 0; p < lattice.paths(); ++p) mean += lattice.increment(p, 0);
    mean /= static_cast<double>(lattice.paths());
    double var = 0.0;
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        const double d = lattice.increment(p, 0) - mean;
        var += d * d;
    }
    var /= static_cast<double>(lattice.paths() - 1);
    // Var of the sample variance of n normals ~ 2/n; 5 standard errors.
    const double se = std::sqrt(2.0 / static_cast<double>(lattice.paths()));
    CHECK(std::abs(var - 1.0) <= 5.0 * se + 0.01);
}

TEST_CASE("same seed reproduces bit-identical increments") {
    TimeGrid grid(2.0, 37);
    auto a = generate_lattice(grid, 2, 64, 12345);
    auto b = generate_lattice(grid, 2, 64, 12345);
    CHECK(a.increments().data == b.increments().data);
    CHECK(a.values().data == b.values().data);
    auto c = generate_lattice(grid, 2, 64, 12346);
    CHECK(a.increments().data != c.increments().data);
}

TEST_CASE("worker count does not change the draws") {
    TimeGrid grid(1.0, 16);
    auto a = BrownianLattice(grid, 2, 501, 99, 1);
    auto b = BrownianLattice(grid, 2, 501, 99, 4);
    CHECK(a.values().data == b.values().data);
}

TEST_CASE("increment means are within 5 standard errors of zero") {
    TimeGrid grid(1.0, 64);
    auto lattice = generate_lattice(grid, 2, 10000, 21);
    const double dt = 1.0 / 64.0;
    for (std::size_t c = 0; c < 2; ++c) {
        double mean = 0.0;
        std::size_t n = 0;
        for (std::size_t p = 0; p < lattice.paths(); ++p) {
            for (std::size_t i = 0; i < grid.steps(); ++i) {
                mean += lattice.increment(p, i, c);
                ++n;
            }
        }
        mean /= static_cast<double>(n);
        const double se = std::sqrt(dt / static_cast<double>(n));
        CHECK(std::abs(mean) <= 5.0 * se);
    }
}

TEST_CASE("cumulative value starts at zero and telescopes") {
    TimeGrid grid(1.0, 8);
    auto lattice = generate_lattice(grid, 1, 32, 5);
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        CHECK(lattice.value(p, 0) == 0.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < 8; ++i) acc += lattice.increment(p, i);
        CHECK(lattice.value(p, 8) == doctest::Approx(acc).epsilon(1e-14));
    }
}

TEST_CASE("constructor rejects degenerate shapes") {
    CHECK_THROWS_AS(TimeGrid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
    TimeGrid grid(1.0, 4);
    CHECK_THROWS_AS(generate_lattice(grid, 0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_lattice(grid, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("csv dump is stable and parseable") {
    TimeGrid grid(1.0, 2);
    auto lattice = generate_lattice(grid, 1, 3, 11);
    const auto path = std::filesystem::temp_directory_path() / "bsde_lattice_dump.csv";
    lattice.dump_csv(path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header.find("seed=11") != std::string::npos);
    std::getline(in, header);
    CHECK(header == "path,t_index,t,B1");
    std::filesystem::remove(path);
}
