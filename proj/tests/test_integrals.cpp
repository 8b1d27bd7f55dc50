#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsde/brownian_lattice.hpp"

using namespace bsde;

TEST_CASE("lebesgue integral of constants") {
    TimeGrid grid(1.0, 16);
    AdaptedProcess ones = AdaptedProcess::constant(5, grid.points(), 1.0);
    auto full = pathwise_lebesgue_integral(ones, grid, 0, grid.steps());
    for (double v : full) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    AdaptedProcess zeros = AdaptedProcess::constant(5, grid.points(), 0.0);
    for (double v : pathwise_lebesgue_integral(zeros, grid, 0, grid.steps())) CHECK(v == 0.0);
}

TEST_CASE("left Riemann sum of p_t = t on a 4-step unit grid is 0.375") {
    TimeGrid grid(1.0, 4);
    AdaptedProcess p(3, grid.points());
    for (std::size_t path = 0; path < 3; ++path) {
        for (std::size_t i = 0; i < grid.points(); ++i) p.at(path, i) = grid.time(i);
    }
    auto v = pathwise_lebesgue_integral(p, grid, 0, 4);
    for (double x : v) CHECK(x == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("lebesgue integral rejects bad ranges") {
    TimeGrid grid(1.0, 4);
    AdaptedProcess p = AdaptedProcess::constant(2, grid.points(), 1.0);
    CHECK_THROWS_AS(pathwise_lebesgue_integral(p, grid, 3, 2), std::out_of_range);
    CHECK_THROWS_AS(pathwise_lebesgue_integral(p, grid, 0, 5), std::out_of_range);
}

TEST_CASE("ito integral of zero is zero and of one telescopes to B_T") {
    TimeGrid grid(1.0, 32);
    auto lattice = generate_lattice(grid, 1, 100, 3);
    AdaptedProcess zero = AdaptedProcess::constant(100, grid.points(), 0.0);
    for (double v : pathwise_ito_integral(zero, lattice, 0, grid.steps())) CHECK(v == 0.0);

    AdaptedProcess one = AdaptedProcess::constant(100, grid.points(), 1.0);
    auto ito = pathwise_ito_integral(one, lattice, 0, grid.steps());
    for (std::size_t p = 0; p < 100; ++p) {
        CHECK(ito[p] == doctest::Approx(lattice.value(p, grid.steps())).epsilon(1e-12));
    }
}

TEST_CASE("ito integral has zero mean within 5 standard errors") {
    TimeGrid grid(1.0, 64);
    auto lattice = generate_lattice(grid, 1, 10000, 17);
    AdaptedProcess one = AdaptedProcess::constant(10000, grid.points(), 1.0);
    auto ito = pathwise_ito_integral(one, lattice, 0, grid.steps());
    double mean = 0.0;
    for (double v : ito) mean += v;
    mean /= static_cast<double>(ito.size());
    // integral ~ N(0, T): standard error sqrt(T / n).
    const double se = std::sqrt(1.0 / static_cast<double>(ito.size()));
    CHECK(std::abs(mean) <= 5.0 * se);
}

TEST_CASE("quadratic isometry: Var(int z dB) matches E int z^2 dt") {
    TimeGrid grid(1.0, 32);
    auto lattice = generate_lattice(grid, 1, 20000, 29);
    // Bounded adapted integrand: z_t = clamp(B_t, -2, 2).
    AdaptedProcess z(lattice.paths(), grid.points());
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        for (std::size_t i = 0; i < grid.points(); ++i) {
            z.at(p, i) = std::clamp(lattice.value(p, i), -2.0, 2.0);
        }
    }
    auto ito = pathwise_ito_integral(z, lattice, 0, grid.steps());
    double mean = 0.0;
    for (double v : ito) mean += v;
    mean /= static_cast<double>(ito.size());
    double var = 0.0;
    for (double v : ito) var += (v - mean) * (v - mean);
    var /= static_cast<double>(ito.size() - 1);

    AdaptedProcess z2(lattice.paths(), grid.points());
    for (std::size_t k = 0; k < z.data.size(); ++k) z2.data[k] = z.data[k] * z.data[k];
    auto quad = pathwise_lebesgue_integral(z2, grid, 0, grid.steps());
    double expected = 0.0;
    for (double v : quad) expected += v;
    expected /= static_cast<double>(quad.size());

    // 5 standard errors of the variance estimate (4th-moment bound, generous).
    const double se = 3.0 * expected / std::sqrt(static_cast<double>(ito.size()));
    CHECK(std::abs(var - expected) <= 5.0 * se);
}

TEST_CASE("ito integral rejects dimension mismatch") {
    TimeGrid grid(1.0, 4);
    auto lattice = generate_lattice(grid, 2, 10, 1);
    AdaptedProcess z = AdaptedProcess::constant(10, grid.points(), 1.0, 1);
    CHECK_THROWS_AS(pathwise_ito_integral(z, lattice, 0, 4), std::invalid_argument);
}
