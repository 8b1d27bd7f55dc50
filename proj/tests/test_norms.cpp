#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsde/brownian_lattice.hpp"
#include "bsde/norms.hpp"
#include "bsde/rng.hpp"

using namespace bsde;

TEST_CASE("sp_norm of constants and zero") {
    AdaptedProcess y3 = AdaptedProcess::constant(7, 11, 3.0);
    for (double p : {1.5, 2.0, 4.0}) CHECK(sp_norm(y3, p) == doctest::Approx(3.0).epsilon(1e-12));
    AdaptedProcess y0 = AdaptedProcess::constant(7, 11, 0.0);
    CHECK(sp_norm(y0, 2.0) == 0.0);
}

TEST_CASE("mp_norm closed forms") {
    TimeGrid grid(1.0, 10);
    AdaptedProcess z0 = AdaptedProcess::constant(4, grid.points(), 0.0);
    CHECK(mp_norm(z0, grid, 2.0) == 0.0);
    AdaptedProcess z1 = AdaptedProcess::constant(4, grid.points(), 1.0);
    for (double p : {1.5, 2.0, 3.0}) CHECK(mp_norm(z1, grid, p) == doctest::Approx(1.0).epsilon(1e-12));

    TimeGrid quarter(0.25, 10);
    AdaptedProcess z2 = AdaptedProcess::constant(4, quarter.points(), 2.0);
    CHECK(mp_norm(z2, quarter, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sp_norm of Brownian sup matches direct max-reduction and is seed-stable") {
    TimeGrid grid(1.0, 64);
    auto a = generate_lattice(grid, 1, 10000, 1);
    const AdaptedProcess& Y = a.values();
    // Same formula computed directly.
    double acc = 0.0;
    for (std::size_t p = 0; p < Y.paths; ++p) {
        double m = 0.0;
        for (std::size_t i = 0; i < Y.points; ++i) m = std::max(m, std::abs(Y.at(p, i)));
        acc += m * m;
    }
    const double direct = std::sqrt(acc / static_cast<double>(Y.paths));
    CHECK(sp_norm(Y, 2.0) == doctest::Approx(direct).epsilon(1e-15));

    auto b = generate_lattice(grid, 1, 10000, 2);
    const double other = sp_norm(b.values(), 2.0);
    CHECK(std::abs(other - direct) / direct < 0.05);
}

TEST_CASE("norms are nonincreasing in the from index, path by path") {
    TimeGrid grid(1.0, 32);
    auto lattice = generate_lattice(grid, 2, 200, 9);
    const AdaptedProcess& Z = lattice.values();
    AdaptedProcess Y(200, grid.points());
    for (std::size_t p = 0; p < 200; ++p) {
        for (std::size_t i = 0; i < grid.points(); ++i) Y.at(p, i) = Z.at(p, i, 0);
    }
    double prev_sp = sp_norm(Y, 2.0, 0);
    double prev_mp = mp_norm(Z, grid, 2.0, 0);
    for (std::size_t from : {4u, 11u, 23u, 31u}) {
        const double s = sp_norm(Y, 2.0, from);
        const double m = mp_norm(Z, grid, 2.0, from);
        CHECK(s <= prev_sp + 1e-12);
        CHECK(m <= prev_mp + 1e-12);
        prev_sp = s;
        prev_mp = m;
    }
}

TEST_CASE("positive homogeneity of degree one in the scaling") {
    TimeGrid grid(1.0, 16);
    auto lattice = generate_lattice(grid, 1, 300, 4);
    AdaptedProcess Y = lattice.values();
    AdaptedProcess Y7 = Y;
    for (auto& v : Y7.data) v *= 7.0;
    CHECK(sp_norm(Y7, 2.5) == doctest::Approx(7.0 * sp_norm(Y, 2.5)).epsilon(1e-12));
    CHECK(mp_norm(Y7, grid, 2.5) == doctest::Approx(7.0 * mp_norm(Y, grid, 2.5)).epsilon(1e-12));
}

TEST_CASE("audit_estimate flags the all-zero problem as degenerate") {
    TimeGrid grid(1.0, 8);
    AdaptedProcess zero = AdaptedProcess::constant(10, grid.points(), 0.0);
    for (const char* id : {"2.2", "2.3", "2.4"}) {
        auto audit = audit_estimate(id, zero, zero, zero, grid, 2.0);
        CHECK(audit.degenerate);
    }
}

TEST_CASE("audit_estimate implied constants scale-invariant under lambda = 7") {
    TimeGrid grid(1.0, 32);
    auto lattice = generate_lattice(grid, 1, 500, 12);
    // Synthetic solution data: Y = B, Z = 1, g = 0.3 + |B|.
    AdaptedProcess Y = lattice.values();
    AdaptedProcess Z = AdaptedProcess::constant(500, grid.points(), 1.0);
    AdaptedProcess G(500, grid.points());
    for (std::size_t p = 0; p < 500; ++p) {
        for (std::size_t i = 0; i < grid.points(); ++i) G.at(p, i) = 0.3 + std::abs(Y.at(p, i));
    }
    AdaptedProcess Y7 = Y, Z7 = Z, G7 = G;
    for (auto& v : Y7.data) v *= 7.0;
    for (auto& v : Z7.data) v *= 7.0;
    for (auto& v : G7.data) v *= 7.0;
    for (const char* id : {"2.2", "2.3", "2.4"}) {
        auto a = audit_estimate(id, Y, Z, G, grid, 2.0);
        auto b = audit_estimate(id, Y7, Z7, G7, grid, 2.0);
        REQUIRE(!a.degenerate);
        REQUIRE(!b.degenerate);
        CHECK(std::abs(a.implied_constant - b.implied_constant) <=
              1e-12 * std::abs(a.implied_constant));
    }
}

TEST_CASE("unknown inequality id is rejected") {
    TimeGrid grid(1.0, 4);
    AdaptedProcess x = AdaptedProcess::constant(3, grid.points(), 1.0);
    CHECK_THROWS_AS(audit_estimate("2.5", x, x, x, grid, 2.0), std::invalid_argument);
}
