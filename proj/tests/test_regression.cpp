#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bsde/regression.hpp"

using namespace bsde;

TEST_CASE("basis sizes") {
    RegressionBasis b3{3, true};
    CHECK(b3.size(1) == 4);
    CHECK(b3.size(2) == 10); // all monomials of total degree <= 3 in two variables
    RegressionBasis sep{3, false};
    CHECK(sep.size(2) == 7); // constant + 3 powers per component
    RegressionBasis b0{0, true};
    CHECK(b0.size(1) == 1);
}

TEST_CASE("basis evaluation matches monomials") {
    RegressionBasis b{2, true};
    std::vector<double> out;
    std::vector<double> state{2.0, 3.0};
    b.evaluate(std::span<const double>(state), out);
    REQUIRE(out.size() == 6);
    // constant, then monomials of total degree 1..2 (lexicographic exponents)
    std::vector<double> sorted = out;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> expected{1.0, 2.0, 3.0, 4.0, 6.0, 9.0};
    CHECK(sorted == expected);
}

TEST_CASE("constant values are reproduced exactly") {
    auto lattice = generate_lattice(TimeGrid(1.0, 8), 1, 500, 3);
    std::vector<double> values(500, 4.25);
    for (std::size_t at : {0u, 3u, 7u}) {
        auto fitted = conditional_expectation(values, at, lattice, RegressionBasis{3, true});
        for (double v : fitted) CHECK(v == doctest::Approx(4.25).epsilon(1e-10));
    }
}

TEST_CASE("at index 0 the projection is the plain mean") {
    auto lattice = generate_lattice(TimeGrid(1.0, 4), 1, 100, 9);
    std::vector<double> values(100);
    std::iota(values.begin(), values.end(), 0.0);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / 100.0;
    auto fitted = conditional_expectation(values, 0, lattice, RegressionBasis{3, true});
    for (double v : fitted) CHECK(v == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("martingale oracle: regression of B_T at t recovers B_t") {
    TimeGrid grid(1.0, 16);
    auto lattice = generate_lattice(grid, 1, 20000, 11);
    std::vector<double> bT(lattice.paths());
    for (std::size_t p = 0; p < lattice.paths(); ++p) bT[p] = lattice.value(p, 16);
    for (std::size_t at : {4u, 8u, 12u}) {
        auto fitted = conditional_expectation(bT, at, lattice, RegressionBasis{3, true});
        double mse = 0.0;
        for (std::size_t p = 0; p < lattice.paths(); ++p) {
            const double d = fitted[p] - lattice.value(p, at);
            mse += d * d;
        }
        mse /= static_cast<double>(lattice.paths());
        CHECK(std::sqrt(mse) < 0.03);
    }
}

TEST_CASE("rank-deficient design falls back to ridge without aborting") {
    // One path replicated: the design has rank 1.
    TimeGrid grid(1.0, 4);
    auto lattice = generate_lattice(grid, 1, 6, 2);
    std::vector<double> values(3, 1.5);
    std::vector<std::size_t> rows{2, 2, 2};
    auto fit = regress_at(values, rows, 2, lattice, RegressionBasis{3, true});
    REQUIRE(fit.fitted.size() == 3);
    for (double v : fit.fitted) {
        CHECK(std::isfinite(v));
        CHECK(v == doctest::Approx(1.5).epsilon(1e-6));
    }
    CHECK(fit.ridge_used > 0.0);
}

TEST_CASE("coefficient transfer reproduces fitted values on the same lattice") {
    TimeGrid grid(1.0, 8);
    auto lattice = generate_lattice(grid, 1, 3000, 13);
    std::vector<double> target(lattice.paths());
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        const double b = lattice.value(p, 8);
        target[p] = b * b - 0.3 * b;
    }
    RegressionBasis basis{3, true};
    std::vector<std::size_t> rows(lattice.paths());
    std::iota(rows.begin(), rows.end(), 0);
    auto fit = regress_at(target, rows, 5, lattice, basis);
    auto replay = evaluate_coefficients(fit.coefficients, 5, lattice, basis);
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        CHECK(replay[p] == doctest::Approx(fit.fitted[p]).epsilon(1e-10));
    }
}
