#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsde/catalog.hpp"
#include "bsde/inf_convolution.hpp"
#include "bsde/rng.hpp"

using namespace bsde;

namespace {

BrownianLattice lattice_for_tests() { return generate_lattice(TimeGrid(1.0, 16), 1, 50, 3); }

GeneratorSpec abs_y_driver(const BrownianLattice& lattice) {
    // g(y) = u |y| with u = 1: already 1*u-Lipschitz, so g_n = g for n >= 1.
    GeneratorSpec g;
    g.name = "absy";
    g.z_dim = 1;
    g.u = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), lattice.grid().points(), 1.0));
    g.v = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), lattice.grid().points(), 0.0));
    g.f = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), lattice.grid().points(), 0.0));
    g.uses_z = false;
    g.profile = {Assumption::H1, Assumption::H2, Assumption::H5, Assumption::H6};
    g.eval = [](std::size_t, std::size_t, double y, std::span<const double>) {
        return std::abs(y);
    };
    return g;
}

GeneratorSpec constant_driver(const BrownianLattice& lattice, double c) {
    GeneratorSpec g;
    g.name = "const";
    g.z_dim = 1;
    g.u = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), lattice.grid().points(), 1.0));
    g.v = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), lattice.grid().points(), 0.0));
    g.f = std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), lattice.grid().points(), std::abs(c)));
    g.uses_y = true; // searched, though the driver ignores it
    g.uses_z = false;
    g.profile = {Assumption::H5, Assumption::H6};
    g.eval = [c](std::size_t, std::size_t, double, std::span<const double>) { return c; };
    return g;
}

} // namespace

TEST_CASE("already-Lipschitz base is reproduced exactly") {
    auto lattice = lattice_for_tests();
    auto g = abs_y_driver(lattice);
    std::vector<double> z{0.0};
    InfConvolutionSpec spec{g, 1, GnSearchConfig{}};
    CHECK(eval_gn(spec, 0, 3, 0.5, z) == doctest::Approx(0.5).epsilon(1e-9));
    InfConvolutionSpec spec4{g, 4, GnSearchConfig{}};
    for (double y : {-2.3, -0.7, 0.0, 1.1, 3.9}) {
        CHECK(eval_gn(spec4, 0, 3, y, z) == doctest::Approx(std::abs(y)).epsilon(1e-9));
    }
}

TEST_CASE("constant base passes through for every n") {
    auto lattice = lattice_for_tests();
    auto g = constant_driver(lattice, 2.75);
    std::vector<double> z{0.4};
    for (std::size_t n : {1u, 2u, 16u}) {
        InfConvolutionSpec spec{g, n, GnSearchConfig{}};
        CHECK(eval_gn(spec, 1, 5, -1.2, z) == doctest::Approx(2.75).epsilon(1e-12));
    }
}

TEST_CASE("sqrt driver against the dense brute-force oracle") {
    auto lattice = lattice_for_tests();
    auto problem = make_catalog_problem("sqrty", lattice, 2.0);
    const auto& g = problem.generator;
    std::vector<double> z{0.0};

    // g_2(0) = 0: the query candidate already attains the infimum.
    InfConvolutionSpec spec2{g, 2, GnSearchConfig{8.0, 33, 5}};
    CHECK(eval_gn(spec2, 0, 2, 0.0, z) == doctest::Approx(0.0).epsilon(1e-9));

    // Dense brute-force grid on [-4, 4]; 100001 points so the kink at 0 is a
    // grid point (the infimum often sits exactly on it).
    for (double y : {1.0, 0.3, -0.6, 2.0}) {
        for (std::size_t n : {1u, 2u, 8u, 32u}) {
            InfConvolutionSpec spec{g, n, GnSearchConfig{8.0, 33, 7}};
            const double approx = eval_gn(spec, 0, 2, y, z);
            const double oracle = brute_force_gn_y(g, n, 0, 2, y, z, -4.0, 4.0, 100001);
            CHECK(std::abs(approx - oracle) < 1e-3);
        }
    }
}

TEST_CASE("value never exceeds the base and improves with a larger nested box") {
    auto lattice = lattice_for_tests();
    auto problem = make_catalog_problem("sqrty", lattice, 2.0);
    const auto& g = problem.generator;
    std::vector<double> z{0.0};
    for (double y : {-1.0, 0.2, 0.9}) {
        InfConvolutionSpec narrow{g, 2, GnSearchConfig{2.0, 33, 0}};
        // Same spacing, double the radius: candidate superset.
        InfConvolutionSpec wide{g, 2, GnSearchConfig{4.0, 65, 0}};
        const double narrow_v = eval_gn(narrow, 0, 2, y, z);
        const double wide_v = eval_gn(wide, 0, 2, y, z);
        CHECK(narrow_v <= g(0, 2, y, z) + 1e-12);
        CHECK(wide_v <= narrow_v + 1e-12);

        // More refinement rounds only lower the value.
        InfConvolutionSpec rough{g, 2, GnSearchConfig{8.0, 33, 0}};
        InfConvolutionSpec fine{g, 2, GnSearchConfig{8.0, 33, 4}};
        CHECK(eval_gn(fine, 0, 2, y, z) <= eval_gn(rough, 0, 2, y, z) + 1e-12);
    }
}

TEST_CASE("degenerate search box is rejected") {
    auto lattice = lattice_for_tests();
    auto g = abs_y_driver(lattice);
    std::vector<double> z{0.0};
    InfConvolutionSpec bad{g, 1, GnSearchConfig{0.0, 33, 2}};
    CHECK_THROWS_AS(eval_gn(bad, 0, 0, 0.0, z), std::invalid_argument);
    InfConvolutionSpec coarse{g, 1, GnSearchConfig{1.0, 2, 2}};
    CHECK_THROWS_AS(eval_gn(coarse, 0, 0, 0.0, z), std::invalid_argument);
}

TEST_CASE("property report on a Lipschitz base: everything at ratio <= 1") {
    auto lattice = lattice_for_tests();
    auto g = abs_y_driver(lattice);
    GnCheckConfig cfg;
    cfg.probes = 300;
    auto report = check_gn_properties(g, {1, 2, 4}, lattice, cfg);
    CHECK(report.envelope_pass);
    CHECK(report.monotone_pass);
    CHECK(report.lipschitz_pass);
    // g_n = g for all n: gaps stay at zero.
    for (const auto& row : report.rows) CHECK(row.max_gap <= 1e-9);
}

TEST_CASE("property report on the constant base: monotonicity with equality") {
    auto lattice = lattice_for_tests();
    auto g = constant_driver(lattice, 1.5);
    GnCheckConfig cfg;
    cfg.probes = 200;
    auto report = check_gn_properties(g, {1, 2, 8}, lattice, cfg);
    CHECK(report.monotone_pass);
    for (const auto& row : report.rows) {
        CHECK(row.mono_violation <= 1e-12);
        CHECK(row.max_gap <= 1e-12);
    }
}

TEST_CASE("property report on the sqrt driver: gaps shrink toward zero") {
    auto lattice = lattice_for_tests();
    auto problem = make_catalog_problem("sqrty", lattice, 2.0);
    GnCheckConfig cfg;
    cfg.probes = 400;
    cfg.search = GnSearchConfig{8.0, 33, 5};
    auto report = check_gn_properties(problem.generator, {1, 2, 4, 8, 16, 32, 64}, lattice, cfg);
    CHECK(report.envelope_pass);
    CHECK(report.monotone_pass);
    CHECK(report.lipschitz_pass);
    CHECK(report.gaps_nonincreasing);
    CHECK(report.rows.front().max_gap > 0.1); // n = 1 is far from g
    CHECK(report.final_gap < 1e-2);           // n = 64 is close
}

TEST_CASE("gn generator wrapper claims the scaled Lipschitz profile") {
    auto lattice = lattice_for_tests();
    auto problem = make_catalog_problem("sqrty", lattice, 2.0);
    InfConvolutionSpec spec{problem.generator, 4, GnSearchConfig{8.0, 33, 3}};
    auto gn = make_gn_generator(spec);
    CHECK(gn.claims(Assumption::H1));
    CHECK(gn.u->at(0, 0) == doctest::Approx(4.0));
    CHECK(gn.budget_bound == doctest::Approx(16.0 * problem.generator.budget_bound));
    std::vector<double> z{0.0};
    CHECK(gn(0, 2, 0.7, z) ==
          doctest::Approx(eval_gn(spec, 0, 2, 0.7, z)).epsilon(1e-12));
}

TEST_CASE("linear growth bound closed forms and domination") {
    auto psi_affine = [](double x) { return x + 1.0; };
    CHECK(linear_growth_bound(1.0, 2, 0.0, psi_affine) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(linear_growth_bound(1.0, 2, 1.0, psi_affine) == doctest::Approx(5.5).epsilon(1e-12));
    auto psi_zero = [](double) { return 0.0; };
    CHECK(linear_growth_bound(3.0, 5, 2.0, psi_zero) == doctest::Approx(22.0).epsilon(1e-12));
    CHECK_THROWS_AS(linear_growth_bound(0.0, 1, 1.0, psi_zero), std::invalid_argument);

    // Domination at random points for a catalog of linear-growth functions.
    struct Entry {
        double K;
        std::function<double(double)> psi;
    };
    std::vector<Entry> entries{
        {1.0, [](double x) { return x; }},
        {1.0, [](double x) { return x + 1.0; }},
        {1.0, [](double x) { return std::sqrt(x); }},
        {1.0, [](double x) { return std::min(x, 1.0); }},
        {1.0, [](double x) { return 1.0 - std::exp(-x); }},
    };
    SplitMix64 rng(7);
    for (const auto& e : entries) {
        for (std::size_t n : {1u, 2u, 8u, 64u}) {
            for (int k = 0; k < 1000; ++k) {
                const double x = std::abs(rng.next_normal(0.0, 3.0));
                CHECK(e.psi(x) <= linear_growth_bound(e.K, n, x, e.psi) + 1e-12);
            }
        }
    }
}
