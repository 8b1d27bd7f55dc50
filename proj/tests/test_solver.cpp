#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsde/catalog.hpp"
#include "bsde/solver.hpp"

using namespace bsde;

namespace {

double rmse_against(const AdaptedProcess& Y, const std::function<double(std::size_t, std::size_t)>& ref) {
    double acc = 0.0;
    for (std::size_t p = 0; p < Y.paths; ++p) {
        for (std::size_t i = 0; i < Y.points; ++i) {
            const double d = Y.at(p, i) - ref(p, i);
            acc += d * d;
        }
    }
    return std::sqrt(acc / static_cast<double>(Y.paths * Y.points));
}

} // namespace

TEST_CASE("zero driver: one effective picard application reaches the fixed point") {
    TimeGrid grid(1.0, 16);
    auto lattice = generate_lattice(grid, 1, 4000, 5);
    auto problem = make_catalog_problem("zero", lattice, 2.0);
    SolverConfig cfg;
    auto res = solve_subinterval(problem, lattice, cfg, 0, 16, problem.xi);
    // Mapping is constant in (y, z): the second distance must be exactly 0.
    REQUIRE(res.diagnostics.distances.size() >= 2);
    CHECK(res.diagnostics.distances[1] == 0.0);
    CHECK(res.diagnostics.converged);

    // Martingale oracle: Y_t tracks B_t, Z tracks 1.
    double z_acc = 0.0;
    std::size_t z_n = 0;
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        for (std::size_t i = 0; i < 16; ++i) {
            z_acc += res.Z.at(p, i);
            ++z_n;
        }
    }
    CHECK(std::abs(z_acc / static_cast<double>(z_n) - 1.0) < 0.05);
    CHECK(rmse_against(res.Y, [&](std::size_t p, std::size_t i) {
              return lattice.value(p, i);
          }) < 0.05);
}

TEST_CASE("deterministic ODE oracle: g = 1, xi = 0 gives Y_t = T - t") {
    TimeGrid grid(1.0, 16);
    auto lattice = generate_lattice(grid, 1, 2000, 8);
    auto problem = make_catalog_problem("one", lattice, 2.0, CatalogOptions{0.0, "zero"});
    SolverConfig cfg;
    auto res = solve_subinterval(problem, lattice, cfg, 0, 16, problem.xi);
    for (std::size_t p = 0; p < 5; ++p) {
        for (std::size_t i = 0; i <= 16; ++i) {
            CHECK(res.Y.at(p, i) == doctest::Approx(1.0 - grid.time(i)).epsilon(1e-6));
        }
    }
    // Z's true conditional expectation is 0; the fitted values carry plain
    // Monte Carlo noise of order sqrt(K/paths) * sd(dB).
    double z_rmse = 0.0;
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        for (std::size_t i = 0; i < 16; ++i) z_rmse += res.Z.at(p, i) * res.Z.at(p, i);
    }
    z_rmse = std::sqrt(z_rmse / static_cast<double>(lattice.paths() * 16));
    CHECK(z_rmse < 0.02);
}

TEST_CASE("fixed point residual: restarting from the solution moves below tolerance immediately") {
    TimeGrid grid(1.0, 16);
    auto lattice = generate_lattice(grid, 1, 4000, 21);
    auto problem = make_catalog_problem("linear", lattice, 2.0);
    SolverConfig cfg;
    auto first = solve(problem, lattice, cfg);
    SolverConfig warm_cfg = cfg;
    warm_cfg.initial_guess = InitialGuess::Warm;
    auto second = solve(problem, lattice, warm_cfg, &first);
    for (const auto& diag : second.diagnostics) {
        REQUIRE(!diag.distances.empty());
        CHECK(diag.distances.front() <= cfg.picard_tolerance);
    }
}

TEST_CASE("terminal consistency: Y at the last index equals xi exactly") {
    TimeGrid grid(1.0, 32);
    auto lattice = generate_lattice(grid, 1, 1000, 33);
    auto problem = make_catalog_problem("absz", lattice, 2.0);
    auto sol = solve(problem, lattice, SolverConfig{});
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        CHECK(sol.Y.at(p, 32) == problem.xi[p]);
    }
}

TEST_CASE("linear driver matches the exponential closed form") {
    TimeGrid grid(1.0, 64);
    auto lattice = generate_lattice(grid, 1, 8000, 42);
    auto problem = make_catalog_problem("linear", lattice, 2.0);
    auto sol = solve(problem, lattice, SolverConfig{});

    AdaptedProcess closed(lattice.paths(), grid.points());
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        for (std::size_t i = 0; i < grid.points(); ++i) {
            closed.at(p, i) = std::exp(0.5 * (1.0 - grid.time(i))) * lattice.value(p, i);
        }
    }
    // Desk-scale sanity bound; the acceptance suite pins the tight tolerance
    // at its larger path count.
    const double rel = sp_distance(sol.Y, closed, 2.0) / sp_norm(closed, 2.0);
    CHECK(rel < 0.03);
    CHECK_FALSE(sol.contraction_flagged());
}

TEST_CASE("absolute-z driver matches B_t + (T - t)") {
    TimeGrid grid(1.0, 64);
    auto lattice = generate_lattice(grid, 1, 8000, 43);
    auto problem = make_catalog_problem("absz", lattice, 2.0);
    auto sol = solve(problem, lattice, SolverConfig{});

    AdaptedProcess closed(lattice.paths(), grid.points());
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        for (std::size_t i = 0; i < grid.points(); ++i) {
            closed.at(p, i) = lattice.value(p, i) + (1.0 - grid.time(i));
        }
    }
    const double rel = sp_distance(sol.Y, closed, 2.0) / sp_norm(closed, 2.0);
    CHECK(rel < 0.05);

    double zmean = 0.0;
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        for (std::size_t i = 0; i < 64; ++i) zmean += sol.Z.at(p, i);
    }
    zmean /= static_cast<double>(lattice.paths() * 64);
    CHECK(std::abs(zmean - 1.0) < 0.1);
}

TEST_CASE("example31 solves with the random partition and contracts") {
    TimeGrid grid(1.0, 128);
    auto lattice = generate_lattice(grid, 1, 2000, 44);
    auto problem = make_catalog_problem("example31", lattice, 2.0);
    auto sol = solve(problem, lattice, SolverConfig{});
    CHECK_FALSE(sol.partition.uniform_across_paths());
    for (const auto& diag : sol.diagnostics) {
        CHECK(diag.converged);
        for (std::size_t k = 1; k < diag.ratios.size(); ++k) CHECK(diag.ratios[k] <= 0.9);
    }
    for (std::size_t p = 0; p < lattice.paths(); ++p) CHECK(sol.Y.at(p, 128) == problem.xi[p]);
}

TEST_CASE("uniqueness at desk scale: two initial guesses land on the same solution") {
    TimeGrid grid(1.0, 32);
    auto lattice = generate_lattice(grid, 1, 4000, 45);
    auto problem = make_catalog_problem("linear", lattice, 2.0);
    SolverConfig a;
    a.initial_guess = InitialGuess::TerminalFlat;
    SolverConfig b;
    b.initial_guess = InitialGuess::Zero;
    auto sa = solve(problem, lattice, a);
    auto sb = solve(problem, lattice, b);
    const double noise = measure_noise_floor(problem, lattice, a, lattice.seed() + 1);
    CHECK(sp_distance(sa.Y, sb.Y, 2.0) <= 3.0 * std::max(noise, 1e-12));
}

TEST_CASE("discrete residual shrinks with paths") {
    TimeGrid grid(1.0, 16);
    auto small = generate_lattice(grid, 1, 500, 46);
    auto large = generate_lattice(grid, 1, 8000, 46);
    auto ps = make_catalog_problem("linear", small, 2.0);
    auto pl = make_catalog_problem("linear", large, 2.0);
    auto ss = solve(ps, small, SolverConfig{});
    auto sl = solve(pl, large, SolverConfig{});
    CHECK(sl.residual_mean < ss.residual_mean);
}

TEST_CASE("deliberately small partition count is flagged") {
    TimeGrid grid(1.0, 32);
    auto lattice = generate_lattice(grid, 1, 2000, 47);
    auto problem = make_catalog_problem("linear_strong", lattice, 2.0); // M = 4
    SolverConfig cfg;
    cfg.subintervals = 1;
    cfg.max_picard_iterations = 80;
    auto sol = solve(problem, lattice, cfg);
    CHECK(sol.partition_below_required);
    CHECK(sol.ratios_exceeded_one);
    CHECK(sol.contraction_flagged());

    SolverConfig auto_cfg;
    auto ok = solve(problem, lattice, auto_cfg);
    CHECK_FALSE(ok.partition_below_required);
    for (const auto& diag : ok.diagnostics) {
        for (std::size_t k = 1; k < diag.ratios.size(); ++k) CHECK(diag.ratios[k] <= 0.9);
    }
}

TEST_CASE("non-convergence carries the distance trace") {
    TimeGrid grid(1.0, 16);
    auto lattice = generate_lattice(grid, 1, 500, 48);
    auto problem = make_catalog_problem("linear_strong", lattice, 2.0);
    SolverConfig cfg;
    cfg.subintervals = 1;
    cfg.max_picard_iterations = 2;
    try {
        solve(problem, lattice, cfg);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        REQUIRE(e.diagnostics.size() == 1);
        CHECK(e.diagnostics[0].distances.size() == 2);
        CHECK(std::string(e.what()).find("subinterval") != std::string::npos);
    }
}

TEST_CASE("worker count does not change the solution bits") {
    TimeGrid grid(1.0, 32);
    auto lattice = generate_lattice(grid, 1, 1000, 49);
    auto problem = make_catalog_problem("absz", lattice, 2.0);
    SolverConfig one;
    one.workers = 1;
    SolverConfig four;
    four.workers = 4;
    auto sa = solve(problem, lattice, one);
    auto sb = solve(problem, lattice, four);
    CHECK(sa.Y.data == sb.Y.data);
    CHECK(sa.Z.data == sb.Z.data);
}
