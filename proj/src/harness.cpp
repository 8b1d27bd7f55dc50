#include "bsde/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsde/rng.hpp"

namespace bsde {

namespace {

constexpr double kOrderTol = 1e-9;

void check_same_shape(const Problem& a, const Problem& b, const BrownianLattice& lattice) {
    if (a.xi.size() != lattice.paths() || b.xi.size() != lattice.paths()) {
        throw std::invalid_argument("comparison: problems must live on the shared lattice");
    }
    if (a.p != b.p) throw std::invalid_argument("comparison: exponents p differ");
}

void audit_terminal_order(const Problem& a, const Problem& b) {
    for (std::size_t p = 0; p < a.xi.size(); ++p) {
        if (a.xi[p] > b.xi[p] + kOrderTol) {
            std::ostringstream msg;
            msg << "terminal ordering xi <= xi' fails on path " << p << ": " << a.xi[p] << " > "
                << b.xi[p];
            throw PrecheckError(msg.str());
        }
    }
}

void audit_pointwise_driver_order(const Problem& a, const Problem& b,
                                  const BrownianLattice& lattice, const AuditConfig& cfg) {
    SplitMix64 rng(derive_seed(cfg.seed, 0x6F72646572ULL));
    const std::size_t d = lattice.dimension();
    std::vector<double> z(d);
    for (std::size_t k = 0; k < cfg.probes; ++k) {
        const std::size_t path = rng.next_u64() % lattice.paths();
        const std::size_t t = rng.next_u64() % lattice.grid().steps();
        const double y = rng.next_normal(0.0, cfg.probe_scale);
        for (auto& c : z) c = rng.next_normal(0.0, cfg.probe_scale);
        const double ga = a.generator(path, t, y, z);
        const double gb = b.generator(path, t, y, z);
        if (ga > gb + kOrderTol) {
            std::ostringstream msg;
            msg << "pointwise driver ordering g <= g' fails at probe (path=" << path
                << ", t=" << t << ", y=" << y << "): " << ga << " > " << gb;
            throw PrecheckError(msg.str());
        }
    }
}

void audit_along_solution_order(const Problem& a, const Problem& b,
                                const BrownianLattice& lattice, const SolutionPair& primed_sol) {
    const std::size_t steps = lattice.grid().steps();
    for (std::size_t path = 0; path < lattice.paths(); ++path) {
        for (std::size_t t = 0; t < steps; ++t) {
            const double y = primed_sol.Y.at(path, t);
            const auto z = primed_sol.Z.vec(path, t);
            const double ga = a.generator(path, t, y, z);
            const double gb = b.generator(path, t, y, z);
            if (ga > gb + kOrderTol) {
                std::ostringstream msg;
                msg << "along-solution driver ordering fails at (path=" << path << ", t=" << t
                    << "): " << ga << " > " << gb;
                throw PrecheckError(msg.str());
            }
        }
    }
}

std::vector<AuditReport> audit_h3_h4_side(const GeneratorSpec& g, const BrownianLattice& lattice,
                                          const AuditConfig& cfg) {
    std::vector<AuditReport> out;
    out.push_back(audit_monotonicity(g, lattice, cfg));
    if (g.modulus) {
        out.push_back(audit_z_uniform_continuity(g, lattice, cfg));
    } else {
        AuditReport missing;
        missing.assumption = "H4:z";
        missing.generator = g.name;
        missing.pass = false;
        missing.note = "modulus missing";
        out.push_back(missing);
    }
    for (const auto& r : out) {
        if (!r.pass) {
            throw PrecheckError("declared (H3)+(H4) side '" + g.name + "' fails audit " +
                                r.assumption);
        }
    }
    return out;
}

// Fraction of (path, grid point) cells with a(p,i) > b(p,i) + eps.
struct ViolationCount {
    double fraction = 0.0;
    double max_excess = 0.0;
    std::size_t cells = 0;
};

ViolationCount count_violations(const AdaptedProcess& a, const AdaptedProcess& b, double eps) {
    ViolationCount v;
    std::size_t bad = 0;
    for (std::size_t p = 0; p < a.paths; ++p) {
        for (std::size_t i = 0; i < a.points; ++i) {
            const double excess = a.at(p, i) - b.at(p, i);
            if (excess > eps) {
                ++bad;
                v.max_excess = std::max(v.max_excess, excess);
            }
        }
    }
    v.cells = a.paths * a.points;
    v.fraction = static_cast<double>(bad) / static_cast<double>(v.cells);
    return v;
}

Problem make_gn_problem(const Problem& base, std::size_t n, const GnSearchConfig& search) {
    Problem p = base;
    p.generator = make_gn_generator(InfConvolutionSpec{base.generator, n, search});
    p.name = base.name + "_g" + std::to_string(n);
    return p;
}

} // namespace

ComparisonReport run_comparison(const ComparisonScenario& scenario,
                                const BrownianLattice& lattice, const SolverConfig& solver_cfg,
                                const AuditConfig& audit_cfg) {
    check_same_shape(scenario.problem, scenario.primed, lattice);
    audit_terminal_order(scenario.problem, scenario.primed);

    ComparisonReport report;
    report.scenario = scenario.name;

    const GeneratorSpec& side = scenario.monotone_side == ConditionSide::Unprimed
                                    ? scenario.problem.generator
                                    : scenario.primed.generator;
    report.side_audits = audit_h3_h4_side(side, lattice, audit_cfg);

    if (scenario.mode == DriverOrderingMode::Pointwise) {
        audit_pointwise_driver_order(scenario.problem, scenario.primed, lattice, audit_cfg);
    }

    const auto primed_sol = solve(scenario.primed, lattice, solver_cfg);
    if (scenario.mode == DriverOrderingMode::AlongSolution) {
        audit_along_solution_order(scenario.problem, scenario.primed, lattice, primed_sol);
    }
    const auto sol = solve(scenario.problem, lattice, solver_cfg);

    // Pooled noise floor of the two regressions (root sum of squares); the
    // shifted-seed re-solves capture each problem's own fit variability.
    const double nf_a =
        measure_noise_floor(scenario.problem, lattice, solver_cfg, lattice.seed() + 1);
    const double nf_b =
        measure_noise_floor(scenario.primed, lattice, solver_cfg, lattice.seed() + 2);
    report.noise_floor = std::sqrt(nf_a * nf_a + nf_b * nf_b);
    report.eps_cmp = 3.0 * report.noise_floor;

    const auto v = count_violations(sol.Y, primed_sol.Y, report.eps_cmp);
    report.violation_fraction = v.fraction;
    report.max_violation = v.max_excess;
    report.cells = v.cells;
    report.pass = report.violation_fraction <= 0.01;
    return report;
}

MinimalSchemeResult run_minimal_scheme(const Problem& problem, const BrownianLattice& lattice,
                                       const SolverConfig& solver_cfg,
                                       const MinimalSchemeConfig& scheme_cfg) {
    if (!problem.generator.claims(Assumption::H5) || !problem.generator.claims(Assumption::H6)) {
        throw std::invalid_argument("run_minimal_scheme: profile must include (H5) and (H6)");
    }
    if (scheme_cfg.n_max < 1) throw std::invalid_argument("run_minimal_scheme: n_max must be >= 1");

    MinimalSchemeResult result;
    result.per_n.resize(scheme_cfg.n_max);

    // Envelope problem: h = f + u|y| + v|z|, the upper bound of the chain.
    Problem envelope_problem = problem;
    envelope_problem.generator = envelope_generator(problem.generator);
    envelope_problem.name = problem.name + "_envelope";
    try {
        result.envelope = solve(envelope_problem, lattice, solver_cfg);
    } catch (const SolverError& e) {
        result.failures.push_back(std::string("envelope: ") + e.what());
    }

    for (std::size_t n = 1; n <= scheme_cfg.n_max; ++n) {
        try {
            const auto gp = make_gn_problem(problem, n, scheme_cfg.search);
            result.per_n[n - 1] = solve(gp, lattice, solver_cfg);
        } catch (const SolverError& e) {
            result.failures.push_back("n=" + std::to_string(n) + ": " + e.what());
        }
    }

    if (scheme_cfg.eps_cmp > 0.0) {
        result.eps_cmp = scheme_cfg.eps_cmp;
    } else {
        const auto g1 = make_gn_problem(problem, 1, scheme_cfg.search);
        result.noise_floor = measure_noise_floor(g1, lattice, solver_cfg, lattice.seed() + 1);
        result.eps_cmp = 3.0 * result.noise_floor;
    }

    // Inequality chain of the minimal scheme: y^1 <= y^n <= y^{n+1} <= envelope.
    const double eps = result.eps_cmp;
    result.monotone_pass = true;
    result.sandwich_pass = true;
    const auto* first = result.per_n.front() ? &result.per_n.front()->Y : nullptr;
    for (std::size_t k = 0; k < scheme_cfg.n_max; ++k) {
        if (!result.per_n[k]) continue;
        const auto& yk = result.per_n[k]->Y;
        if (k + 1 < scheme_cfg.n_max && result.per_n[k + 1]) {
            const auto& ynext = result.per_n[k + 1]->Y;
            const auto v = count_violations(yk, ynext, eps);
            result.mono_violation_fraction.push_back(v.fraction);
            result.successive_sp.push_back(sp_distance(ynext, yk, problem.p));
            if (v.fraction > 0.01) result.monotone_pass = false;
        }
        if (first) {
            const auto v = count_violations(*first, yk, eps);
            result.sandwich_low_fraction.push_back(v.fraction);
            if (v.fraction > 0.01) result.sandwich_pass = false;
        }
        if (result.envelope) {
            const auto v = count_violations(yk, result.envelope->Y, eps);
            result.sandwich_high_fraction.push_back(v.fraction);
            if (v.fraction > 0.01) result.sandwich_pass = false;
        }
    }
    return result;
}

MinimalSchemeResult maximal_via_signflip(const Problem& problem, const BrownianLattice& lattice,
                                         const SolverConfig& solver_cfg,
                                         const MinimalSchemeConfig& scheme_cfg) {
    const Problem flipped = signflip_problem(problem);
    MinimalSchemeResult result = run_minimal_scheme(flipped, lattice, solver_cfg, scheme_cfg);

    auto negate = [](SolutionPair& s) {
        for (auto& v : s.Y.data) v = -v;
        for (auto& v : s.Z.data) v = -v;
    };
    for (auto& sol : result.per_n) {
        if (sol) negate(*sol);
    }
    if (result.envelope) negate(*result.envelope);

    // Recompute the ordering statistics in the maximal direction.
    MinimalSchemeResult out = std::move(result);
    out.maximal = true;
    out.mono_violation_fraction.clear();
    out.sandwich_low_fraction.clear();
    out.sandwich_high_fraction.clear();
    out.successive_sp.clear();
    out.monotone_pass = true;
    out.sandwich_pass = true;
    const double eps = out.eps_cmp;
    const auto* first = out.per_n.front() ? &out.per_n.front()->Y : nullptr;
    for (std::size_t k = 0; k < out.per_n.size(); ++k) {
        if (!out.per_n[k]) continue;
        const auto& yk = out.per_n[k]->Y;
        if (k + 1 < out.per_n.size() && out.per_n[k + 1]) {
            const auto& ynext = out.per_n[k + 1]->Y;
            const auto v = count_violations(ynext, yk, eps); // nonincreasing in n
            out.mono_violation_fraction.push_back(v.fraction);
            out.successive_sp.push_back(sp_distance(ynext, yk, problem.p));
            if (v.fraction > 0.01) out.monotone_pass = false;
        }
        if (first) {
            const auto v = count_violations(yk, *first, eps); // y^n <= y^1
            out.sandwich_low_fraction.push_back(v.fraction);
            if (v.fraction > 0.01) out.sandwich_pass = false;
        }
        if (out.envelope) {
            const auto v = count_violations(out.envelope->Y, yk, eps); // -envelope <= y^n
            out.sandwich_high_fraction.push_back(v.fraction);
            if (v.fraction > 0.01) out.sandwich_pass = false;
        }
    }
    return out;
}

MinimalComparisonReport compare_minimal_solutions(const Problem& problem, const Problem& primed,
                                                  const BrownianLattice& lattice,
                                                  const SolverConfig& solver_cfg,
                                                  const MinimalSchemeConfig& scheme_cfg,
                                                  const AuditConfig& audit_cfg) {
    check_same_shape(problem, primed, lattice);
    audit_terminal_order(problem, primed);
    audit_pointwise_driver_order(problem, primed, lattice, audit_cfg);

    auto a = run_minimal_scheme(problem, lattice, solver_cfg, scheme_cfg);
    auto b = run_minimal_scheme(primed, lattice, solver_cfg, scheme_cfg);
    if (!a.per_n.back() || !b.per_n.back()) {
        throw SolverError("compare_minimal_solutions: final scheme member missing", {});
    }

    MinimalComparisonReport report;
    report.eps_cmp = std::max(a.eps_cmp, b.eps_cmp);
    const auto v = count_violations(a.per_n.back()->Y, b.per_n.back()->Y, report.eps_cmp);
    report.violation_fraction = v.fraction;
    report.pass = v.fraction <= 0.01;
    return report;
}

UniquenessReport run_uniqueness_probe(const Problem& problem, const BrownianLattice& lattice,
                                      const SolverConfig& solver_cfg,
                                      const AuditConfig& audit_cfg) {
    UniquenessReport report;
    report.audits.push_back(audit_lipschitz_y(problem.generator, lattice, audit_cfg));
    if (problem.generator.modulus) {
        report.audits.push_back(audit_z_uniform_continuity(problem.generator, lattice, audit_cfg));
    } else {
        AuditReport missing;
        missing.assumption = "H7:z";
        missing.generator = problem.generator.name;
        missing.pass = false;
        missing.note = "modulus missing";
        report.audits.push_back(missing);
    }
    for (const auto& r : report.audits) {
        if (!r.pass) {
            throw PrecheckError("uniqueness probe: (H7) audit " + r.assumption +
                                " fails for generator '" + problem.generator.name +
                                "' (worst ratio " + std::to_string(r.worst_ratio) + ")");
        }
    }

    // Envelope solution as the warm initial guess.
    Problem envelope_problem = problem;
    envelope_problem.generator = envelope_generator(problem.generator);
    envelope_problem.name = problem.name + "_envelope";

    SolverConfig base_cfg = solver_cfg;
    if (base_cfg.subintervals == 0) {
        const double c_p = base_cfg.c_p > 0.0 ? base_cfg.c_p : default_c_p(problem.p);
        base_cfg.subintervals =
            required_subintervals(problem.p, problem.generator.budget_bound, c_p);
    }
    const auto envelope_sol = solve(envelope_problem, lattice, base_cfg);

    std::vector<SolutionPair> sols;
    for (std::size_t nfac : {1u, 2u}) {
        for (int guess = 0; guess < 2; ++guess) {
            SolverConfig cfg = base_cfg;
            cfg.subintervals = base_cfg.subintervals * nfac;
            cfg.initial_guess = guess == 0 ? InitialGuess::Zero : InitialGuess::Warm;
            report.solve_labels.push_back(std::string(guess == 0 ? "zero" : "envelope") + "/N=" +
                                          std::to_string(cfg.subintervals));
            sols.push_back(solve(problem, lattice, cfg, guess == 0 ? nullptr : &envelope_sol));
        }
    }

    SolverConfig floor_cfg = base_cfg;
    floor_cfg.initial_guess = InitialGuess::Zero;
    report.noise_floor = measure_noise_floor(problem, lattice, floor_cfg, lattice.seed() + 1);
    report.tolerance = 3.0 * report.noise_floor;

    report.pass = true;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        for (std::size_t j = i + 1; j < sols.size(); ++j) {
            const double dist = sp_distance(sols[i].Y, sols[j].Y, problem.p);
            report.pairwise_sp.push_back(dist);
            if (dist > report.tolerance) report.pass = false;
        }
    }
    return report;
}

} // namespace bsde
