#include "bsde/catalog.hpp"

#include <cmath>
#include <stdexcept>

namespace bsde {

namespace {

std::shared_ptr<const AdaptedProcess> const_process(const BrownianLattice& lattice, double value) {
    return std::make_shared<const AdaptedProcess>(
        AdaptedProcess::constant(lattice.paths(), lattice.grid().points(), value));
}

ContinuityModulus linear_modulus() {
    return ContinuityModulus{"linear", [](double x) { return x; }, 1.0, 0.0};
}

ContinuityModulus sqrt_clamped_modulus() {
    return ContinuityModulus{"sqrt_clamped",
                             [](double x) { return std::sqrt(std::min(x, 1.0)); }, 1.0, 1.0};
}

double znorm(std::span<const double> z) {
    double s = 0.0;
    for (double c : z) s += c * c;
    return std::sqrt(s);
}

std::set<Assumption> all_assumptions() {
    return {Assumption::H1, Assumption::H2, Assumption::H3, Assumption::H4,
            Assumption::H5, Assumption::H6, Assumption::H7};
}

// First grid index at or after the requested time.
std::size_t snap_index(const TimeGrid& grid, double t) {
    std::size_t i = 0;
    while (i < grid.steps() && grid.time(i) < t - 1e-12) ++i;
    return i;
}

// Indicator coefficients of the first-passage construction: the process
// holds the level |B_{t0}| on whole grid steps after t0 for as long as the
// accumulated weight stays within half the budget, realizing
// tau = inf{ t > t0 : level^power (t - t0) >= M/2 } ^ T on the grid
// (steps are included only while the running integral stays <= M/2, so the
// pathwise half-budget bound holds exactly).
AdaptedProcess passage_coefficient(const BrownianLattice& lattice, std::size_t t0_index,
                                   double half_budget, int power) {
    const std::size_t paths = lattice.paths();
    const std::size_t points = lattice.grid().points();
    AdaptedProcess coeff(paths, points, 1, 0.0);
    for (std::size_t p = 0; p < paths; ++p) {
        const double level = std::abs(lattice.value(p, t0_index, 0));
        if (level <= 0.0) continue;
        const double rate = power == 2 ? level * level : level;
        double acc = 0.0;
        for (std::size_t i = t0_index; i + 1 < points; ++i) {
            const double inc = rate * lattice.grid().dt(i);
            if (acc + inc > half_budget + 1e-15) break;
            coeff.at(p, i) = level;
            acc += inc;
        }
    }
    return coeff;
}

} // namespace

std::vector<std::string> catalog_names() {
    return {"zero",     "one",        "linear", "linear_strong", "absz",
            "example31", "sqrty",     "sqrty_shift", "ucz",     "quadz_bad"};
}

std::vector<double> make_xi(const std::string& spec, const BrownianLattice& lattice) {
    const std::size_t paths = lattice.paths();
    const std::size_t last = lattice.grid().points() - 1;
    std::vector<double> xi(paths, 0.0);
    if (spec == "BT") {
        for (std::size_t p = 0; p < paths; ++p) xi[p] = lattice.value(p, last, 0);
    } else if (spec == "absBT") {
        for (std::size_t p = 0; p < paths; ++p) xi[p] = std::abs(lattice.value(p, last, 0));
    } else if (spec == "zero") {
        // already zero
    } else if (spec.rfind("const:", 0) == 0) {
        const double v = std::stod(spec.substr(6));
        for (auto& x : xi) x = v;
    } else {
        throw std::invalid_argument("unknown xi spec: " + spec);
    }
    return xi;
}

Problem make_catalog_problem(const std::string& name, const BrownianLattice& lattice, double p,
                             const CatalogOptions& options) {
    if (!(p > 1.0)) throw std::invalid_argument("make_catalog_problem: p must be > 1");
    const double T = lattice.grid().horizon();

    GeneratorSpec g;
    g.name = name;
    g.z_dim = lattice.dimension();
    std::string xi_default = "BT";
    double M_default = 1.0;

    const auto zero = const_process(lattice, 0.0);
    const auto one = const_process(lattice, 1.0);

    if (name == "zero") {
        g.u = zero;
        g.v = zero;
        g.f = zero;
        g.uses_y = false;
        g.uses_z = false;
        g.modulus = linear_modulus();
        g.profile = all_assumptions();
        g.eval = [](std::size_t, std::size_t, double, std::span<const double>) { return 0.0; };
    } else if (name == "one") {
        g.u = zero;
        g.v = zero;
        g.f = one;
        g.uses_y = false;
        g.uses_z = false;
        g.modulus = linear_modulus();
        g.profile = all_assumptions();
        g.eval = [](std::size_t, std::size_t, double, std::span<const double>) { return 1.0; };
    } else if (name == "linear" || name == "linear_strong") {
        const double a = name == "linear" ? 0.5 : 4.0;
        g.u = const_process(lattice, a);
        g.v = zero;
        g.f = zero;
        g.uses_y = true;
        g.uses_z = false;
        g.modulus = linear_modulus();
        g.profile = all_assumptions();
        M_default = a * T;
        g.eval = [a](std::size_t, std::size_t, double y, std::span<const double>) { return a * y; };
    } else if (name == "absz") {
        g.u = zero;
        g.v = one;
        g.f = zero;
        g.uses_y = false;
        g.uses_z = true;
        g.modulus = linear_modulus();
        g.profile = all_assumptions();
        M_default = T;
        g.eval = [](std::size_t, std::size_t, double, std::span<const double> z) {
            return znorm(z);
        };
    } else if (name == "example31") {
        const double M = options.M > 0.0 ? options.M : M_default;
        const std::size_t t0 = snap_index(lattice.grid(), options.example31_t0);
        auto u = std::make_shared<AdaptedProcess>(passage_coefficient(lattice, t0, 0.5 * M, 1));
        auto v = std::make_shared<AdaptedProcess>(passage_coefficient(lattice, t0, 0.5 * M, 2));
        g.u = u;
        g.v = v;
        g.f = zero;
        g.uses_y = true;
        g.uses_z = true;
        g.modulus = linear_modulus();
        g.profile = {Assumption::H1, Assumption::H2, Assumption::H3, Assumption::H4,
                     Assumption::H5, Assumption::H6};
        auto uc = std::shared_ptr<const AdaptedProcess>(u);
        auto vc = std::shared_ptr<const AdaptedProcess>(v);
        g.eval = [uc, vc](std::size_t path, std::size_t t, double y, std::span<const double> z) {
            return uc->at(path, t) * std::abs(y) + vc->at(path, t) * znorm(z);
        };
    } else if (name == "sqrty" || name == "sqrty_shift") {
        const double shift = name == "sqrty" ? 0.0 : 0.5;
        g.u = one;
        g.v = zero;
        g.f = const_process(lattice, 1.0 + shift);
        g.uses_y = true;
        g.uses_z = false;
        g.profile = {Assumption::H5, Assumption::H6};
        M_default = T;
        xi_default = "absBT";
        g.eval = [shift](std::size_t, std::size_t, double y, std::span<const double>) {
            return std::sqrt(std::min(std::abs(y), 1.0)) + shift;
        };
    } else if (name == "ucz") {
        g.u = const_process(lattice, 0.5);
        g.v = one;
        g.f = const_process(lattice, 0.25);
        g.uses_y = true;
        g.uses_z = true;
        g.modulus = sqrt_clamped_modulus();
        g.profile = {Assumption::H2, Assumption::H3, Assumption::H4, Assumption::H5,
                     Assumption::H6, Assumption::H7};
        M_default = 1.5 * T;
        g.eval = [](std::size_t, std::size_t, double y, std::span<const double> z) {
            return 0.5 * y + std::sqrt(std::min(znorm(z), 1.0));
        };
    } else if (name == "quadz_bad") {
        // Deliberately mis-declared: quadratic growth in z cannot satisfy the
        // claimed Lipschitz profile; audits are expected to fail.
        g.u = zero;
        g.v = one;
        g.f = zero;
        g.uses_y = false;
        g.uses_z = true;
        g.modulus = linear_modulus();
        g.profile = {Assumption::H1, Assumption::H2, Assumption::H7};
        M_default = T;
        g.eval = [](std::size_t, std::size_t, double, std::span<const double> z) {
            const double n = znorm(z);
            return n * n;
        };
    } else {
        throw std::invalid_argument("unknown catalog name: " + name);
    }

    g.budget_bound = options.M > 0.0 ? options.M : M_default;

    Problem problem;
    problem.generator = std::move(g);
    problem.p = p;
    problem.name = name;
    problem.xi_label = options.xi == "default" ? xi_default : options.xi;
    problem.xi = make_xi(problem.xi_label, lattice);
    const std::string label = problem.xi_label;
    problem.xi_builder = [label](const BrownianLattice& l) { return make_xi(label, l); };
    return problem;
}

} // namespace bsde
