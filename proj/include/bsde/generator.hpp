#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bsde/adapted_process.hpp"
#include "bsde/brownian_lattice.hpp"

namespace bsde {

enum class Assumption { H1, H2, H3, H4, H5, H6, H7 };

std::string to_string(Assumption a);
Assumption assumption_from_string(const std::string& s);

// Modulus of continuity in z, a nondecreasing continuous map with phi(0) = 0
// and the linear-growth envelope phi(x) <= a x + b.
struct ContinuityModulus {
    std::string name;
    std::function<double(double)> phi;
    double a = 1.0;
    double b = 0.0;
};

// Checks phi(0) = 0, monotonicity and the envelope on sampled points.
bool modulus_envelope_ok(const ContinuityModulus& m, std::size_t samples, std::uint64_t seed,
                         double scale = 3.0, double tol = 1e-12);

// A driver g(path, t_index, y, z) together with its declared coefficient
// processes and the assumption profile it claims. The evaluator must be a
// pure function of its arguments and safe to call concurrently. Coefficient
// processes are shared immutably so evaluator closures can capture them and
// specs stay cheap to copy.
struct GeneratorSpec {
    std::string name;
    std::function<double(std::size_t path, std::size_t t_index, double y,
                         std::span<const double> z)>
        eval;
    std::shared_ptr<const AdaptedProcess> u; // scalar, nonnegative
    std::shared_ptr<const AdaptedProcess> v; // scalar, nonnegative
    std::shared_ptr<const AdaptedProcess> f; // scalar, nonnegative (linear-growth offset)
    double budget_bound = 1.0; // M
    std::optional<ContinuityModulus> modulus;
    std::set<Assumption> profile;
    std::size_t z_dim = 1;
    // Which arguments the driver actually reads; lets searches and probes
    // skip dead coordinates.
    bool uses_y = true;
    bool uses_z = true;

    bool claims(Assumption a) const { return profile.count(a) > 0; }

    double u_at(std::size_t path, std::size_t t) const { return u ? u->at(path, t) : 0.0; }
    double v_at(std::size_t path, std::size_t t) const { return v ? v->at(path, t) : 0.0; }
    double f_at(std::size_t path, std::size_t t) const { return f ? f->at(path, t) : 0.0; }

    double operator()(std::size_t path, std::size_t t_index, double y,
                      std::span<const double> z) const {
        return eval(path, t_index, y, z);
    }
};

// The full parameter triple (xi, T, g) at a chosen integrability exponent p.
struct Problem {
    GeneratorSpec generator;
    std::vector<double> xi; // one value per path, measurable w.r.t. terminal data
    double p = 2.0;
    std::string name;
    std::string xi_label;
    // Rebuilds xi on another lattice (noise-floor solves); when absent the
    // label is interpreted by the catalog's terminal-condition builder.
    std::function<std::vector<double>(const BrownianLattice&)> xi_builder;
};

// Linear-growth envelope driver h = f + u|y| + v|z| of a generator with an
// (H5)-style coefficient triple. The result claims (H1) and (H2) with the
// same u, v and dominates |g| pointwise.
GeneratorSpec envelope_generator(const GeneratorSpec& spec);

// Sign-flip transform (xi, g) -> (-xi, (t,y,z) -> -g(t,-y,-z)); the minimal
// solution of the transformed problem is minus the maximal solution of the
// original one.
Problem signflip_problem(const Problem& problem);

} // namespace bsde
