#include "bsde/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsde/rng.hpp"

namespace bsde {

std::string to_string(Assumption a) {
    switch (a) {
        case Assumption::H1: return "H1";
        case Assumption::H2: return "H2";
        case Assumption::H3: return "H3";
        case Assumption::H4: return "H4";
        case Assumption::H5: return "H5";
        case Assumption::H6: return "H6";
        case Assumption::H7: return "H7";
    }
    return "?";
}

Assumption assumption_from_string(const std::string& s) {
    if (s == "H1") return Assumption::H1;
    if (s == "H2") return Assumption::H2;
    if (s == "H3") return Assumption::H3;
    if (s == "H4") return Assumption::H4;
    if (s == "H5") return Assumption::H5;
    if (s == "H6") return Assumption::H6;
    if (s == "H7") return Assumption::H7;
    throw std::invalid_argument("unknown assumption tag: " + s);
}

bool modulus_envelope_ok(const ContinuityModulus& m, std::size_t samples, std::uint64_t seed,
                         double scale, double tol) {
    if (std::abs(m.phi(0.0)) > tol) return false;
    SplitMix64 rng(derive_seed(seed, 0x6D6F64756C7573ULL));
    std::vector<double> xs(samples);
    for (auto& x : xs) x = std::abs(rng.next_normal(0.0, scale));
    std::sort(xs.begin(), xs.end());
    double prev = m.phi(0.0);
    for (double x : xs) {
        const double y = m.phi(x);
        if (y < prev - tol) return false;          // nondecreasing
        if (y > m.a * x + m.b + tol) return false; // linear-growth envelope
        prev = y;
    }
    return true;
}

GeneratorSpec envelope_generator(const GeneratorSpec& spec) {
    if (!spec.u || !spec.v || !spec.f) {
        throw std::invalid_argument("envelope_generator: coefficient processes u, v, f required");
    }
    GeneratorSpec h;
    h.name = spec.name + "_envelope";
    h.u = spec.u;
    h.v = spec.v;
    h.f = spec.f;
    h.budget_bound = spec.budget_bound;
    h.z_dim = spec.z_dim;
    h.uses_y = true;
    h.uses_z = true;
    h.profile = {Assumption::H1, Assumption::H2, Assumption::H3, Assumption::H5, Assumption::H6};
    auto u = spec.u;
    auto v = spec.v;
    auto f = spec.f;
    h.eval = [u, v, f](std::size_t path, std::size_t t, double y, std::span<const double> z) {
        double zn = 0.0;
        for (double c : z) zn += c * c;
        zn = std::sqrt(zn);
        return f->at(path, t) + u->at(path, t) * std::abs(y) + v->at(path, t) * zn;
    };
    return h;
}

Problem signflip_problem(const Problem& problem) {
    Problem flipped;
    flipped.p = problem.p;
    flipped.name = problem.name + "_signflip";
    flipped.xi_label = "-(" + problem.xi_label + ")";
    flipped.xi.resize(problem.xi.size());
    for (std::size_t i = 0; i < problem.xi.size(); ++i) flipped.xi[i] = -problem.xi[i];

    flipped.generator = problem.generator;
    flipped.generator.name = problem.generator.name + "_signflip";
    auto base = problem.generator.eval;
    const std::size_t d = problem.generator.z_dim;
    if (d > 8) throw std::invalid_argument("signflip_problem: z dimension too large");
    flipped.generator.eval = [base, d](std::size_t path, std::size_t t, double y,
                                       std::span<const double> z) {
        double neg[8];
        for (std::size_t c = 0; c < d; ++c) neg[c] = -z[c];
        return -base(path, t, -y, std::span<const double>(neg, d));
    };
    return flipped;
}

} // namespace bsde
