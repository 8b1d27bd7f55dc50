#include "bsde/audits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bsde/partition.hpp"
#include "bsde/rng.hpp"

namespace bsde {

namespace {

constexpr double kDenomFloor = 1e-12;

struct ProbeStream {
    SplitMix64 rng;
    std::size_t paths;
    std::size_t points;
    double scale;

    ProbeStream(const AuditConfig& cfg, const BrownianLattice& lattice, std::uint64_t tag)
        : rng(derive_seed(cfg.seed, tag)),
          paths(lattice.paths()),
          points(lattice.grid().points()),
          scale(cfg.probe_scale) {}

    std::size_t path() { return static_cast<std::size_t>(rng.next_u64() % paths); }
    // Time indices cover the steps; coefficients apply on [t_i, t_{i+1}).
    std::size_t time() { return static_cast<std::size_t>(rng.next_u64() % (points - 1)); }
    double value() { return rng.next_normal(0.0, scale); }
    void fill(std::vector<double>& z) {
        for (auto& c : z) c = value();
    }
};

double norm2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double norm2(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

} // namespace

BudgetAuditReport audit_budget(const GeneratorSpec& spec, const BrownianLattice& lattice) {
    if (!spec.u || !spec.v) throw std::invalid_argument("audit_budget: u, v processes required");
    if (spec.u->points != lattice.grid().points() || spec.u->paths != lattice.paths()) {
        throw std::invalid_argument("audit_budget: coefficient processes not on this lattice");
    }
    const auto budget = compute_budget(*spec.u, *spec.v, lattice.grid(), spec.budget_bound);
    const std::size_t paths = lattice.paths();
    const std::size_t last = lattice.grid().points() - 1;

    std::vector<double> totals(paths);
    for (std::size_t p = 0; p < paths; ++p) totals[p] = budget.running.at(p, last);

    BudgetAuditReport r;
    r.generator = spec.name;
    r.bound = spec.budget_bound;
    r.grid_slack = budget.max_step_increment;
    double sum = 0.0, mx = 0.0;
    for (double t : totals) {
        sum += t;
        mx = std::max(mx, t);
    }
    r.max_budget = mx;
    r.mean_budget = sum / static_cast<double>(paths);
    std::vector<double> sorted = totals;
    std::sort(sorted.begin(), sorted.end());
    r.q50 = sorted[sorted.size() / 2];
    r.q95 = sorted[static_cast<std::size_t>(0.95 * static_cast<double>(sorted.size() - 1))];
    r.pass = r.max_budget <= r.bound + r.grid_slack + 1e-12;

    if (spec.modulus && spec.modulus->b != 0.0) {
        r.v_integral_checked = true;
        double mxv = 0.0, slack_v = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            double acc = 0.0;
            for (std::size_t i = 0; i < last; ++i) {
                const double inc = spec.v->at(p, i) * lattice.grid().dt(i);
                slack_v = std::max(slack_v, inc);
                acc += inc;
            }
            mxv = std::max(mxv, acc);
        }
        r.max_v_integral = mxv;
        r.v_integral_pass = mxv <= r.bound + slack_v + 1e-12;
        r.pass = r.pass && r.v_integral_pass;
    }
    return r;
}

AuditReport audit_lipschitz(const GeneratorSpec& spec, const BrownianLattice& lattice,
                            const AuditConfig& cfg) {
    if (cfg.probes < 1) throw std::invalid_argument("audit_lipschitz: probe count must be >= 1");
    ProbeStream ps(cfg, lattice, 0x4831ULL);
    const std::size_t d = spec.z_dim;
    std::vector<double> z1(d), z2(d);
    AuditReport r;
    r.assumption = "H1";
    r.generator = spec.name;
    r.probes = cfg.probes;
    r.tol = cfg.tol;
    for (std::size_t k = 0; k < cfg.probes; ++k) {
        const std::size_t p = ps.path();
        const std::size_t t = ps.time();
        const double y1 = ps.value(), y2 = ps.value();
        ps.fill(z1);
        ps.fill(z2);
        const double denom =
            spec.u_at(p, t) * std::abs(y1 - y2) + spec.v_at(p, t) * norm2(z1, z2);
        if (denom < kDenomFloor) {
            ++r.skipped;
            continue;
        }
        const double dg = std::abs(spec(p, t, y1, z1) - spec(p, t, y2, z2));
        r.worst_ratio = std::max(r.worst_ratio, dg / denom);
    }
    r.pass = r.worst_ratio <= 1.0 + r.tol;
    return r;
}

AuditReport audit_lipschitz_y(const GeneratorSpec& spec, const BrownianLattice& lattice,
                              const AuditConfig& cfg) {
    if (cfg.probes < 1) throw std::invalid_argument("audit_lipschitz_y: probe count must be >= 1");
    ProbeStream ps(cfg, lattice, 0x4837ULL);
    const std::size_t d = spec.z_dim;
    std::vector<double> z(d);
    AuditReport r;
    r.assumption = "H7:y";
    r.generator = spec.name;
    r.probes = cfg.probes;
    r.tol = cfg.tol;
    for (std::size_t k = 0; k < cfg.probes; ++k) {
        const std::size_t p = ps.path();
        const std::size_t t = ps.time();
        const double y1 = ps.value(), y2 = ps.value();
        ps.fill(z);
        const double denom = spec.u_at(p, t) * std::abs(y1 - y2);
        if (denom < kDenomFloor) {
            ++r.skipped;
            continue;
        }
        const double dg = std::abs(spec(p, t, y1, z) - spec(p, t, y2, z));
        r.worst_ratio = std::max(r.worst_ratio, dg / denom);
    }
    r.pass = r.worst_ratio <= 1.0 + r.tol;
    return r;
}

AuditReport audit_monotonicity(const GeneratorSpec& spec, const BrownianLattice& lattice,
                               const AuditConfig& cfg) {
    if (cfg.probes < 1) throw std::invalid_argument("audit_monotonicity: probe count must be >= 1");
    ProbeStream ps(cfg, lattice, 0x4833ULL);
    const std::size_t d = spec.z_dim;
    std::vector<double> z(d);
    AuditReport r;
    r.assumption = "H3";
    r.generator = spec.name;
    r.probes = cfg.probes;
    r.tol = cfg.tol;
    // Signed ratios: large negative values are fine, only ratio > 1 violates.
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cfg.probes; ++k) {
        const std::size_t p = ps.path();
        const std::size_t t = ps.time();
        const double y1 = ps.value(), y2 = ps.value();
        ps.fill(z);
        const double dy = y1 - y2;
        const double sgn = dy > 0.0 ? 1.0 : (dy < 0.0 ? -1.0 : 0.0);
        const double denom = spec.u_at(p, t) * std::abs(dy);
        if (denom < kDenomFloor || sgn == 0.0) {
            ++r.skipped;
            continue;
        }
        const double num = sgn * (spec(p, t, y1, z) - spec(p, t, y2, z));
        worst = std::max(worst, num / denom);
    }
    r.worst_ratio = std::isfinite(worst) ? worst : 0.0;
    r.pass = r.worst_ratio <= 1.0 + r.tol;
    return r;
}

AuditReport audit_z_uniform_continuity(const GeneratorSpec& spec, const BrownianLattice& lattice,
                                       const AuditConfig& cfg) {
    if (!spec.modulus) throw std::invalid_argument("audit_z_uniform_continuity: modulus missing");
    if (cfg.probes < 1) throw std::invalid_argument("audit_z_uniform_continuity: probe count must be >= 1");
    ProbeStream ps(cfg, lattice, 0x4834ULL);
    const std::size_t d = spec.z_dim;
    std::vector<double> z1(d), z2(d);
    AuditReport r;
    r.assumption = "H4:z";
    r.generator = spec.name;
    r.probes = cfg.probes;
    r.tol = cfg.tol;
    for (std::size_t k = 0; k < cfg.probes; ++k) {
        const std::size_t p = ps.path();
        const std::size_t t = ps.time();
        const double y = ps.value();
        ps.fill(z1);
        ps.fill(z2);
        const double denom = spec.v_at(p, t) * spec.modulus->phi(norm2(z1, z2));
        if (denom < kDenomFloor) {
            ++r.skipped;
            continue;
        }
        const double dg = std::abs(spec(p, t, y, z1) - spec(p, t, y, z2));
        r.worst_ratio = std::max(r.worst_ratio, dg / denom);
    }
    r.pass = r.worst_ratio <= 1.0 + r.tol;
    return r;
}

AuditReport audit_linear_growth(const GeneratorSpec& spec, const BrownianLattice& lattice,
                                const AuditConfig& cfg) {
    if (cfg.probes < 1) throw std::invalid_argument("audit_linear_growth: probe count must be >= 1");
    ProbeStream ps(cfg, lattice, 0x4835ULL);
    const std::size_t d = spec.z_dim;
    std::vector<double> z(d);
    AuditReport r;
    r.assumption = "H5";
    r.generator = spec.name;
    r.probes = cfg.probes;
    r.tol = cfg.tol;
    for (std::size_t k = 0; k < cfg.probes; ++k) {
        const std::size_t p = ps.path();
        const std::size_t t = ps.time();
        const double y = ps.value();
        ps.fill(z);
        const double denom =
            spec.f_at(p, t) + spec.u_at(p, t) * std::abs(y) + spec.v_at(p, t) * norm2(z);
        if (denom < kDenomFloor) {
            ++r.skipped;
            continue;
        }
        r.worst_ratio = std::max(r.worst_ratio, std::abs(spec(p, t, y, z)) / denom);
    }
    r.pass = r.worst_ratio <= 1.0 + r.tol;
    return r;
}

double empirical_h2_moment(const GeneratorSpec& spec, const BrownianLattice& lattice, double p) {
    const std::size_t paths = lattice.paths();
    const std::size_t steps = lattice.grid().steps();
    std::vector<double> zero(spec.z_dim, 0.0);
    double acc = 0.0;
    for (std::size_t path = 0; path < paths; ++path) {
        double integral = 0.0;
        for (std::size_t i = 0; i < steps; ++i) {
            integral += std::abs(spec(path, i, 0.0, zero)) * lattice.grid().dt(i);
        }
        acc += std::pow(integral, p);
    }
    return acc / static_cast<double>(paths);
}

std::vector<AuditReport> audit_profile(const GeneratorSpec& spec, const BrownianLattice& lattice,
                                       const AuditConfig& cfg) {
    std::vector<AuditReport> out;
    if (spec.claims(Assumption::H1)) out.push_back(audit_lipschitz(spec, lattice, cfg));
    if (spec.claims(Assumption::H3)) out.push_back(audit_monotonicity(spec, lattice, cfg));
    if (spec.claims(Assumption::H4) && spec.modulus) {
        out.push_back(audit_z_uniform_continuity(spec, lattice, cfg));
    }
    if (spec.claims(Assumption::H5)) out.push_back(audit_linear_growth(spec, lattice, cfg));
    if (spec.claims(Assumption::H7)) {
        out.push_back(audit_lipschitz_y(spec, lattice, cfg));
        if (spec.modulus) {
            auto z = audit_z_uniform_continuity(spec, lattice, cfg);
            z.assumption = "H7:z";
            out.push_back(z);
        }
    }
    return out;
}

} // namespace bsde
