#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsde/generator.hpp"

namespace bsde {

// Probe distribution for the statistical assumption audits: path and time
// index uniform on the lattice, y and each z component centered Gaussian
// with the configured scale. Almost-everywhere statements are audited by
// sampling, never proven; reports carry probe counts and worst ratios.
struct AuditConfig {
    std::size_t probes = 4096;
    double probe_scale = 3.0;
    double tol = 1e-9; // tol_audit; use 1e-6 when the evaluator itself is numerical
    std::uint64_t seed = 1;
};

struct AuditReport {
    std::string assumption;
    std::string generator;
    std::size_t probes = 0;
    std::size_t skipped = 0;     // degenerate probes (zero denominator)
    double worst_ratio = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string note;
};

// Pathwise budget audit for (3.1)-style constraints: max/mean/quantiles of
// the realized integral of u + v^2 against the declared bound, with one grid
// step of slack. When the modulus has b != 0 the integral of v alone is
// audited against the same bound as well.
struct BudgetAuditReport {
    std::string generator;
    double bound = 0.0;
    double max_budget = 0.0;
    double mean_budget = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
    double grid_slack = 0.0;
    bool pass = false;
    bool v_integral_checked = false;
    double max_v_integral = 0.0;
    bool v_integral_pass = true;
};

BudgetAuditReport audit_budget(const GeneratorSpec& spec, const BrownianLattice& lattice);

// (H1): |g(y1,z1) - g(y2,z2)| <= u |dy| + v |dz|.
AuditReport audit_lipschitz(const GeneratorSpec& spec, const BrownianLattice& lattice,
                            const AuditConfig& cfg);

// (H1) restricted to y (z held fixed across the pair); the y half of (H7).
AuditReport audit_lipschitz_y(const GeneratorSpec& spec, const BrownianLattice& lattice,
                              const AuditConfig& cfg);

// (H3): sgn(y1-y2) (g(y1,z) - g(y2,z)) <= u |y1-y2|, sgn(0) := 0.
AuditReport audit_monotonicity(const GeneratorSpec& spec, const BrownianLattice& lattice,
                               const AuditConfig& cfg);

// (H4)/(H7) z part: |g(y,z1) - g(y,z2)| <= v phi(|z1-z2|).
AuditReport audit_z_uniform_continuity(const GeneratorSpec& spec, const BrownianLattice& lattice,
                                       const AuditConfig& cfg);

// (H5): |g(y,z)| <= f + u|y| + v|z| on probes. Also what the envelope
// generator must dominate.
AuditReport audit_linear_growth(const GeneratorSpec& spec, const BrownianLattice& lattice,
                                const AuditConfig& cfg);

// Empirical value of E[(int |g(t,0,0)| dt)^p]; (H2) cannot be refuted at
// finite paths, so this only reports the number.
double empirical_h2_moment(const GeneratorSpec& spec, const BrownianLattice& lattice, double p);

// Runs the audits matching the generator's declared profile.
std::vector<AuditReport> audit_profile(const GeneratorSpec& spec, const BrownianLattice& lattice,
                                       const AuditConfig& cfg);

} // namespace bsde
