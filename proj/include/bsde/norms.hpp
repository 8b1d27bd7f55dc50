#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bsde/adapted_process.hpp"
#include "bsde/time_grid.hpp"

namespace bsde {

// Empirical S^p norm: (mean over paths of max over grid indices >= from of
// |Y|^p)^(1/p). The continuous-time sup is approximated by the grid max.
double sp_norm(const AdaptedProcess& Y, double p, std::size_t from = 0);

// Empirical M^p norm: (mean over paths of (sum |Z_i|^2 dt_i over steps >= from)^(p/2))^(1/p).
double mp_norm(const AdaptedProcess& Z, const TimeGrid& grid, double p, std::size_t from = 0);

// Same norms restricted to per-path index windows [lo[p], hi[p]]; paths with
// empty windows contribute zero. Used for subinterval-local Picard distances.
double sp_norm_windowed(const AdaptedProcess& Y, double p, const std::vector<std::size_t>& lo,
                        const std::vector<std::size_t>& hi);
double mp_norm_windowed(const AdaptedProcess& Z, const TimeGrid& grid, double p,
                        const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi);

// S^p norm of the difference of two same-shape processes.
double sp_distance(const AdaptedProcess& A, const AdaptedProcess& B, double p,
                   std::size_t from = 0);
double mp_distance(const AdaptedProcess& A, const AdaptedProcess& B, const TimeGrid& grid,
                   double p, std::size_t from = 0);

struct NormReport {
    double p = 2.0;
    double sp = 0.0;
    double mp = 0.0;
    std::size_t paths = 0;
};

NormReport norm_report(const AdaptedProcess& Y, const AdaptedProcess& Z, const TimeGrid& grid,
                       double p, std::size_t from = 0);

// One a priori estimate audit. lhs and rhs_base are both computed by plain
// Monte Carlo on the discrete solution; the implied constant lhs/rhs_base is
// what the corresponding inequality asserts is bounded by a p-only constant.
struct EstimateAudit {
    std::string inequality;     // "2.2", "2.3" or "2.4"
    double p = 2.0;
    std::size_t paths = 0;
    double lhs = 0.0;
    double rhs_base = 0.0;      // right-hand side without the constant
    double implied_constant = 0.0;
    bool degenerate = false;    // rhs_base ~ 0; no division performed
    double residual_mean = 0.0; // mean |discrete dynamics residual|, context only
};

// Audits one of the three a priori inequalities on a discrete solution
// (Y, Z) with realized driver values g (all on the same lattice shapes).
// from is the grid index playing the role of the lower time t.
EstimateAudit audit_estimate(const std::string& inequality, const AdaptedProcess& Y,
                             const AdaptedProcess& Z, const AdaptedProcess& gvals,
                             const TimeGrid& grid, double p, std::size_t from = 0);

} // namespace bsde
