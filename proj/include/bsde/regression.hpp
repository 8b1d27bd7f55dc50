#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bsde/brownian_lattice.hpp"

namespace bsde {

// Polynomial-in-Brownian-state basis: all monomials of the d state components
// up to the given total degree when cross terms are on, per-component powers
// only otherwise. Degree 0 is the constant function.
struct RegressionBasis {
    std::size_t degree = 3;
    bool cross_terms = true;

    std::size_t size(std::size_t d) const;
    // Writes the basis functions of one state vector into out (size(d) slots).
    void evaluate(std::span<const double> state, std::vector<double>& out) const;
};

// Least-squares solve result: fitted values per selected row plus the
// coefficient vector actually used.
struct RegressionFit {
    std::vector<double> fitted;       // one per selected row, in row order
    std::vector<double> coefficients; // basis-sized
    double ridge_used = 0.0;          // 0 when the plain normal equations solved
};

// Projects `values` (one per selected row) onto the basis evaluated at the
// lattice state (path, at). `rows` selects the participating paths; fitted
// values come back in the same order. Rank-deficient designs fall back to an
// escalating ridge and never abort. At time index 0 the state is
// deterministic, so the projection is the plain mean.
RegressionFit regress_at(std::span<const double> values, std::span<const std::size_t> rows,
                         std::size_t at, const BrownianLattice& lattice,
                         const RegressionBasis& basis);

// Spec-level convenience: conditional expectation surrogate over all paths.
std::vector<double> conditional_expectation(std::span<const double> values, std::size_t at,
                                            const BrownianLattice& lattice,
                                            const RegressionBasis& basis);

// Evaluates a stored coefficient vector on another lattice at the same time
// index; the transfer used for noise-floor measurements.
std::vector<double> evaluate_coefficients(std::span<const double> coefficients, std::size_t at,
                                          const BrownianLattice& lattice,
                                          const RegressionBasis& basis);

} // namespace bsde
