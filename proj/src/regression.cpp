#include "bsde/regression.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bsde {

namespace {

// Multi-index enumeration for cross-term bases, cached per (d, degree).
void enumerate_exponents(std::size_t d, std::size_t degree, bool cross,
                         std::vector<std::vector<unsigned>>& out) {
    out.clear();
    out.push_back(std::vector<unsigned>(d, 0)); // constant
    if (!cross || d == 1) {
        for (std::size_t c = 0; c < d; ++c) {
            for (unsigned k = 1; k <= degree; ++k) {
                std::vector<unsigned> e(d, 0);
                e[c] = k;
                out.push_back(e);
            }
        }
        return;
    }
    // All multi-indices with 1 <= |e| <= degree, lexicographic.
    std::vector<unsigned> e(d, 0);
    while (true) {
        std::size_t c = 0;
        while (c < d) {
            ++e[c];
            unsigned total = std::accumulate(e.begin(), e.end(), 0u);
            if (total <= degree) break;
            e[c] = 0;
            ++c;
        }
        if (c == d) break;
        out.push_back(e);
    }
}

// Cholesky factorization/solve of a small SPD system; returns false when a
// pivot degenerates.
bool cholesky_solve(std::vector<double> A, std::vector<double> b, std::size_t n,
                    std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = A[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= A[i * n + k] * A[j * n + k];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                A[i * n + i] = std::sqrt(s);
            } else {
                A[i * n + j] = s / A[j * n + j];
            }
        }
    }
    // Forward then backward substitution.
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= A[i * n + k] * b[k];
        b[i] = s / A[i * n + i];
    }
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= A[k * n + ii] * x[k];
        x[ii] = s / A[ii * n + ii];
    }
    return true;
}

} // namespace

std::size_t RegressionBasis::size(std::size_t d) const {
    std::vector<std::vector<unsigned>> exps;
    enumerate_exponents(d, degree, cross_terms, exps);
    return exps.size();
}

namespace {

void eval_with_table(const std::vector<std::vector<unsigned>>& exps,
                     std::span<const double> state, double* out) {
    for (std::size_t k = 0; k < exps.size(); ++k) {
        double v = 1.0;
        for (std::size_t c = 0; c < state.size(); ++c) {
            for (unsigned e = 0; e < exps[k][c]; ++e) v *= state[c];
        }
        out[k] = v;
    }
}

} // namespace

void RegressionBasis::evaluate(std::span<const double> state, std::vector<double>& out) const {
    std::vector<std::vector<unsigned>> exps;
    enumerate_exponents(state.size(), degree, cross_terms, exps);
    out.resize(exps.size());
    eval_with_table(exps, state, out.data());
}

RegressionFit regress_at(std::span<const double> values, std::span<const std::size_t> rows,
                         std::size_t at, const BrownianLattice& lattice,
                         const RegressionBasis& basis) {
    if (values.size() != rows.size()) {
        throw std::invalid_argument("regress_at: values/rows size mismatch");
    }
    if (at >= lattice.grid().points()) throw std::out_of_range("regress_at: time index");
    RegressionFit fit;
    const std::size_t m = rows.size();
    if (m == 0) return fit;

    const std::size_t d = lattice.dimension();
    const std::size_t K = basis.size(d);

    // Time 0 carries no information: project onto the constant.
    if (at == 0) {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(m);
        fit.fitted.assign(m, mean);
        fit.coefficients.assign(K, 0.0);
        fit.coefficients[0] = mean;
        return fit;
    }

    std::vector<std::vector<unsigned>> exps;
    enumerate_exponents(d, basis.degree, basis.cross_terms, exps);

    // Normal equations accumulated in fixed row order (determinism).
    std::vector<double> A(K * K, 0.0), b(K, 0.0);
    std::vector<double> design(m * K);
    for (std::size_t r = 0; r < m; ++r) {
        double* phi = design.data() + r * K;
        eval_with_table(exps, lattice.state(rows[r], at), phi);
        for (std::size_t i = 0; i < K; ++i) {
            b[i] += phi[i] * values[r];
            for (std::size_t j = 0; j <= i; ++j) A[i * K + j] += phi[i] * phi[j];
        }
    }
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = i + 1; j < K; ++j) A[i * K + j] = A[j * K + i];
    }

    double trace = 0.0;
    for (std::size_t i = 0; i < K; ++i) trace += A[i * K + i];
    std::vector<double> beta;
    double ridge = 0.0;
    if (!cholesky_solve(A, b, K, beta)) {
        // Escalating ridge; the scale follows the design's own magnitude.
        ridge = 1e-12 * (trace > 0.0 ? trace : 1.0);
        for (int attempt = 0; attempt < 8; ++attempt) {
            std::vector<double> Ar = A;
            for (std::size_t i = 0; i < K; ++i) Ar[i * K + i] += ridge;
            if (cholesky_solve(std::move(Ar), b, K, beta)) break;
            ridge *= 100.0;
            beta.clear();
        }
        if (beta.empty()) {
            // Last resort: constant fit.
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(m);
            beta.assign(K, 0.0);
            beta[0] = mean;
        }
    }

    fit.ridge_used = ridge;
    fit.coefficients = beta;
    fit.fitted.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        double v = 0.0;
        for (std::size_t i = 0; i < K; ++i) v += design[r * K + i] * beta[i];
        fit.fitted[r] = v;
    }
    return fit;
}

std::vector<double> conditional_expectation(std::span<const double> values, std::size_t at,
                                            const BrownianLattice& lattice,
                                            const RegressionBasis& basis) {
    if (values.size() != lattice.paths()) {
        throw std::invalid_argument("conditional_expectation: one value per path required");
    }
    std::vector<std::size_t> rows(lattice.paths());
    std::iota(rows.begin(), rows.end(), 0);
    return regress_at(values, rows, at, lattice, basis).fitted;
}

std::vector<double> evaluate_coefficients(std::span<const double> coefficients, std::size_t at,
                                          const BrownianLattice& lattice,
                                          const RegressionBasis& basis) {
    const std::size_t K = basis.size(lattice.dimension());
    if (coefficients.size() != K) {
        throw std::invalid_argument("evaluate_coefficients: coefficient size mismatch");
    }
    std::vector<std::vector<unsigned>> exps;
    enumerate_exponents(lattice.dimension(), basis.degree, basis.cross_terms, exps);
    std::vector<double> out(lattice.paths());
    std::vector<double> phi(K);
    for (std::size_t p = 0; p < lattice.paths(); ++p) {
        eval_with_table(exps, lattice.state(p, at), phi.data());
        double v = 0.0;
        for (std::size_t i = 0; i < K; ++i) v += phi[i] * coefficients[i];
        out[p] = v;
    }
    return out;
}

} // namespace bsde
