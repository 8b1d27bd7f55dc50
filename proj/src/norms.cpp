#include "bsde/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace bsde {

namespace {

double abs_vec(const AdaptedProcess& Z, std::size_t p, std::size_t i) {
    double s = 0.0;
    for (std::size_t c = 0; c < Z.components; ++c) {
        const double v = Z.at(p, i, c);
        s += v * v;
    }
    return std::sqrt(s);
}

void check_p(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("norms: p must be > 1");
}

} // namespace

double sp_norm(const AdaptedProcess& Y, double p, std::size_t from) {
    check_p(p);
    if (!Y.scalar()) throw std::invalid_argument("sp_norm: scalar process required");
    if (from >= Y.points) throw std::out_of_range("sp_norm: empty range");
    double acc = 0.0;
    for (std::size_t path = 0; path < Y.paths; ++path) {
        double m = 0.0;
        for (std::size_t i = from; i < Y.points; ++i) m = std::max(m, std::abs(Y.at(path, i)));
        acc += std::pow(m, p);
    }
    return std::pow(acc / static_cast<double>(Y.paths), 1.0 / p);
}

double mp_norm(const AdaptedProcess& Z, const TimeGrid& grid, double p, std::size_t from) {
    check_p(p);
    if (Z.points != grid.points()) throw std::invalid_argument("mp_norm: process/grid mismatch");
    if (from >= Z.points) throw std::out_of_range("mp_norm: empty range");
    double acc = 0.0;
    for (std::size_t path = 0; path < Z.paths; ++path) {
        double q = 0.0;
        for (std::size_t i = from; i + 1 < Z.points; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < Z.components; ++c) {
                const double v = Z.at(path, i, c);
                s += v * v;
            }
            q += s * grid.dt(i);
        }
        acc += std::pow(q, 0.5 * p);
    }
    return std::pow(acc / static_cast<double>(Z.paths), 1.0 / p);
}

double sp_norm_windowed(const AdaptedProcess& Y, double p, const std::vector<std::size_t>& lo,
                        const std::vector<std::size_t>& hi) {
    check_p(p);
    double acc = 0.0;
    for (std::size_t path = 0; path < Y.paths; ++path) {
        double m = 0.0;
        for (std::size_t i = lo[path]; i <= hi[path] && i < Y.points; ++i) {
            m = std::max(m, std::abs(Y.at(path, i)));
        }
        acc += std::pow(m, p);
    }
    return std::pow(acc / static_cast<double>(Y.paths), 1.0 / p);
}

double mp_norm_windowed(const AdaptedProcess& Z, const TimeGrid& grid, double p,
                        const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) {
    check_p(p);
    double acc = 0.0;
    for (std::size_t path = 0; path < Z.paths; ++path) {
        double q = 0.0;
        for (std::size_t i = lo[path]; i < hi[path] && i + 1 < Z.points; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < Z.components; ++c) {
                const double v = Z.at(path, i, c);
                s += v * v;
            }
            q += s * grid.dt(i);
        }
        acc += std::pow(q, 0.5 * p);
    }
    return std::pow(acc / static_cast<double>(Z.paths), 1.0 / p);
}

namespace {

AdaptedProcess diff(const AdaptedProcess& A, const AdaptedProcess& B) {
    if (!A.same_shape(B)) throw std::invalid_argument("norms: shape mismatch");
    AdaptedProcess D(A.paths, A.points, A.components);
    for (std::size_t k = 0; k < A.data.size(); ++k) D.data[k] = A.data[k] - B.data[k];
    return D;
}

} // namespace

double sp_distance(const AdaptedProcess& A, const AdaptedProcess& B, double p, std::size_t from) {
    return sp_norm(diff(A, B), p, from);
}

double mp_distance(const AdaptedProcess& A, const AdaptedProcess& B, const TimeGrid& grid,
                   double p, std::size_t from) {
    return mp_norm(diff(A, B), grid, p, from);
}

NormReport norm_report(const AdaptedProcess& Y, const AdaptedProcess& Z, const TimeGrid& grid,
                       double p, std::size_t from) {
    NormReport r;
    r.p = p;
    r.paths = Y.paths;
    r.sp = sp_norm(Y, p, from);
    r.mp = mp_norm(Z, grid, p, from);
    return r;
}

EstimateAudit audit_estimate(const std::string& inequality, const AdaptedProcess& Y,
                             const AdaptedProcess& Z, const AdaptedProcess& gvals,
                             const TimeGrid& grid, double p, std::size_t from) {
    check_p(p);
    if (!Y.scalar() || !gvals.scalar()) throw std::invalid_argument("audit_estimate: scalar Y, g required");
    if (Y.paths != Z.paths || Y.paths != gvals.paths || Y.points != Z.points ||
        Y.points != gvals.points || Y.points != grid.points()) {
        throw std::invalid_argument("audit_estimate: shape mismatch");
    }
    if (inequality != "2.2" && inequality != "2.3" && inequality != "2.4") {
        throw std::invalid_argument("audit_estimate: unknown inequality id " + inequality);
    }

    const std::size_t paths = Y.paths;
    const std::size_t last = Y.points - 1;
    const double n_paths = static_cast<double>(paths);

    double e_sup = 0.0;      // E[sup |Y|^p]
    double e_quad = 0.0;     // E[(int |Z|^2 dt)^{p/2}]
    double e_term = 0.0;     // E[|Y_T|^p]
    double e_ypg = 0.0;      // E[int |Y|^{p-1} |g| dt]
    double e_ygp2 = 0.0;     // E[(int |Y||g| dt)^{p/2}]
    double e_gp = 0.0;       // E[(int |g| dt)^p]

    for (std::size_t path = 0; path < paths; ++path) {
        double sup = 0.0, quad = 0.0, ypg = 0.0, yg = 0.0, gabs = 0.0;
        for (std::size_t i = from; i <= last; ++i) sup = std::max(sup, std::abs(Y.at(path, i)));
        for (std::size_t i = from; i < last; ++i) {
            const double dt = grid.dt(i);
            const double ay = std::abs(Y.at(path, i));
            const double ag = std::abs(gvals.at(path, i));
            const double az = abs_vec(Z, path, i);
            quad += az * az * dt;
            ypg += std::pow(ay, p - 1.0) * ag * dt;
            yg += ay * ag * dt;
            gabs += ag * dt;
        }
        e_sup += std::pow(sup, p);
        e_quad += std::pow(quad, 0.5 * p);
        e_term += std::pow(std::abs(Y.at(path, last)), p);
        e_ypg += ypg;
        e_ygp2 += std::pow(yg, 0.5 * p);
        e_gp += std::pow(gabs, p);
    }
    e_sup /= n_paths;
    e_quad /= n_paths;
    e_term /= n_paths;
    e_ypg /= n_paths;
    e_ygp2 /= n_paths;
    e_gp /= n_paths;

    EstimateAudit audit;
    audit.inequality = inequality;
    audit.p = p;
    audit.paths = paths;
    if (inequality == "2.2") {
        audit.lhs = e_sup;
        audit.rhs_base = e_term + e_ypg;
    } else if (inequality == "2.3") {
        audit.lhs = e_quad;
        audit.rhs_base = e_term + e_ygp2 + e_sup;
    } else {
        audit.lhs = e_sup + e_quad;
        audit.rhs_base = e_term + e_gp;
    }
    const double tiny = 1e-300;
    if (audit.rhs_base <= tiny) {
        audit.degenerate = true;
        audit.implied_constant = 0.0;
    } else {
        audit.implied_constant = audit.lhs / audit.rhs_base;
    }
    return audit;
}

} // namespace bsde
