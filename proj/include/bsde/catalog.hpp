#pragma once

#include <string>
#include <vector>

#include "bsde/generator.hpp"

namespace bsde {

// Reference problems, addressable by name from the CLI and the tests.
//
//   zero          g = 0                          xi = B_T      (all assumptions)
//   one           g = 1                          xi = B_T
//   linear        g = 0.5 y                      xi = B_T      closed form e^{0.5(T-t)} B_t
//   linear_strong g = 4 y                        xi = B_T      stress case for the contraction monitor
//   absz          g = |z|   (d = 1)              xi = B_T      closed form B_t + (T - t)
//   example31     g = u|y| + v|z| with the first-passage indicator coefficients
//                 u_t = |B_{t0}| 1_{(t0,tau1]},  v_t = |B_{t0}| 1_{(t0,tau2]}   xi = B_T
//   sqrty         g = sqrt(min(|y|,1))           xi = |B_T|    continuous, non-Lipschitz (H5)+(H6)
//   sqrty_shift   g = sqrt(min(|y|,1)) + 0.5     xi = |B_T|    ordered partner of sqrty
//   ucz           g = 0.5 y + sqrt(min(|z|,1))   xi = B_T      (H7): Lipschitz in y, uniformly continuous in z
//   quadz_bad     g = |z|^2 declared (H1)        xi = B_T      deliberate mis-declaration; audits must fail
//
// Overriding xi: pass one of "default", "BT", "absBT", "zero", "const:<v>".
struct CatalogOptions {
    double M = 0.0;          // 0 = per-entry default
    std::string xi = "default";
    double example31_t0 = 0.25;
};

std::vector<std::string> catalog_names();

Problem make_catalog_problem(const std::string& name, const BrownianLattice& lattice, double p,
                             const CatalogOptions& options = {});

// Terminal-condition builders shared with the config front end.
std::vector<double> make_xi(const std::string& spec, const BrownianLattice& lattice);

} // namespace bsde
