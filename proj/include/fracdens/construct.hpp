#pragma once

#include <memory>
#include <vector>

#include "fracdens/expr.hpp"

namespace fracdens {

// Absolute tolerance for |D^alpha u| on probe grids of functions that are stationary by construction.
constexpr double kStationaryTol = 1e-6;

// (-1)^{k-1}(3/4 - t)^k on (0, 3/4), its degree-(k-1) Taylor polynomial at 0 for t <= 0, zero after 3/4.
Expr make_psi0(const FractionalOrder& order);

// g(t) = (k!/Gamma(k-alpha+1)) [t^{k-alpha} - (t-3/4)^{k-alpha}] for t > 3/4, with all derivatives.
Expr block_source(const FractionalOrder& order);

struct KappaCheck {
    double closed_form = 0.0;  // k!(1 - 4^{alpha-k}) / (Gamma(alpha+1) Gamma(k-alpha+1))
    double quadrature = 0.0;   // nested quadrature of the defining double integral
    double delta = 0.0;
};

KappaCheck kappa_check(const FractionalOrder& order);
// Closed form after asserting agreement with the quadrature route to 1e-9.
double kappa(const FractionalOrder& order);

struct BuildingBlock {
    FractionalOrder order;
    Expr psi0;
    Expr g;
    Expr psi;  // psi0 on (-inf, 1], the Volterra representation of g on (1, inf)
    double kappa;
    double residual_max;  // max |D^alpha_{-inf} psi| over the build probe grid
};

// Cached per order; throws a construction failure when the residual or the kappa check fails.
std::shared_ptr<const BuildingBlock> build_psi(const FractionalOrder& order);

// v_j(t) = j^alpha psi(t/j + 1).
Expr scaled_family(const BuildingBlock& block, double j);

// max |D^alpha_{-inf} u(t)| over the grid; u must vanish to order k left of some point.
double stationarity_residual(const Expr& u, const FractionalOrder& order, const std::vector<double>& grid,
                             double rel_tol = 1e-10);

}  // namespace fracdens
