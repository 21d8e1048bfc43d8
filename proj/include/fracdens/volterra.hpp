#pragma once

#include <string>
#include <vector>

#include "fracdens/expr.hpp"

namespace fracdens {

constexpr double kVolterraRelTol = 1e-13;

// u(t) = (1/Gamma(alpha)) int_b^t g(tau) (t - tau)^(alpha-1) dtau for t > b, 0 for t <= b.
// The source g must be smooth on [b, inf) up to the orders requested.
Expr volterra_rep(Expr source, double b, const FractionalOrder& order);

// Direct quadrature of the representation integral.
double rep_value(const Expr& source, double b, const FractionalOrder& order, double t,
                 double rel_tol = kVolterraRelTol);

// n-th derivative by the boundary-term formulas: for n <= k the k-fold integration by parts,
// for n > k the expansion of d^n/dt^n int_0^{t-b} g(t - s) s^(alpha-1) ds.
double rep_derivative(const Expr& source, double b, const FractionalOrder& order, int n, double t,
                      double rel_tol = kVolterraRelTol);

// Same derivative with the expansion based at c = (b + t)/2; well conditioned for large t - b.
double rep_derivative_split(const Expr& source, double b, const FractionalOrder& order, int n, double t,
                            double rel_tol = kVolterraRelTol);

// Checks the n > k formula against finite differences once per process; throws on mismatch.
void validate_extended_derivatives();

struct DiscreteSolution {
    std::vector<double> t;
    std::vector<double> u;
    std::string warning;  // empty unless the step is too coarse for a trustworthy answer
};

// Product-trapezoid (fractional Adams-Moulton) march for D_b^alpha u = g with zero initial jet
// on the uniform grid b, b + h, ..., b + steps*h.
DiscreteSolution discrete_solve_oracle(const Expr& source, double b, const FractionalOrder& order, double h,
                                       int steps);

}  // namespace fracdens
