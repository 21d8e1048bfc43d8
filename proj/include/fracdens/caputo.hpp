#pragma once

#include "fracdens/expr.hpp"
#include "fracdens/funcspace.hpp"

namespace fracdens {

constexpr double kCaputoRelTol = 1e-12;

// D_a^alpha u(t); a may be -inf when u^(k) vanishes left of some point.
double caputo_eval(const Expr& u, double a, const FractionalOrder& order, double t, double rel_tol = kCaputoRelTol);

// g(t) = -(1/Gamma(k-alpha)) int_a^b phi^(k)(tau) (t - tau)^(k-alpha-1) dtau, as an expression on [b, inf).
Expr memory_source(const Expr& phi, double a, double b, const FractionalOrder& order);

struct ShiftCheck {
    double d_a = 0.0;  // D_a^alpha u(t)
    double d_b = 0.0;  // D_b^alpha u(t)
    double g = 0.0;    // memory source at t
    double gap = 0.0;  // |D_a - D_b + g|
};

// Evaluates the three terms of D_a u = D_b u - g; throws an accuracy error when the gap exceeds tol.
ShiftCheck shift_initial_point(const Expr& u, double a, double b, const FractionalOrder& order, double t,
                               double tol = 1e-8);

// Validated clock: psi' > 0 sampled on `domain`.
PsiFunction make_psi(Expr expr, bool unbounded_below, Interval domain = {-1.0, 2.0});

// D_a^{alpha,psi} u(t) = D_{psi(a)}^alpha (u o psi^{-1})(psi(t)).
double psi_caputo_eval(const Expr& u, double a, const FractionalOrder& order, const PsiFunction& psi, double t,
                       double rel_tol = kCaputoRelTol);

// Same quantity from the defining integral with u_psi^(k) = ((1/psi') d/dtau)^k u and weight psi'(tau).
double psi_caputo_direct(const Expr& u, double a, const FractionalOrder& order, const PsiFunction& psi, double t,
                         double rel_tol = kCaputoRelTol);

}  // namespace fracdens
