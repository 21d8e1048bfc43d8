#pragma once

#include <string>
#include <vector>

#include "fracdens/expr.hpp"
#include "fracdens/quadrature.hpp"

namespace fracdens {

struct JetVector {
    double base_point = 0.0;
    std::vector<double> values;  // derivatives of orders 0..m
};

// Derivatives 0..m at p; with fd_check, orders >= 1 are compared against 4th-order
// central differences of the next lower order (step 1e-4, mixed tolerance 1e-6).
JetVector jet(const Expr& f, double p, int m, bool fd_check = false);

// 4th-order central difference of the (n-1)-th derivative, approximating the n-th.
double central_difference(const Expr& f, int n, double t, double h = 1e-4);

// h = f on (lower, b], g on (b, inf); requires f^(j)(b) = g^(j)(b) for j < k to 1e-9.
Expr glue(const Expr& f, const Expr& g, double b, const FractionalOrder& order, double lower = -kInf);

// Degree-(k-1) Taylor polynomial of u at b on (-inf, b], u on (b, inf).
Expr taylor_extend(const Expr& u, double b, const FractionalOrder& order);

struct MembershipEntry {
    double t = 0.0;
    double value = 0.0;  // integral of |f^(k)(tau)| (t - tau)^(k-alpha-1); +inf when divergent
    bool converged = false;
};

struct MembershipReport {
    bool pass = false;
    std::vector<MembershipEntry> entries;
    std::string message;
};

MembershipReport membership_check(const Expr& f, double a, const FractionalOrder& order,
                                  const std::vector<double>& t_grid);

// Integral over [lo, hi] (hi <= t) of u^(n)(tau) (t - tau)^e, split at the knots of u with
// singular left endpoints absorbed into the quadrature weight.
QuadratureResult kernel_integral(const Expr& u, int n, double lo, double hi, double t, double e, double rel_tol,
                                 bool absolute = false);

}  // namespace fracdens
