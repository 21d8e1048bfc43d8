#pragma once

#include <cstddef>
#include <vector>

#include "fracdens/function_ref.hpp"

namespace fracdens {

// Integral of f(tau) (b - tau)^p (tau - a)^q over [a, b].
struct SingularKernelSpec {
    double a = 0.0;
    double b = 1.0;
    double p = 0.0;
    double q = 0.0;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct QuadOptions {
    double atol = 1e-14;
    std::size_t max_panels = 3000;
    int nodes = 16;  // coarse rule size; the fine rule uses twice as many
};

using Integrand = FunctionRef<double(double)>;

QuadratureResult integrate_singular(const SingularKernelSpec& spec, Integrand f, double rel_tol,
                                    const QuadOptions& opts = {});

// Integral over [support_left, t] of f(tau) (t - tau)^kernel_exponent, f vanishing left of support_left.
QuadratureResult integrate_semiinfinite_truncated(Integrand f, double t, double support_left, double kernel_exponent,
                                                  double rel_tol);

struct GaussRule {
    std::vector<double> x;
    std::vector<double> y;  // 1 + x, exact near the weighted end
    std::vector<double> w;
};

// Gauss rule on [-1, 1] for the weight (1 + x)^q; q = 0 gives Gauss-Legendre.
const GaussRule& gauss_jacobi_rule(int n, double q);

}  // namespace fracdens
