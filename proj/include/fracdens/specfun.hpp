#pragma once

namespace fracdens {

// Gamma function for z > 0.
double gamma_fn(double z);
// log Gamma for z > 0.
double lgamma_fn(double z);

struct BetaArgs {
    double x;
    double y;
};

double beta_fn(BetaArgs args);
inline double beta_fn(double x, double y) { return beta_fn(BetaArgs{x, y}); }

// (alpha+i)(alpha+i-1)...(alpha+i-j+1) / (alpha(alpha+1)...(alpha+i))
double coeff_product(double alpha, int i, int j);

// x(x-1)...(x-n+1); 1 for n = 0.
double falling_factorial(double x, int n);

double factorial(int n);
double binomial(int n, int j);

}  // namespace fracdens
