#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracdens/construct.hpp"
#include "fracdens/expr.hpp"

namespace fracdens {

constexpr int kErrorGridPoints = 2001;  // uniform grid on [0,1] for C^h measurements
constexpr int kResidualProbePoints = 21;  // uniform probe grid on [0,2] for |D^alpha u|
constexpr double kSpanResidualTol = 1e-8;
constexpr int kMaxFitDegree = 64;

struct JetSpanSolution {
    int m = 0;
    double p = 1.0;
    std::vector<double> scales;
    std::vector<double> coefficients;
    Expr v;
    double R = 0.0;  // v^(k) vanishes on (-inf, -R)
    double residual = 0.0;  // max |jet(v, p, m) - e_m|
    double condition_number = 0.0;
};

// Stationary v with jet (0, ..., 0, 1) at p, as a combination of the rescaled family v_j.
// Tries the scales 2^i (i = 1..m+1) at p, then an enriched scale set, then the retry points.
JetSpanSolution span_jet(int m, const FractionalOrder& order, double p, const BuildingBlock& block);

struct MonomialApproximant {
    int m = 0;
    Expr u;  // v(delta t + p) / delta^m
    double a = 0.0;  // support boundary (-R - p)/delta
    double delta = 0.0;
    double error = 0.0;  // measured C^h([0,1]) distance to t^m/m!
    JetSpanSolution span;
};

MonomialApproximant monomial_approximant(int m, const FractionalOrder& order, double epsilon_m,
                                         const BuildingBlock& block, int h);

struct PolynomialFit {
    std::vector<double> coeffs;  // a_m of sum a_m t^m/m!
    int degree = 0;
    double error = 0.0;  // C^h error on the measurement grid
};

PolynomialFit fit_polynomial(const Expr& target, int h, double epsilon_fit);

enum class Strategy { Auto, Jet, LeastSquares };

struct ApproxRequest {
    Expr target;
    int h = 0;
    FractionalOrder order{1, 0.5};
    double epsilon = 1e-2;
    Strategy strategy = Strategy::Auto;
    int jobs = 1;
};

struct ApproximationResult {
    Expr u;
    double a = 0.0;
    double measured_error = 0.0;
    std::vector<double> error_by_order;  // sup |u^(l) - f^(l)| for l = 0..h
    double residual_max = 0.0;
    std::string method;  // "jet" or "least_squares"
    json provenance;
};

ApproximationResult approximate(const ApproxRequest& req);

// Transports the target through psi, approximates on [0,1] and composes back.
ApproximationResult approximate_psi(const ApproxRequest& req, const PsiFunction& psi);

// Sum over l = 0..h of max |u^(l) - f^(l)| on a uniform grid of [0,1].
double ch_error(const Expr& u, const Expr& f, int h, int points = kErrorGridPoints,
                std::vector<double>* by_order = nullptr);

// max |D^alpha_{-inf} u| on the probe grid of [0,2], summing the leaves of u term by term.
double residual_max(const Expr& u, const FractionalOrder& order, int jobs = 1);

// D^alpha_{-inf} u at each grid point, evaluated leaf by leaf over linear_terms(u).
std::vector<double> residual_curve(const Expr& u, const FractionalOrder& order, const std::vector<double>& grid,
                                   int jobs = 1);

// D_a^{alpha,psi} u at each grid point, leaf by leaf; leaves of the form w o psi reduce to Caputo derivatives of w.
std::vector<double> psi_residual_curve(const Expr& u, double a, const FractionalOrder& order, const PsiFunction& psi,
                                       const std::vector<double>& grid, int jobs = 1);

// Runs body(i) for i in [0, n) on up to `jobs` threads; exceptions are rethrown in index order.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

}  // namespace fracdens
