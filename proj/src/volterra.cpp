#include "fracdens/volterra.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include "fracdens/errors.hpp"
#include "fracdens/funcspace.hpp"
#include "fracdens/quadrature.hpp"
#include "fracdens/specfun.hpp"

namespace fracdens {

namespace {

// Past this distance from b the split-base expansion replaces the literal one.
constexpr double kSplitDistance = 2.0;

// Boundary terms and regular integral of the n-th derivative, both without the 1/Gamma(alpha).
// With factored = true every term is multiplied by (t - b)^(n - alpha).
double rep_derivative_raw(const Expr& g, double b, const FractionalOrder& order, int n, double t, double rel_tol,
                          bool factored) {
    const int k = order.k;
    const double alpha = order.alpha;
    const double d = t - b;
    double bound = 0.0, integral = 0.0;
    if (n <= k) {
        for (int i = 0; i < k; ++i) {
            const double gi = g.eval(i, b, Side::Right);
            if (gi == 0.0) continue;
            bound += coeff_product(alpha, i, n) * gi * (factored ? std::pow(d, i) : std::pow(d, alpha + i - n));
        }
        double prod = 1.0;
        for (int r = 0; r <= k - 1 - n; ++r) prod *= alpha + r;
        integral = kernel_integral(g, k, b, t, t, alpha + k - 1 - n, rel_tol).value / prod;
    } else {
        for (int i = 0; i < n; ++i) {
            const double gi = g.eval(i, b, Side::Right);
            if (gi == 0.0) continue;
            const int m = n - 1 - i;
            bound += gi * falling_factorial(alpha - 1.0, m) * (factored ? std::pow(d, i) : std::pow(d, alpha - 1.0 - m));
        }
        integral = kernel_integral(g, n, b, t, t, alpha - 1.0, rel_tol).value;
    }
    if (factored) integral *= std::pow(d, n - alpha);
    return bound + integral;
}

class VolterraNode : public ExprNode {
public:
    VolterraNode(Expr g, double b, FractionalOrder order) : g_(std::move(g)), b_(b), order_(order) {}
    std::string kind() const override { return "volterra"; }
    double eval(int n, double t, Side side) const override {
        if (t < b_ || (t == b_ && side == Side::Left)) return 0.0;
        if (t == b_) {
            if (n < order_.k) return 0.0;
            throw Error(ErrorCode::BoundarySingularity, "volterra: derivative of order >= k is unbounded at b");
        }
        if (n == 0) return rep_value(g_, b_, order_, t);
        if (t - b_ > kSplitDistance) return rep_derivative_split(g_, b_, order_, n, t);
        return rep_derivative(g_, b_, order_, n, t);
    }
    int max_order() const override { return g_.max_order(); }
    double flat_left(int) const override { return is_zero(g_) ? kInf : b_; }
    void collect_knots(std::vector<double>& out) const override { out.push_back(b_); }
    std::optional<double> singular_power(double point) const override {
        if (!near_point(point, b_)) return std::nullopt;
        return order_.alpha;
    }
    double eval_factored(int n, double t, double point, double beta, Side side) const override {
        if (n == 0 || t <= b_ || t - b_ > kSplitDistance || !near_point(point, b_))
            return eval(n, t, side) * std::pow(t - point, n - beta);
        return rep_derivative_raw(g_, b_, order_, n, t, kVolterraRelTol, true) / gamma_fn(order_.alpha);
    }
    json to_json() const override {
        return {{"type", "volterra"}, {"b", b_}, {"k", order_.k}, {"alpha", order_.alpha}, {"source", g_.to_json()}};
    }

private:
    Expr g_;
    double b_;
    FractionalOrder order_;
};

std::once_flag g_validated;

}  // namespace

double rep_value(const Expr& source, double b, const FractionalOrder& order, double t, double rel_tol) {
    if (!(t > b)) return 0.0;
    const double alpha = order.alpha;
    auto f = [&](double tau) { return source.eval(0, tau, tau == b ? Side::Right : Side::Auto); };
    return integrate_singular({b, t, alpha - 1.0, 0.0}, f, rel_tol).value / gamma_fn(alpha);
}

double rep_derivative(const Expr& source, double b, const FractionalOrder& order, int n, double t, double rel_tol) {
    if (n < 0) throw_domain("rep_derivative: negative order");
    if (n == 0) return rep_value(source, b, order, t, rel_tol);
    if (t < b) return 0.0;
    if (t == b) {
        if (n < order.k) return 0.0;
        throw Error(ErrorCode::BoundarySingularity, "rep_derivative: derivative of order >= k is unbounded at b");
    }
    return rep_derivative_raw(source, b, order, n, t, rel_tol, false) / gamma_fn(order.alpha);
}

double rep_derivative_split(const Expr& source, double b, const FractionalOrder& order, int n, double t,
                            double rel_tol) {
    if (n == 0 || !(t > b)) return rep_derivative(source, b, order, n, t, rel_tol);
    const double alpha = order.alpha;
    const double c = b + 0.5 * (t - b);
    double s = falling_factorial(alpha - 1.0, n) * kernel_integral(source, 0, b, c, t, alpha - 1.0 - n, rel_tol).value;
    for (int i = 0; i < n; ++i) {
        const int m = n - 1 - i;
        s += source.eval(i, c) * falling_factorial(alpha - 1.0, m) * std::pow(t - c, alpha - 1.0 - m);
    }
    s += kernel_integral(source, n, c, t, t, alpha - 1.0, rel_tol).value;
    return s / gamma_fn(alpha);
}

void validate_extended_derivatives() {
    std::call_once(g_validated, [] {
        const double b = 1.0;
        const Expr g = shifted_power(1.0, b - 1.0, 0.5);
        for (const FractionalOrder order : {FractionalOrder(1, 0.5), FractionalOrder(2, 1.5)}) {
            const Expr u(std::make_shared<VolterraNode>(g, b, order));
            for (int n = order.k + 1; n <= order.k + 2; ++n) {
                for (double t : {b + 0.6, b + 1.3}) {
                    const double exact = rep_derivative(g, b, order, n, t);
                    const double fd = central_difference(u, n, t);
                    if (!(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)))) {
                        std::ostringstream os;
                        os << "volterra: extended derivative of order " << n << " at t = " << t << " gives " << exact
                           << ", finite differences give " << fd;
                        throw Error(ErrorCode::ConstructionFailure, os.str());
                    }
                }
            }
        }
    });
}

Expr volterra_rep(Expr source, double b, const FractionalOrder& order) {
    validate_extended_derivatives();
    return Expr(std::make_shared<VolterraNode>(std::move(source), b, order));
}

DiscreteSolution discrete_solve_oracle(const Expr& source, double b, const FractionalOrder& order, double h,
                                       int steps) {
    if (!(h > 0.0) || steps < 1) throw_domain("discrete_solve_oracle: need h > 0 and at least one step");
    const double alpha = order.alpha;
    DiscreteSolution sol;
    sol.t.resize(steps + 1);
    sol.u.assign(steps + 1, 0.0);
    std::vector<double> g(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        sol.t[i] = b + i * h;
        g[i] = source.eval(0, sol.t[i], Side::Right);
    }
    // weights of the product trapezoid rule; the source does not depend on u, so the corrector is exact
    const double scale = std::pow(h, alpha) / std::tgamma(alpha + 2.0);
    std::vector<double> pw(steps + 2);
    for (int i = 0; i <= steps + 1; ++i) pw[i] = std::pow(static_cast<double>(i), alpha + 1.0);
    for (int n = 0; n < steps; ++n) {
        double s = g[n + 1];
        s += (pw[n] - (n - alpha) * std::pow(n + 1.0, alpha)) * g[0];
        for (int j = 1; j <= n; ++j) s += (pw[n - j + 2] + pw[n - j] - 2.0 * pw[n - j + 1]) * g[j];
        sol.u[n + 1] = scale * s;
    }
    if (h > 0.05) {
        std::ostringstream os;
        os << "step " << h << " exceeds 0.05; the O(h^2) trapezoid error may dominate";
        sol.warning = os.str();
    }
    return sol;
}

}  // namespace fracdens
