#include "fracdens/caputo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracdens/errors.hpp"
#include "fracdens/specfun.hpp"
#include "fracdens/taylor.hpp"

namespace fracdens {

namespace {

double history_start(const Expr& u, double a, int k) {
    if (!std::isinf(a)) return std::max(a, u.flat_left(k));
    const double l = u.flat_left(k);
    if (l == -kInf)
        throw Error(ErrorCode::UnsupportedHistory,
                    "caputo: initial point -inf needs an expression whose k-th derivative vanishes near -inf");
    return l;
}

class MemorySourceNode : public ExprNode {
public:
    MemorySourceNode(Expr phi, double a, double b, FractionalOrder order)
        : phi_(std::move(phi)), a_(a), b_(b), order_(order), start_(history_start(phi_, a, order.k)) {}
    std::string kind() const override { return "memory_source"; }
    double eval(int n, double t, Side) const override {
        if (t < b_) throw_domain("memory_source: evaluation left of b");
        const double e = order_.kernel_exponent();
        if (t == b_ && n > 0)
            throw Error(ErrorCode::BoundarySingularity, "memory_source: t-derivatives are unbounded at b");
        if (!(b_ > start_)) return 0.0;
        const double scale = -falling_factorial(e, n) / gamma_fn(order_.k - order_.alpha);
        return scale * kernel_integral(phi_, order_.k, start_, b_, t, e - n, kCaputoRelTol).value;
    }
    void collect_knots(std::vector<double>& out) const override { out.push_back(b_); }
    std::optional<double> singular_power(double point) const override {
        if (!near_point(point, b_)) return std::nullopt;
        return order_.k - order_.alpha;
    }
    json to_json() const override {
        json a = std::isinf(a_) ? json("-inf") : json(a_);
        return {{"type", "memory_source"}, {"a", a}, {"b", b_}, {"k", order_.k}, {"alpha", order_.alpha},
                {"history", phi_.to_json()}};
    }

private:
    Expr phi_;
    double a_, b_;
    FractionalOrder order_;
    double start_;
};

void check_monotone(const PsiFunction& psi, double lo, double hi) {
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double d = psi.expr.eval(1, x);
        if (!(d > 0.0)) {
            std::ostringstream os;
            os << "psi: derivative " << d << " is not positive at t = " << x;
            throw Error(ErrorCode::Monotonicity, os.str());
        }
    }
}

}  // namespace

double caputo_eval(const Expr& u, double a, const FractionalOrder& order, double t, double rel_tol) {
    if (!std::isinf(a) && !(t > a)) throw_domain("caputo_eval: need t > a");
    if (a == kInf) throw_domain("caputo_eval: initial point cannot be +inf");
    const double start = history_start(u, a, order.k);
    if (!(t > start)) return 0.0;
    const double e = order.kernel_exponent();
    return kernel_integral(u, order.k, start, t, t, e, rel_tol).value / gamma_fn(order.k - order.alpha);
}

Expr memory_source(const Expr& phi, double a, double b, const FractionalOrder& order) {
    if (!(b > a)) throw_domain("memory_source: need b > a");
    return Expr(std::make_shared<MemorySourceNode>(phi, a, b, order));
}

ShiftCheck shift_initial_point(const Expr& u, double a, double b, const FractionalOrder& order, double t, double tol) {
    if (!(t > b && b > a)) throw_domain("shift_initial_point: need t > b > a");
    ShiftCheck c;
    c.d_a = caputo_eval(u, a, order, t);
    c.d_b = caputo_eval(u, b, order, t);
    c.g = memory_source(u, a, b, order).eval(0, t);
    c.gap = std::abs(c.d_a - c.d_b + c.g);
    if (!(c.gap <= tol)) {
        std::ostringstream os;
        os << "shift_initial_point: D_a u - D_b u + g = " << c.gap << " exceeds " << tol;
        throw Error(ErrorCode::Accuracy, os.str());
    }
    return c;
}

PsiFunction make_psi(Expr expr, bool unbounded_below, Interval domain) {
    PsiFunction psi{std::move(expr), unbounded_below};
    check_monotone(psi, domain.lo, domain.hi);
    return psi;
}

double psi_caputo_eval(const Expr& u, double a, const FractionalOrder& order, const PsiFunction& psi, double t,
                       double rel_tol) {
    if (!(t > a)) throw_domain("psi_caputo_eval: need t > a");
    if (!std::isinf(a)) check_monotone(psi, a, t);
    const Expr w = compose_inverse(u, psi);
    const double pa = std::isinf(a) ? -kInf : psi.expr.eval(0, a);
    return caputo_eval(w, pa, order, psi.expr.eval(0, t), rel_tol);
}

double psi_caputo_direct(const Expr& u, double a, const FractionalOrder& order, const PsiFunction& psi, double t,
                         double rel_tol) {
    if (std::isinf(a) || !(t > a)) throw_domain("psi_caputo_direct: need finite a < t");
    check_monotone(psi, a, t);
    const int k = order.k;
    const double e = order.kernel_exponent();
    const double pt = psi.expr.eval(0, t);

    // ((1/psi') d/dtau)^k u at tau, by truncated Taylor arithmetic
    auto upsi = [&](double tau, Side side) {
        Taylor f(k), dpsi(k);
        for (int m = 0; m <= k; ++m) {
            f[m] = u.eval(m, tau, side) / factorial(m);
            dpsi[m] = psi.expr.eval(m + 1, tau, side) / factorial(m);
        }
        for (int i = 0; i < k; ++i) f = f.differentiate() / dpsi;
        return f[0];
    };

    std::vector<double> cuts{std::max(a, u.flat_left(k) == kInf ? t : a)};
    for (double kn : u.knots())
        if (kn > cuts.front() && kn < t && !near_point(kn, cuts.front()) && !near_point(kn, t)) cuts.push_back(kn);
    cuts.push_back(t);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double l = cuts[i], r = cuts[i + 1];
        const double mid = 0.5 * (l + r);
        const auto beta = u.singular_power(l);
        const double q = beta ? *beta - k : 0.0;
        const bool last = i + 2 == cuts.size();
        auto f = [&](double tau) {
            const Side side = tau <= mid ? Side::Right : Side::Left;
            double v = upsi(tau, side) * psi.expr.eval(1, tau, side);
            if (beta) v *= std::pow(tau - l, k - *beta);
            const double dpsi = pt - psi.expr.eval(0, tau, side);
            if (last)
                v *= std::pow(dpsi / (t - tau), e);
            else
                v *= std::pow(dpsi, e);
            return v;
        };
        total += integrate_singular({l, r, last ? e : 0.0, q}, f, rel_tol).value;
    }
    return total / gamma_fn(k - order.alpha);
}

}  // namespace fracdens
