#include "fracdens/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracdens/errors.hpp"
#include "fracdens/specfun.hpp"
#include "fracdens/taylor.hpp"

namespace fracdens {

FractionalOrder::FractionalOrder(int k_, double alpha_) : k(k_), alpha(alpha_) {
    if (k < 1) throw_domain("order: k must be a positive integer");
    if (!(alpha > k - 1.0 && alpha < k)) {
        std::ostringstream os;
        os << "order: alpha = " << alpha << " must lie strictly inside (" << k - 1 << ", " << k << ")";
        throw_domain(os.str());
    }
}

bool near_point(double x, double y) {
    if (x == y) return true;
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

namespace {

[[noreturn]] void throw_nonsmooth(const char* what, double t, int n) {
    std::ostringstream os;
    os << what << ": derivative of order " << n << " at t = " << t << " differs across the knot";
    throw Error(ErrorCode::NonSmoothPoint, os.str());
}

// Evaluate at a knot: orders below `matched` agree by construction; higher orders must agree numerically.
template <class L, class R>
double at_knot(Side side, int n, int matched, double t, const char* what, L left, R right) {
    if (side == Side::Left) return left();
    if (side == Side::Right) return right();
    if (n < matched) return left();
    double l, r;
    try {
        l = left();
        r = right();
    } catch (const Error&) {
        throw_nonsmooth(what, t, n);
    }
    if (!(std::abs(l - r) <= 1e-9 * std::max({1.0, std::abs(l), std::abs(r)}))) throw_nonsmooth(what, t, n);
    return l;
}

json num(double x) {
    if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
    return json(x);
}

// ---------------------------------------------------------------- polynomial
class PolynomialNode : public ExprNode {
public:
    explicit PolynomialNode(PolynomialData d) : d_(std::move(d)) {
        while (!d_.coeffs.empty() && d_.coeffs.back() == 0.0) d_.coeffs.pop_back();
    }
    std::string kind() const override { return "polynomial"; }
    double eval(int n, double t, Side) const override {
        const int deg = static_cast<int>(d_.coeffs.size()) - 1;
        if (n > deg) return 0.0;
        const double x = t - d_.center;
        double r = 0.0;
        for (int i = deg; i >= n; --i) r = r * x + d_.coeffs[i] * falling_factorial(i, n);
        return r;
    }
    double flat_left(int n) const override {
        return n >= static_cast<int>(d_.coeffs.size()) ? kInf : -kInf;
    }
    json to_json() const override {
        return {{"type", "polynomial"}, {"center", d_.center}, {"coeffs", d_.coeffs}};
    }
    const PolynomialData& data() const { return d_; }

private:
    PolynomialData d_;
};

// ---------------------------------------------------------------- shifted power
class ShiftedPowerNode : public ExprNode {
public:
    ShiftedPowerNode(double c, double b, double g, bool clamp) : c_(c), b_(b), g_(g), clamp_(clamp) {}
    std::string kind() const override { return "shifted_power"; }
    bool integer_power() const { return g_ >= 0.0 && g_ == std::floor(g_); }
    double right_value(int n, double d) const {
        if (integer_power() && n > g_) return 0.0;
        return c_ * falling_factorial(g_, n) * std::pow(d, g_ - n);
    }
    double eval(int n, double t, Side side) const override {
        const double d = t - b_;
        if (d > 0.0) return right_value(n, d);
        if (d < 0.0) {
            if (!clamp_) throw_domain("shifted_power: evaluation left of the base point");
            return 0.0;
        }
        auto left = [&] {
            if (!clamp_) throw_domain("shifted_power: evaluation left of the base point");
            return 0.0;
        };
        auto right = [&]() -> double {
            if (integer_power()) return n == g_ ? c_ * factorial(n) : 0.0;
            if (g_ - n > 0.0) return 0.0;
            throw Error(ErrorCode::BoundarySingularity, "shifted_power: derivative unbounded at the base point");
        };
        return at_knot(side, n, 0, t, "shifted_power", left, right);
    }
    double flat_left(int n) const override {
        if (c_ == 0.0) return kInf;
        if (integer_power() && n > g_) return kInf;
        return clamp_ ? b_ : -kInf;
    }
    void collect_knots(std::vector<double>& out) const override { out.push_back(b_); }
    std::optional<double> singular_power(double point) const override {
        if (integer_power() || !near_point(point, b_)) return std::nullopt;
        return g_;
    }
    double eval_factored(int n, double, double, double, Side) const override {
        if (integer_power() && n > g_) return 0.0;
        return c_ * falling_factorial(g_, n);
    }
    json to_json() const override {
        return {{"type", "shifted_power"}, {"c", c_}, {"b", b_}, {"gamma", g_}, {"clamp", clamp_}};
    }

private:
    double c_, b_, g_;
    bool clamp_;
};

// ---------------------------------------------------------------- psi0 block
class Psi0Node : public ExprNode {
public:
    explicit Psi0Node(int k) : k_(k) {
        // degree-(k-1) Taylor polynomial of (-1)^{k-1}(3/4 - t)^k at 0
        const double sign = (k - 1) % 2 == 0 ? 1.0 : -1.0;
        std::vector<double> c(k);
        for (int j = 0; j < k; ++j)
            c[j] = sign * binomial(k, j) * std::pow(0.75, k - j) * (j % 2 == 0 ? 1.0 : -1.0);
        left_ = PolynomialNode({c, 0.0});
    }
    std::string kind() const override { return "psi0_block"; }
    double middle(int n, double t) const {
        if (n > k_) return 0.0;
        const double sign = ((k_ - 1 + n) % 2 == 0) ? 1.0 : -1.0;
        return sign * falling_factorial(k_, n) * std::pow(0.75 - t, k_ - n);
    }
    double eval(int n, double t, Side side) const override {
        if (t < 0.0) return left_.eval(n, t, side);
        if (t == 0.0)
            return at_knot(side, n, k_, t, "psi0_block", [&] { return left_.eval(n, t, side); },
                           [&] { return middle(n, t); });
        if (t < 0.75) return middle(n, t);
        if (t == 0.75) return at_knot(side, n, k_, t, "psi0_block", [&] { return middle(n, t); }, [] { return 0.0; });
        return 0.0;
    }
    double flat_left(int n) const override { return n >= k_ ? 0.0 : -kInf; }
    void collect_knots(std::vector<double>& out) const override {
        out.push_back(0.0);
        out.push_back(0.75);
    }
    json to_json() const override { return {{"type", "psi0_block"}, {"k", k_}}; }

private:
    int k_;
    PolynomialNode left_{PolynomialData{{}, 0.0}};
};

// ---------------------------------------------------------------- affine rescale
class AffineRescaleNode : public ExprNode {
public:
    AffineRescaleNode(Expr inner, double j, double shift, double power)
        : inner_(std::move(inner)), j_(j), shift_(shift), power_(power) {}
    std::string kind() const override { return "affine_rescale"; }
    double map(double t) const { return t / j_ + shift_; }
    double unmap(double y) const { return std::isinf(y) ? y : j_ * (y - shift_); }
    double eval(int n, double t, Side side) const override {
        return std::pow(j_, power_ - n) * inner_.eval(n, map(t), side);
    }
    int max_order() const override { return inner_.max_order(); }
    double flat_left(int n) const override { return unmap(inner_.flat_left(n)); }
    void collect_knots(std::vector<double>& out) const override {
        for (double y : inner_.knots()) out.push_back(unmap(y));
    }
    std::optional<double> singular_power(double point) const override { return inner_.singular_power(map(point)); }
    double eval_factored(int n, double t, double point, double beta, Side side) const override {
        return std::pow(j_, power_ - beta) * inner_.eval_factored(n, map(t), map(point), beta, side);
    }
    json to_json() const override {
        return {{"type", "affine_rescale"}, {"j", j_}, {"shift", shift_}, {"out_power", power_}, {"inner", inner_.to_json()}};
    }
    Expr rebuild(Expr inner) const { return Expr(std::make_shared<AffineRescaleNode>(std::move(inner), j_, shift_, power_)); }
    const Expr& inner() const { return inner_; }

private:
    Expr inner_;
    double j_, shift_, power_;
};

// ---------------------------------------------------------------- monomial rescale
class MonomialRescaleNode : public ExprNode {
public:
    MonomialRescaleNode(Expr inner, double delta, double p, int m)
        : inner_(std::move(inner)), delta_(delta), p_(p), m_(m) {}
    std::string kind() const override { return "monomial_rescale"; }
    double map(double t) const { return delta_ * t + p_; }
    double unmap(double y) const { return std::isinf(y) ? y : (y - p_) / delta_; }
    double eval(int n, double t, Side side) const override {
        return std::pow(delta_, n - m_) * inner_.eval(n, map(t), side);
    }
    int max_order() const override { return inner_.max_order(); }
    double flat_left(int n) const override { return unmap(inner_.flat_left(n)); }
    void collect_knots(std::vector<double>& out) const override {
        for (double y : inner_.knots()) out.push_back(unmap(y));
    }
    std::optional<double> singular_power(double point) const override { return inner_.singular_power(map(point)); }
    double eval_factored(int n, double t, double point, double beta, Side side) const override {
        return std::pow(delta_, beta - m_) * inner_.eval_factored(n, map(t), map(point), beta, side);
    }
    json to_json() const override {
        return {{"type", "monomial_rescale"}, {"delta", delta_}, {"p", p_}, {"m", m_}, {"inner", inner_.to_json()}};
    }
    Expr rebuild(Expr inner) const { return Expr(std::make_shared<MonomialRescaleNode>(std::move(inner), delta_, p_, m_)); }
    const Expr& inner() const { return inner_; }

private:
    Expr inner_;
    double delta_, p_;
    int m_;
};

// ---------------------------------------------------------------- linear combination
class LinearComboNode : public ExprNode {
public:
    LinearComboNode(std::vector<double> c, std::vector<Expr> parts) : c_(std::move(c)), parts_(std::move(parts)) {}
    std::string kind() const override { return "linear_combo"; }
    double eval(int n, double t, Side side) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            if (c_[i] != 0.0) s += c_[i] * parts_[i].eval(n, t, side);
        return s;
    }
    int max_order() const override {
        int m = kUnboundedOrder;
        for (const auto& p : parts_) m = std::min(m, p.max_order());
        return m;
    }
    double flat_left(int n) const override {
        double l = kInf;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            if (c_[i] != 0.0) l = std::min(l, parts_[i].flat_left(n));
        return l;
    }
    void collect_knots(std::vector<double>& out) const override {
        for (std::size_t i = 0; i < parts_.size(); ++i)
            if (c_[i] != 0.0) parts_[i].node().collect_knots(out);
    }
    std::optional<double> singular_power(double point) const override {
        std::optional<double> best;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (c_[i] == 0.0) continue;
            auto b = parts_[i].singular_power(point);
            if (b && (!best || *b < *best)) best = b;
        }
        return best;
    }
    double eval_factored(int n, double t, double point, double beta, Side side) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            if (c_[i] != 0.0) s += c_[i] * parts_[i].eval_factored(n, t, point, beta, side);
        return s;
    }
    json to_json() const override {
        json parts = json::array();
        for (const auto& p : parts_) parts.push_back(p.to_json());
        return {{"type", "linear_combo"}, {"coeffs", c_}, {"parts", parts}};
    }
    const std::vector<double>& coeffs() const { return c_; }
    const std::vector<Expr>& parts() const { return parts_; }

private:
    std::vector<double> c_;
    std::vector<Expr> parts_;
};

// ---------------------------------------------------------------- piecewise
class PiecewiseNode : public ExprNode {
public:
    explicit PiecewiseNode(PiecewiseData d) : d_(std::move(d)) {}
    std::string kind() const override { return "piecewise"; }
    std::size_t segment_of(double t) const {
        // first knot >= t; a segment covers (knot_{i-1}, knot_i]
        return static_cast<std::size_t>(std::lower_bound(d_.knots.begin(), d_.knots.end(), t) - d_.knots.begin());
    }
    double eval(int n, double t, Side side) const override {
        const std::size_t i = segment_of(t);
        if (i < d_.knots.size() && t == d_.knots[i]) {
            return at_knot(side, n, d_.match_order, t, "piecewise",
                           [&] { return d_.segments[i].eval(n, t, Side::Left); },
                           [&] { return d_.segments[i + 1].eval(n, t, Side::Right); });
        }
        return d_.segments[i].eval(n, t, side);
    }
    int max_order() const override {
        int m = kUnboundedOrder;
        for (const auto& s : d_.segments) m = std::min(m, s.max_order());
        return m;
    }
    double flat_left(int n) const override {
        for (std::size_t i = 0; i < d_.segments.size(); ++i) {
            const double lo = i == 0 ? -kInf : d_.knots[i - 1];
            const double hi = i < d_.knots.size() ? d_.knots[i] : kInf;
            const double l = d_.segments[i].flat_left(n);
            if (l >= hi) continue;
            return std::max(lo, l);
        }
        return kInf;
    }
    void collect_knots(std::vector<double>& out) const override {
        for (std::size_t i = 0; i < d_.segments.size(); ++i) {
            const double lo = i == 0 ? -kInf : d_.knots[i - 1];
            const double hi = i < d_.knots.size() ? d_.knots[i] : kInf;
            for (double y : d_.segments[i].knots())
                if (y > lo && y < hi) out.push_back(y);
        }
        out.insert(out.end(), d_.knots.begin(), d_.knots.end());
    }
    std::size_t segment_right_of(double point) const {
        return static_cast<std::size_t>(std::upper_bound(d_.knots.begin(), d_.knots.end(), point) - d_.knots.begin());
    }
    std::optional<double> singular_power(double point) const override {
        std::size_t i = segment_right_of(point);
        if (i > 0 && near_point(point, d_.knots[i - 1])) return d_.segments[i].singular_power(d_.knots[i - 1]);
        if (i < d_.knots.size() && near_point(point, d_.knots[i])) {
            if (i + 1 < d_.segments.size()) return d_.segments[i + 1].singular_power(d_.knots[i]);
        }
        return d_.segments[i].singular_power(point);
    }
    double eval_factored(int n, double t, double point, double beta, Side side) const override {
        std::size_t i = segment_of(t);
        if (i < d_.knots.size() && t == d_.knots[i] && side != Side::Left) ++i;
        return d_.segments[i].eval_factored(n, t, point, beta, side);
    }
    json to_json() const override {
        json knots = json::array();
        for (double k : d_.knots) knots.push_back(num(k));
        json segs = json::array();
        for (const auto& s : d_.segments) segs.push_back(s.to_json());
        return {{"type", "piecewise"}, {"lower", num(d_.lower)}, {"knots", knots}, {"segments", segs},
                {"match_order", d_.match_order}};
    }
    const PiecewiseData& data() const { return d_; }

private:
    PiecewiseData d_;
};

// ---------------------------------------------------------------- composition with a monotone clock
std::vector<double> taylor_coeffs_of(const Expr& e, int n, double t, Side side) {
    std::vector<double> d(n + 1);
    for (int m = 0; m <= n; ++m) d[m] = e.eval(m, t, side);
    return d;
}

Taylor series_of(const std::vector<double>& derivs) {
    Taylor s(static_cast<int>(derivs.size()) - 1);
    for (std::size_t m = 0; m < derivs.size(); ++m) s[static_cast<int>(m)] = derivs[m] / factorial(static_cast<int>(m));
    return s;
}

class ComposedNode : public ExprNode {
public:
    ComposedNode(Expr inner, PsiFunction psi, bool inverse) : inner_(std::move(inner)), psi_(std::move(psi)), inverse_(inverse) {}
    std::string kind() const override { return "composed"; }

    // Taylor series at t of the inner map (psi or psi^{-1}).
    Taylor map_series(int n, double t, Side side) const {
        if (!inverse_) return series_of(taylor_coeffs_of(psi_.expr, n, t, side));
        const double x0 = psi_inverse(psi_, t, {t - 1.0, t + 1.0});
        Taylor b = series_of(taylor_coeffs_of(psi_.expr, n, x0, side));
        std::vector<double> pd(n + 1);
        for (int m = 0; m <= n; ++m) pd[m] = b[m] * factorial(m);
        Taylor s(n);
        s[0] = x0;
        if (n >= 1) s[1] = 1.0 / b[1];
        for (int it = 1; it < n; ++it) {
            Taylor r = compose(pd, s);
            r[0] -= t;
            if (n >= 1) r[1] -= 1.0;
            r[0] = 0.0;
            s -= r * (1.0 / b[1]);
        }
        return s;
    }
    double eval(int n, double t, Side side) const override {
        if (n == 0) {
            const double x = inverse_ ? psi_inverse(psi_, t, {t - 1.0, t + 1.0}) : psi_.expr.eval(0, t, side);
            return inner_.eval(0, x, side);
        }
        Taylor s = map_series(n, t, side);
        std::vector<double> outer(n + 1);
        for (int m = 0; m <= n; ++m) outer[m] = inner_.eval(m, s[0], side);
        return compose(outer, s).derivative(n);
    }
    int max_order() const override { return std::min(inner_.max_order(), psi_.expr.max_order()); }
    double to_outer(double y) const {  // maps a point of the inner function's axis to t
        if (std::isinf(y)) return y;
        return inverse_ ? psi_.expr.eval(0, y) : psi_inverse(psi_, y, {y - 1.0, y + 1.0});
    }
    double flat_left(int n) const override {
        const double l = inner_.flat_left(std::min(n, 1));
        if (std::isinf(l)) return l;
        try {
            return to_outer(l);
        } catch (const Error&) {
            return -kInf;
        }
    }
    void collect_knots(std::vector<double>& out) const override {
        for (double y : inner_.knots()) {
            try {
                out.push_back(to_outer(y));
            } catch (const Error&) {
            }
        }
    }
    std::optional<double> singular_power(double point) const override {
        try {
            const double y = inverse_ ? psi_inverse(psi_, point, {point - 1.0, point + 1.0}) : psi_.expr.eval(0, point);
            return inner_.singular_power(y);
        } catch (const Error&) {
            return std::nullopt;
        }
    }
    json to_json() const override {
        return {{"type", "composed"}, {"inverse", inverse_}, {"inner", inner_.to_json()},
                {"warp", {{"expr", psi_.expr.to_json()}, {"unbounded_below", psi_.unbounded_below}}}};
    }
    const Expr& inner() const { return inner_; }
    Expr rebuild(Expr inner) const { return Expr(std::make_shared<ComposedNode>(std::move(inner), psi_, inverse_)); }
    const PsiFunction& psi() const { return psi_; }
    bool inverse() const { return inverse_; }

private:
    Expr inner_;
    PsiFunction psi_;
    bool inverse_;
};

// ---------------------------------------------------------------- sampled data
class SampledNode : public ExprNode {
public:
    SampledNode(std::vector<double> t, std::vector<double> f) : t_(std::move(t)), f_(std::move(f)) {}
    std::string kind() const override { return "sampled"; }
    double eval(int n, double t, Side) const override {
        if (n > 1) throw Error(ErrorCode::NonSmoothPoint, "sampled: only orders 0 and 1 are available");
        const double slack = 1e-12 * std::max(1.0, t_.back() - t_.front());
        if (t < t_.front() - slack || t > t_.back() + slack) throw_domain("sampled: evaluation outside the sample range");
        // local quadratic least-squares fit on the 5 nearest samples
        const std::size_t np = std::min<std::size_t>(5, t_.size());
        std::size_t c = static_cast<std::size_t>(std::lower_bound(t_.begin(), t_.end(), t) - t_.begin());
        std::size_t lo = c >= np / 2 ? c - np / 2 : 0;
        if (lo + np > t_.size()) lo = t_.size() - np;
        const int deg = np >= 3 ? 2 : static_cast<int>(np) - 1;
        double A[3][3] = {}, b[3] = {};
        for (std::size_t i = lo; i < lo + np; ++i) {
            const double x = t_[i] - t;
            const double pw[3] = {1.0, x, x * x};
            for (int r = 0; r <= deg; ++r) {
                b[r] += pw[r] * f_[i];
                for (int s = 0; s <= deg; ++s) A[r][s] += pw[r] * pw[s];
            }
        }
        // Gaussian elimination on the (deg+1)x(deg+1) normal equations
        const int m = deg + 1;
        for (int col = 0; col < m; ++col) {
            int piv = col;
            for (int r = col + 1; r < m; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            std::swap(A[col], A[piv]);
            std::swap(b[col], b[piv]);
            for (int r = col + 1; r < m; ++r) {
                const double f = A[r][col] / A[col][col];
                for (int s = col; s < m; ++s) A[r][s] -= f * A[col][s];
                b[r] -= f * b[col];
            }
        }
        double x[3] = {};
        for (int r = m - 1; r >= 0; --r) {
            double s = b[r];
            for (int q = r + 1; q < m; ++q) s -= A[r][q] * x[q];
            x[r] = s / A[r][r];
        }
        return n == 0 ? x[0] : (deg >= 1 ? x[1] : 0.0);
    }
    int max_order() const override { return 1; }
    json to_json() const override { return {{"type", "sampled"}, {"t", t_}, {"f", f_}}; }

private:
    std::vector<double> t_, f_;
};

}  // namespace

// ---------------------------------------------------------------- Expr

Expr::Expr() : node_(std::make_shared<PolynomialNode>(PolynomialData{{}, 0.0})) {}

double Expr::eval(int n, double t, Side side) const {
    if (n < 0) throw_domain("evaluate: negative derivative order");
    if (n > node_->max_order()) {
        std::ostringstream os;
        os << "evaluate: derivative order " << n << " exceeds the available order " << node_->max_order();
        throw Error(ErrorCode::NonSmoothPoint, os.str());
    }
    return node_->eval(n, t, side);
}

std::string Expr::kind() const { return node_->kind(); }
int Expr::max_order() const { return node_->max_order(); }
double Expr::flat_left(int n) const { return node_->flat_left(n); }

std::vector<double> Expr::knots() const {
    std::vector<double> k;
    node_->collect_knots(k);
    std::sort(k.begin(), k.end());
    std::vector<double> out;
    for (double x : k) {
        if (!std::isfinite(x)) continue;
        if (out.empty() || !near_point(out.back(), x)) out.push_back(x);
    }
    return out;
}

std::optional<double> Expr::singular_power(double point) const { return node_->singular_power(point); }

double Expr::eval_factored(int n, double t, double point, double beta, Side side) const {
    const auto own = node_->singular_power(point);
    if (own) {
        double r = node_->eval_factored(n, t, point, *own, side);
        if (*own != beta) r *= std::pow(t - point, *own - beta);
        return r;
    }
    return node_->eval(n, t, side) * std::pow(t - point, n - beta);
}

double ExprNode::eval_factored(int n, double t, double point, double beta, Side side) const {
    return eval(n, t, side) * std::pow(t - point, n - beta);
}

json Expr::to_json() const { return node_->to_json(); }

// ---------------------------------------------------------------- factories

Expr constant(double c) { return polynomial({c}); }

Expr polynomial(std::vector<double> coeffs, double center) {
    return Expr(std::make_shared<PolynomialNode>(PolynomialData{std::move(coeffs), center}));
}

Expr shifted_power(double c, double b, double gamma, bool clamp) {
    return Expr(std::make_shared<ShiftedPowerNode>(c, b, gamma, clamp));
}

Expr psi0_block(int k) {
    if (k < 1) throw_domain("psi0_block: k must be positive");
    return Expr(std::make_shared<Psi0Node>(k));
}

Expr affine_rescale(Expr inner, double j, double shift, double out_power) {
    if (!(j > 0.0)) throw_domain("affine_rescale: scale must be positive");
    return Expr(std::make_shared<AffineRescaleNode>(std::move(inner), j, shift, out_power));
}

Expr monomial_rescale(Expr inner, double delta, double p, int m) {
    if (!(delta > 0.0)) throw_domain("monomial_rescale: delta must be positive");
    return Expr(std::make_shared<MonomialRescaleNode>(std::move(inner), delta, p, m));
}

Expr linear_combo(std::vector<double> coeffs, std::vector<Expr> parts) {
    if (coeffs.size() != parts.size()) throw_domain("linear_combo: size mismatch");
    return Expr(std::make_shared<LinearComboNode>(std::move(coeffs), std::move(parts)));
}

Expr piecewise(double lower, std::vector<double> knots, std::vector<Expr> segments, int match_order) {
    if (segments.size() != knots.size() + 1) throw_domain("piecewise: need one more segment than interior knots");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1])) throw_domain("piecewise: knots must be strictly increasing");
    for (double k : knots)
        if (!std::isfinite(k)) throw_domain("piecewise: interior knots must be finite");
    if (!knots.empty() && !(lower < knots.front())) throw_domain("piecewise: lower bound must precede the knots");
    return Expr(std::make_shared<PiecewiseNode>(PiecewiseData{lower, std::move(knots), std::move(segments), match_order}));
}

Expr compose(Expr inner, const PsiFunction& warp) {
    if (auto* c = dynamic_cast<const ComposedNode*>(inner.ptr().get()))
        if (c->inverse() && c->psi().expr.ptr() == warp.expr.ptr()) return c->inner();
    return Expr(std::make_shared<ComposedNode>(std::move(inner), warp, false));
}

Expr compose_inverse(Expr inner, const PsiFunction& warp) {
    if (auto* c = dynamic_cast<const ComposedNode*>(inner.ptr().get()))
        if (!c->inverse() && c->psi().expr.ptr() == warp.expr.ptr()) return c->inner();
    return Expr(std::make_shared<ComposedNode>(std::move(inner), warp, true));
}

Expr sampled(std::vector<double> t, std::vector<double> f) {
    if (t.size() != f.size() || t.size() < 2) throw_domain("sampled: need at least two (t, f) pairs");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw_domain("sampled: sample abscissae must be strictly increasing");
    return Expr(std::make_shared<SampledNode>(std::move(t), std::move(f)));
}

Expr operator+(const Expr& a, const Expr& b) { return linear_combo({1.0, 1.0}, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return linear_combo({1.0, -1.0}, {a, b}); }
Expr operator*(double c, const Expr& a) { return linear_combo({c}, {a}); }

Expr taylor_polynomial(const Expr& u, double b, int degree) {
    std::vector<double> c(degree + 1);
    for (int j = 0; j <= degree; ++j) c[j] = u.eval(j, b, Side::Right) / factorial(j);
    return polynomial(std::move(c), b);
}

const PolynomialData* as_polynomial(const Expr& e) {
    auto* p = dynamic_cast<const PolynomialNode*>(e.ptr().get());
    return p ? &p->data() : nullptr;
}

bool is_zero(const Expr& e) {
    auto* p = as_polynomial(e);
    return p && p->coeffs.empty();
}

const PiecewiseData* as_piecewise(const Expr& e) {
    auto* p = dynamic_cast<const PiecewiseNode*>(e.ptr().get());
    return p ? &p->data() : nullptr;
}

namespace {

template <class Node>
bool split_wrapped(const Expr& e, double w, std::vector<std::pair<double, Expr>>& out);

void collect_terms(const Expr& e, double w, std::vector<std::pair<double, Expr>>& out) {
    if (w == 0.0) return;
    if (auto* lc = dynamic_cast<const LinearComboNode*>(e.ptr().get())) {
        for (std::size_t i = 0; i < lc->parts().size(); ++i) collect_terms(lc->parts()[i], w * lc->coeffs()[i], out);
        return;
    }
    if (split_wrapped<AffineRescaleNode>(e, w, out) || split_wrapped<MonomialRescaleNode>(e, w, out) ||
        split_wrapped<ComposedNode>(e, w, out))
        return;
    out.emplace_back(w, e);
}

template <class Node>
bool split_wrapped(const Expr& e, double w, std::vector<std::pair<double, Expr>>& out) {
    auto* r = dynamic_cast<const Node*>(e.ptr().get());
    if (!r) return false;
    std::vector<std::pair<double, Expr>> inner;
    collect_terms(r->inner(), 1.0, inner);
    if (inner.size() == 1 && inner.front().first == 1.0 && inner.front().second.ptr() == r->inner().ptr()) {
        out.emplace_back(w, e);
        return true;
    }
    for (auto& [c, leaf] : inner) out.emplace_back(w * c, r->rebuild(leaf));
    return true;
}

}  // namespace

std::vector<std::pair<double, Expr>> linear_terms(const Expr& e) {
    std::vector<std::pair<double, Expr>> out;
    collect_terms(e, 1.0, out);
    return out;
}

double psi_inverse(const PsiFunction& psi, double y, Interval bracket) {
    const Expr& f = psi.expr;
    double lo = bracket.lo, hi = bracket.hi;
    if (!(hi > lo)) throw_domain("psi_inverse: empty bracket");
    double flo = f.eval(0, lo) - y;
    for (int i = 0; flo > 0.0; ++i) {
        if (!psi.unbounded_below || i > 200) {
            std::ostringstream os;
            os << "psi_inverse: y = " << y << " lies below the reachable range of psi";
            throw Error(ErrorCode::Range, os.str());
        }
        const double w = hi - lo;
        hi = lo;
        lo -= 2.0 * w;
        flo = f.eval(0, lo) - y;
    }
    double fhi = f.eval(0, hi) - y;
    for (int i = 0; fhi < 0.0; ++i) {
        if (i > 200 || !std::isfinite(fhi)) {
            std::ostringstream os;
            os << "psi_inverse: y = " << y << " lies above the reachable range of psi";
            throw Error(ErrorCode::Range, os.str());
        }
        const double w = hi - lo;
        lo = hi;
        flo = fhi;
        hi += 2.0 * w;
        fhi = f.eval(0, hi) - y;
    }
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    double x = 0.5 * (lo + hi);
    const double ytol = 1e-12 * std::max(1.0, std::abs(y));
    for (int it = 0; it < 400; ++it) {
        const double fx = f.eval(0, x) - y;
        if (fx == 0.0) return x;
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
        const double d = f.eval(1, x);
        if (!(d > 0.0)) {
            std::ostringstream os;
            os << "psi_inverse: psi' = " << d << " is not positive at t = " << x;
            throw Error(ErrorCode::Monotonicity, os.str());
        }
        double nx = x - fx / d;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (nx == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            x = nx;
            break;
        }
        x = nx;
    }
    if (!(std::abs(f.eval(0, x) - y) <= ytol)) {
        std::ostringstream os;
        os << "psi_inverse: residual above tolerance at y = " << y;
        throw Error(ErrorCode::Accuracy, os.str());
    }
    return x;
}

}  // namespace fracdens
