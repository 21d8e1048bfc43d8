#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracdens {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kUnboundedOrder = 1 << 20;

// The pair (k, alpha) with alpha in (k-1, k).
struct FractionalOrder {
    int k;
    double alpha;
    FractionalOrder(int k, double alpha);
    // kernel exponent k - alpha - 1 of the Caputo integral
    double kernel_exponent() const { return k - alpha - 1.0; }
};

// Which one-sided limit to take when t sits exactly on a knot.
// Auto returns the common value, or raises a non-smooth-point error when the sides differ.
enum class Side { Auto, Left, Right };

class ExprNode;

// Immutable handle to a node of the function-expression tree.
class Expr {
public:
    Expr();  // the zero function
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

    double operator()(double t) const { return eval(0, t); }
    double eval(int n, double t, Side side = Side::Auto) const;

    const ExprNode& node() const { return *node_; }
    const std::shared_ptr<const ExprNode>& ptr() const { return node_; }
    std::string kind() const;

    int max_order() const;
    double flat_left(int n) const;
    std::vector<double> knots() const;  // sorted, deduplicated
    std::optional<double> singular_power(double point) const;
    double eval_factored(int n, double t, double point, double beta, Side side = Side::Auto) const;
    json to_json() const;

private:
    std::shared_ptr<const ExprNode> node_;
};

class ExprNode {
public:
    virtual ~ExprNode() = default;
    virtual std::string kind() const = 0;
    virtual double eval(int n, double t, Side side) const = 0;
    virtual int max_order() const { return kUnboundedOrder; }
    // L such that the n-th derivative vanishes on (-inf, L); +inf if it vanishes everywhere, -inf if no such L.
    virtual double flat_left(int /*n*/) const { return -kInf; }
    virtual void collect_knots(std::vector<double>& /*out*/) const {}
    // beta such that right of point the n-th derivative is (t-point)^(beta-n) times a smooth factor.
    virtual std::optional<double> singular_power(double /*point*/) const { return std::nullopt; }
    // n-th derivative times (t-point)^(n-beta), computed without forming the singular factor when possible.
    virtual double eval_factored(int n, double t, double point, double beta, Side side) const;
    virtual json to_json() const = 0;
};

// Monotone clock for the psi-Caputo derivative.
struct PsiFunction {
    Expr expr;
    bool unbounded_below = false;  // lim psi(t) = -inf as t -> -inf
};

struct Interval {
    double lo;
    double hi;
};

bool near_point(double x, double y);

// Factories for the core variants.
Expr constant(double c);
Expr polynomial(std::vector<double> coeffs, double center = 0.0);  // sum c_i (t - center)^i
Expr shifted_power(double c, double b, double gamma, bool clamp = true);
Expr psi0_block(int k);
Expr affine_rescale(Expr inner, double j, double shift, double out_power);
Expr monomial_rescale(Expr inner, double delta, double p, int m);
Expr linear_combo(std::vector<double> coeffs, std::vector<Expr> parts);
Expr piecewise(double lower, std::vector<double> knots, std::vector<Expr> segments, int match_order);
Expr compose(Expr inner, const PsiFunction& warp);          // inner(psi(t))
Expr compose_inverse(Expr inner, const PsiFunction& warp);  // inner(psi^{-1}(t))
Expr sampled(std::vector<double> t, std::vector<double> f);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(double c, const Expr& a);

// Taylor polynomial of degree `degree` of u at b.
Expr taylor_polynomial(const Expr& u, double b, int degree);

double psi_inverse(const PsiFunction& psi, double y, Interval bracket = {-1.0, 1.0});

// Node accessors used by the serializer and the simplifier.
struct PolynomialData {
    std::vector<double> coeffs;
    double center;
};
const PolynomialData* as_polynomial(const Expr& e);
bool is_zero(const Expr& e);

// Piecewise with lower bound, interior knots and segments; a segment covers (knot_{i-1}, knot_i].
struct PiecewiseData {
    double lower;
    std::vector<double> knots;
    std::vector<Expr> segments;
    int match_order;
};
const PiecewiseData* as_piecewise(const Expr& e);

// Splits linear combinations, also under affine and monomial rescalings and compositions, into weighted leaves:
// e = sum w_i leaf_i.
std::vector<std::pair<double, Expr>> linear_terms(const Expr& e);

}  // namespace fracdens
