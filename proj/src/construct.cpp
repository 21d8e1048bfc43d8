#include "fracdens/construct.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "fracdens/caputo.hpp"
#include "fracdens/errors.hpp"
#include "fracdens/funcspace.hpp"
#include "fracdens/quadrature.hpp"
#include "fracdens/specfun.hpp"
#include "fracdens/volterra.hpp"

namespace fracdens {

namespace {

// t^e - (t-c)^e without cancellation for t >> c.
double power_gap(double t, double c, double e) {
    if (t - c == 0.0) return std::pow(t, e);
    return -std::pow(t, e) * std::expm1(e * std::log1p(-c / t));
}

class BlockSourceNode : public ExprNode {
public:
    explicit BlockSourceNode(FractionalOrder order)
        : order_(order), beta_(order.k - order.alpha), scale_(factorial(order.k) / gamma_fn(beta_ + 1.0)) {}
    std::string kind() const override { return "block_source"; }
    double eval(int n, double t, Side) const override {
        if (!(t > 0.75)) throw_domain("block_source: defined for t > 3/4");
        return scale_ * falling_factorial(beta_, n) * power_gap(t, 0.75, beta_ - n);
    }
    json to_json() const override { return {{"type", "block_source"}, {"k", order_.k}, {"alpha", order_.alpha}}; }

private:
    FractionalOrder order_;
    double beta_, scale_;
};

}  // namespace

Expr make_psi0(const FractionalOrder& order) {
    const int k = order.k;
    std::vector<double> c(k + 1, 0.0);
    c[k] = -1.0;  // (-1)^{k-1}(3/4 - t)^k = -(t - 3/4)^k
    const Expr middle = polynomial(c, 0.75);
    const Expr left = taylor_polynomial(middle, 0.0, k - 1);
    const Expr lower = glue(left, middle, 0.0, order);
    return glue(lower, constant(0.0), 0.75, order);
}

Expr block_source(const FractionalOrder& order) { return Expr(std::make_shared<BlockSourceNode>(order)); }

KappaCheck kappa_check(const FractionalOrder& order) {
    const int k = order.k;
    const double alpha = order.alpha;
    KappaCheck c;
    c.closed_form = factorial(k) * (1.0 - std::pow(0.25, k - alpha)) / (gamma_fn(alpha + 1.0) * gamma_fn(k - alpha + 1.0));
    const Expr psi0 = make_psi0(order);
    const double inner = kernel_integral(psi0, k, 0.0, 0.75, 1.0, order.kernel_exponent(), 1e-13).value;
    auto one = [](double) { return 1.0; };
    const double outer = integrate_singular({0.0, 1.0, alpha - 1.0, 0.0}, one, 1e-13).value;
    c.quadrature = -inner * outer / (gamma_fn(alpha) * gamma_fn(k - alpha));
    c.delta = std::abs(c.closed_form - c.quadrature);
    return c;
}

double kappa(const FractionalOrder& order) {
    const KappaCheck c = kappa_check(order);
    if (!(c.delta <= 1e-9)) {
        std::ostringstream os;
        os << "kappa: closed form " << c.closed_form << " and quadrature " << c.quadrature << " differ by " << c.delta;
        throw Error(ErrorCode::ConstructionFailure, os.str());
    }
    if (!(c.closed_form > 0.0)) throw Error(ErrorCode::ConstructionFailure, "kappa: not positive");
    return c.closed_form;
}

double stationarity_residual(const Expr& u, const FractionalOrder& order, const std::vector<double>& grid,
                             double rel_tol) {
    double r = 0.0;
    for (double t : grid) r = std::max(r, std::abs(caputo_eval(u, -kInf, order, t, rel_tol)));
    return r;
}

std::shared_ptr<const BuildingBlock> build_psi(const FractionalOrder& order) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::shared_ptr<const BuildingBlock>> cache;
    const auto key = std::make_pair(order.k, order.alpha);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const Expr psi0 = make_psi0(order);
    const Expr g = block_source(order);
    const Expr psi = glue(psi0, volterra_rep(g, 1.0, order), 1.0, order);
    const double kap = kappa(order);
    const double res = stationarity_residual(psi, order, {1.25, 1.5, 2.0, 2.5, 3.0});
    if (!(res < kStationaryTol)) {
        std::ostringstream os;
        os << "build_psi: stationarity residual " << res << " exceeds " << kStationaryTol << " for k = " << order.k
           << ", alpha = " << order.alpha;
        throw Error(ErrorCode::ConstructionFailure, os.str());
    }
    auto block = std::make_shared<const BuildingBlock>(BuildingBlock{order, psi0, g, psi, kap, res});
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, block).first->second;
}

Expr scaled_family(const BuildingBlock& block, double j) {
    if (!(j > 0.0)) throw_domain("scaled_family: j must be positive");
    return affine_rescale(block.psi, j, 1.0, block.order.alpha);
}

}  // namespace fracdens
