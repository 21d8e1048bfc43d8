#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracdens/caputo.hpp"
#include "fracdens/construct.hpp"
#include "fracdens/errors.hpp"

using namespace fracdens;

namespace {

const FractionalOrder kOrders[] = {FractionalOrder(1, 0.5), FractionalOrder(2, 1.5), FractionalOrder(3, 2.25)};

// -(1/Gamma(k-alpha)) int_0^{3/4} psi0^(k)(tau) (t-tau)^{k-alpha-1} dtau, psi0^(k) = -k! on (0, 3/4).
double memory_oracle(const FractionalOrder& o, double t) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double e = o.k - o.alpha - 1.0;
    const double kfact = std::tgamma(o.k + 1.0);
    auto f = [&](double tau) { return kfact * std::pow(t - tau, e); };
    return ts.integrate(f, 0.0, 0.75) / std::tgamma(o.k - o.alpha);
}

}  // namespace

TEST_CASE("psi0") {
    const FractionalOrder o(2, 1.5);
    const Expr p = make_psi0(o);
    CHECK(p(0.5) == doctest::Approx(-0.0625));
    CHECK(p(0.75) == 0.0);
    CHECK(p(2.0) == 0.0);
    // left branch is the linear Taylor polynomial at 0
    CHECK(p(-1.0) == doctest::Approx(-0.5625 - 1.5).epsilon(1e-14));
    CHECK(p.eval(2, -1.0) == 0.0);
    CHECK(p.eval(1, 0.0) == doctest::Approx(1.5));
}

TEST_CASE("block source") {
    CHECK(block_source(FractionalOrder(1, 0.5))(1.0) == doctest::Approx(0.5641896).epsilon(1e-7));
    CHECK(block_source(FractionalOrder(2, 1.5))(1.0) == doctest::Approx(1.1283792).epsilon(1e-7));
    for (const auto& o : kOrders) {
        const Expr g = block_source(o);
        for (double t : {0.8, 1.0, 1.7, 4.0, 50.0}) {
            const double ref = memory_oracle(o, t);
            CHECK(std::abs(g(t) - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
        }
        CHECK_THROWS_AS(g(0.7), Error);
    }
}

TEST_CASE("block source cancels the memory of psi0") {
    for (const auto& o : kOrders) {
        const Expr p = make_psi0(o);
        const Expr g = block_source(o);
        for (double t : {1.0, 1.5, 3.0})
            CHECK(std::abs(caputo_eval(p, -kInf, o, t) + g(t)) < 1e-9);
    }
}

TEST_CASE("kappa") {
    const KappaCheck a = kappa_check(FractionalOrder(1, 0.5));
    CHECK(a.closed_form == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(a.delta < 1e-9);
    const KappaCheck b = kappa_check(FractionalOrder(2, 1.5));
    CHECK(b.closed_form == doctest::Approx(8.0 / (3.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(b.delta < 1e-9);
    for (double alpha : {0.1, 0.3, 0.7, 0.95, 2.05, 2.5, 2.9}) {
        const FractionalOrder o(static_cast<int>(std::ceil(alpha)), alpha);
        const KappaCheck c = kappa_check(o);
        CHECK(c.closed_form > 0.0);
        CHECK(c.delta < 1e-9);
        CHECK(kappa(o) == c.closed_form);
    }
}

TEST_CASE("building block") {
    for (const auto& o : kOrders) {
        CAPTURE(o.alpha);
        const auto blk = build_psi(o);
        CHECK(build_psi(o) == blk);  // cached
        CHECK(blk->kappa == kappa(o));
        for (int n = 0; n < o.k; ++n) CHECK(std::abs(blk->psi.eval(n, 1.0)) < 1e-14);
        CHECK(blk->psi(0.9) == 0.0);
        CHECK(blk->psi(1.001) > 0.0);
        CHECK(blk->psi(1.5) > 0.0);
        CHECK(std::abs(caputo_eval(blk->psi, -kInf, o, 2.0, 1e-10)) < 1e-7);
        CHECK(blk->residual_max < kStationaryTol);
        // leading behaviour psi(1 + eps) ~ kappa eps^alpha
        const double eps = 1e-4;
        CHECK(blk->psi(1.0 + eps) / std::pow(eps, o.alpha) == doctest::Approx(blk->kappa).epsilon(5e-3));
    }
}

TEST_CASE("rescaled family") {
    const FractionalOrder o(2, 1.5);
    const auto blk = build_psi(o);
    CHECK_THROWS_AS(scaled_family(*blk, 0.0), Error);
    for (double j : {1.0, 2.0, 8.0}) {
        const Expr v = scaled_family(*blk, j);
        CHECK(v(-j / 8.0) == 0.0);
        CHECK(v(0.3) == doctest::Approx(std::pow(j, o.alpha) * blk->psi(0.3 / j + 1.0)).epsilon(1e-14));
        // chain rule v' = j^(alpha-1) psi'(t/j + 1) against finite differences
        const double t = 0.7, h = 1e-5;
        const double num = (v(t + h) - v(t - h)) / (2.0 * h);
        CHECK(std::abs(v.eval(1, t) - num) < 1e-6);
        CHECK(v.eval(1, t) == doctest::Approx(std::pow(j, o.alpha - 1.0) * blk->psi.eval(1, t / j + 1.0)).epsilon(1e-13));
        std::vector<double> grid;
        for (int i = 0; i <= 10; ++i) grid.push_back(0.1 + 0.29 * i);
        CHECK(stationarity_residual(v, o, grid) < kStationaryTol);
    }
    // v_j(t) -> kappa t^alpha as j grows
    double prev = kInf;
    for (double j : {4.0, 16.0, 64.0, 256.0}) {
        const double gap = std::abs(scaled_family(*blk, j)(1.0) - blk->kappa);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 0.05);
}
