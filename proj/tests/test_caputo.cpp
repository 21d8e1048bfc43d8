#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracdens/caputo.hpp"
#include "fracdens/errors.hpp"
#include "fracdens/formula.hpp"
#include "fracdens/funcspace.hpp"

using namespace fracdens;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

// Independent oracle for D_a^alpha u(t): double-exponential quadrature of u^(k)(tau)(t-tau)^(k-alpha-1).
double caputo_oracle(const std::function<double(double)>& uk, double a, const FractionalOrder& o, double t) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double e = o.kernel_exponent();
    auto g = [&](double x, double xc) {
        const double dist = x > 0.5 * (a + t) ? xc : t - x;
        return uk(x) * std::pow(dist, e);
    };
    return ts.integrate(g, a, t) / std::tgamma(o.k - o.alpha);
}

}  // namespace

TEST_CASE("closed forms") {
    SUBCASE("polynomials below degree k vanish") {
        const FractionalOrder o(3, 2.25);
        CHECK(caputo_eval(polynomial({1.0, -2.0, 4.0}), 0.0, o, 1.3) == 0.0);
    }
    SUBCASE("t^2 with alpha = 1.5") {
        CHECK(caputo_eval(polynomial({0.0, 0.0, 1.0}), 0.0, FractionalOrder(2, 1.5), 1.0) ==
              doctest::Approx(4.0 / kSqrtPi).epsilon(1e-12));
    }
    SUBCASE("(t-a)^alpha is constant") {
        const FractionalOrder o(1, 0.5);
        const Expr u = shifted_power(1.0, 0.0, 0.5);
        for (double t : {0.1, 1.0, 7.5}) CHECK(caputo_eval(u, 0.0, o, t) == doctest::Approx(std::tgamma(1.5)).epsilon(1e-10));
    }
    SUBCASE("monomials t^k") {
        for (const FractionalOrder o : {FractionalOrder(1, 0.5), FractionalOrder(2, 1.5), FractionalOrder(3, 2.25)}) {
            std::vector<double> c(o.k + 1, 0.0);
            c[o.k] = 1.0;
            const double kf = std::tgamma(o.k + 1.0);
            for (double t : {0.2, 0.9, 2.4}) {
                const double expect = kf * std::pow(t, o.k - o.alpha) / std::tgamma(o.k - o.alpha + 1.0);
                CHECK(std::abs(caputo_eval(polynomial(c), 0.0, o, t) - expect) < 1e-10 * expect);
            }
        }
    }
}

TEST_CASE("smooth functions against double-exponential quadrature") {
    const FractionalOrder o(2, 1.3);
    const Expr u = parse_formula("exp(-t)*sin(4t)");
    for (double t : {0.4, 1.1, 2.7}) {
        const double ref = caputo_oracle([&](double x) { return u.eval(2, x); }, -0.5, o, t);
        CHECK(std::abs(caputo_eval(u, -0.5, o, t) - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("initial point -inf needs a support boundary") {
    const FractionalOrder o(1, 0.5);
    try {
        caputo_eval(parse_formula("sin(t)"), -kInf, o, 1.0);
        FAIL("expected an unsupported-history error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedHistory);
    }
}

TEST_CASE("initial-point restriction") {
    // u^(k) = 0 left of a, so D_{-inf} and D_a agree right of a
    const FractionalOrder o(2, 1.5);
    const Expr u = taylor_extend(parse_formula("cos(3t)+t^3"), -0.3, o);
    for (double t : {0.0, 0.6, 1.9}) CHECK(std::abs(caputo_eval(u, -kInf, o, t) - caputo_eval(u, -0.3, o, t)) < 1e-10);
}

TEST_CASE("linearity") {
    const FractionalOrder o(1, 0.7);
    const Expr u1 = parse_formula("exp(t)"), u2 = polynomial({0.0, 1.0, -3.0, 1.0});
    const double t = 1.4;
    const double lhs = caputo_eval(linear_combo({3.0, -2.0}, {u1, u2}), 0.0, o, t);
    const double rhs = 3.0 * caputo_eval(u1, 0.0, o, t) - 2.0 * caputo_eval(u2, 0.0, o, t);
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("memory source") {
    const FractionalOrder o(2, 1.5);
    SUBCASE("low-degree history gives no source") {
        const Expr g = memory_source(polynomial({2.0, -1.0}), 0.0, 1.0, o);
        CHECK(g(1.5) == 0.0);
    }
    SUBCASE("t^k history") {
        const Expr g = memory_source(polynomial({0.0, 0.0, 1.0}), 0.0, 1.0, o);
        for (double t : {1.0, 1.7, 4.0}) {
            const double expect = -(2.0 / std::tgamma(1.5)) * (std::pow(t, 0.5) - std::pow(t - 1.0, 0.5));
            CHECK(g(t) == doctest::Approx(expect).epsilon(1e-12));
        }
        CHECK_THROWS_AS(g(0.5), Error);
    }
    SUBCASE("psi0 history") {
        const FractionalOrder o1(1, 0.5);
        const Expr g = memory_source(psi0_block(1), 0.0, 0.75, o1);
        CHECK(g(1.0) == doctest::Approx(0.5 / std::tgamma(1.5)).epsilon(1e-12));
    }
    SUBCASE("derivatives in t") {
        const Expr g = memory_source(parse_formula("sin(2t)"), -1.0, 0.0, o);
        for (int n = 1; n <= 3; ++n) CHECK(std::abs(g.eval(n, 0.8) - central_difference(g, n, 0.8)) < 1e-7);
    }
}

TEST_CASE("shift of the initial point") {
    const FractionalOrder o(2, 1.5);
    SUBCASE("constant") {
        const ShiftCheck c = shift_initial_point(constant(4.0), 0.0, 1.0, o, 2.0);
        CHECK(c.d_a == 0.0);
        CHECK(c.d_b == 0.0);
        CHECK(c.g == 0.0);
    }
    SUBCASE("t^2 from 0 to 1 at 2") {
        const ShiftCheck c = shift_initial_point(polynomial({0.0, 0.0, 1.0}), 0.0, 1.0, o, 2.0);
        CHECK(c.d_a == doctest::Approx(2.0 * std::sqrt(2.0) / std::tgamma(1.5)).epsilon(1e-12));
        CHECK(c.d_b == doctest::Approx(2.0 / std::tgamma(1.5)).epsilon(1e-12));
        CHECK(c.g == doctest::Approx(-(c.d_a - c.d_b)).epsilon(1e-12));
        CHECK(c.gap < 1e-12);
    }
    SUBCASE("random corpus") {
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> ua(-1.0, 0.0), ub(0.1, 1.0), ut(0.1, 1.5);
        const Expr corpus[] = {parse_formula("t^3"), parse_formula("exp(t)"), shifted_power(1.0, -3.0, 2.5),
                               parse_formula("cos(t)*t")};
        for (int i = 0; i < 10; ++i) {
            const double a = ua(rng), b = a + ub(rng), t = b + ut(rng);
            CHECK(shift_initial_point(corpus[i % 4], a, b, o, t, 1e-8).gap < 1e-8);
        }
    }
}

TEST_CASE("psi-Caputo derivative") {
    const FractionalOrder o(1, 0.5);
    SUBCASE("identity clock") {
        const PsiFunction id = make_psi(polynomial({0.0, 1.0}), true);
        const Expr u = parse_formula("exp(t)+t^2");
        for (double t : {0.5, 1.5}) CHECK(std::abs(psi_caputo_eval(u, 0.0, o, id, t) - caputo_eval(u, 0.0, o, t)) < 1e-10);
        const FractionalOrder o2(2, 1.5);
        CHECK(std::abs(psi_caputo_eval(u, -0.2, o2, id, 1.0) - caputo_eval(u, -0.2, o2, 1.0)) < 1e-10);
    }
    SUBCASE("(psi - psi(a))^alpha") {
        const PsiFunction psi = make_psi(parse_formula("t^3+t"), true);
        const double a = 0.2, pa = a * a * a + a;
        const Expr u = compose(shifted_power(1.0, pa, 0.5), psi);
        for (double t : {0.5, 1.0}) CHECK(psi_caputo_eval(u, a, o, psi, t) == doctest::Approx(std::tgamma(1.5)).epsilon(1e-9));
    }
    SUBCASE("constant") {
        const PsiFunction psi = make_psi(parse_formula("exp(t)"), false);
        CHECK(psi_caputo_eval(constant(2.0), 0.0, o, psi, 1.0) == 0.0);
    }
    SUBCASE("defining integral agrees with the change of variables") {
        const PsiFunction psi = make_psi(parse_formula("t^3+t"), true);
        const Expr u = parse_formula("sin(t)+t^2");
        for (const FractionalOrder ord : {FractionalOrder(1, 0.5), FractionalOrder(2, 1.5)})
            for (double t : {0.6, 1.3}) {
                const double lhs = psi_caputo_direct(u, 0.0, ord, psi, t);
                const double rhs = psi_caputo_eval(u, 0.0, ord, psi, t);
                CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
            }
    }
    SUBCASE("non-monotone clock") {
        try {
            make_psi(parse_formula("t^2"), false);
            FAIL("expected a monotonicity error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Monotonicity);
        }
    }
}

TEST_CASE("psi inverse") {
    const PsiFunction id{polynomial({0.0, 1.0}), true};
    CHECK(psi_inverse(id, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    const PsiFunction cubic{parse_formula("t^3+t"), true};
    CHECK(psi_inverse(cubic, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(psi_inverse(cubic, -500.0) - (-7.9)) < 0.05);
    const PsiFunction ex{parse_formula("exp(t)"), false};
    try {
        psi_inverse(ex, -1.0);
        FAIL("expected a range error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Range);
    }
}
