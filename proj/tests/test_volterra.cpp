#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracdens/caputo.hpp"
#include "fracdens/construct.hpp"
#include "fracdens/errors.hpp"
#include "fracdens/formula.hpp"
#include "fracdens/volterra.hpp"

using namespace fracdens;

namespace {

double fd4(const std::function<double(double)>& f, double t, double h) {
    return (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) / (12.0 * h);
}

// Independent representation value by double-exponential quadrature.
double rep_oracle(const std::function<double(double)>& g, double b, double alpha, double t) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double x, double xc) {
        const double dist = x > 0.5 * (b + t) ? xc : t - x;
        return g(x) * std::pow(dist, alpha - 1.0);
    };
    return ts.integrate(f, b, t) / std::tgamma(alpha);
}

}  // namespace

TEST_CASE("representation values") {
    const FractionalOrder o(2, 1.5);
    CHECK(rep_value(constant(0.0), 0.0, o, 1.3) == 0.0);
    CHECK(rep_value(constant(1.0), 0.0, o, 1.0) == doctest::Approx(1.0 / std::tgamma(2.5)).epsilon(1e-13));
    const double expect = (4.0 / 3.0) / std::sqrt(std::numbers::pi);
    CHECK(rep_value(polynomial({0.0, 1.0}), 0.0, FractionalOrder(1, 0.5), 1.0) == doctest::Approx(expect).epsilon(1e-13));
    const Expr g = parse_formula("exp(-t)*cos(3t)+1");
    for (double t : {0.3, 1.2, 2.5}) {
        const double ref = rep_oracle([&](double x) { return g(x); }, 0.2, 1.5, t);
        CHECK(std::abs(rep_value(g, 0.2, o, t) - ref) < 1e-11 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("representation node below and at the initial point") {
    const FractionalOrder o(2, 1.5);
    const Expr u = volterra_rep(parse_formula("1+t"), 0.5, o);
    CHECK(u(0.2) == 0.0);
    CHECK(u(0.5) == 0.0);
    CHECK(u.eval(1, 0.5) == 0.0);
    CHECK_THROWS_AS(u.eval(2, 0.5), Error);
}

TEST_CASE("derivative formulas") {
    SUBCASE("constant source, first derivative") {
        CHECK(rep_derivative(constant(1.0), 0.0, FractionalOrder(2, 1.5), 1, 1.0) ==
              doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-13));
    }
    SUBCASE("constant source, n = k keeps only the boundary term") {
        const FractionalOrder o(2, 1.5);
        for (double t : {0.5, 1.0, 3.0}) {
            const double expect = 3.0 * std::pow(t, o.alpha - 2.0) / std::tgamma(o.alpha - 1.0);
            CHECK(rep_derivative(constant(3.0), 0.0, o, 2, t) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("finite differences of the value, n <= 3") {
        const Expr g = parse_formula("cos(2t)+t");
        for (const FractionalOrder o : {FractionalOrder(1, 0.5), FractionalOrder(2, 1.5), FractionalOrder(3, 2.25)}) {
            const Expr u = volterra_rep(g, 0.0, o);
            for (double t : {0.4, 1.0, 1.8})
                for (int n = 1; n <= 3; ++n) {
                    const double an = rep_derivative(g, 0.0, o, n, t);
                    const double num = fd4([&](double x) { return u.eval(n - 1, x); }, t, 1e-4);
                    CHECK(std::abs(an - num) <= 1e-6 * std::max(1.0, std::abs(an)));
                }
        }
    }
    SUBCASE("split-base route agrees with the direct formulas") {
        const Expr g = parse_formula("1/(1+t)");
        const FractionalOrder o(2, 1.5);
        for (int n = 0; n <= 4; ++n)
            for (double t : {1.5, 3.0, 6.0}) {
                const double d = rep_derivative(g, 0.0, o, n, t);
                CHECK(std::abs(rep_derivative_split(g, 0.0, o, n, t) - d) < 1e-10 * std::max(1.0, std::abs(d)));
            }
    }
    SUBCASE("extended recursion self-validation") { CHECK_NOTHROW(validate_extended_derivatives()); }
    SUBCASE("boundary singularity") {
        try {
            rep_derivative(constant(1.0), 0.0, FractionalOrder(1, 0.5), 1, 0.0);
            FAIL("expected a boundary singularity");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BoundarySingularity);
        }
    }
}

TEST_CASE("zero initial jet") {
    const FractionalOrder o(3, 2.25);
    const Expr g = parse_formula("2+sin(t)");
    for (int n = 0; n <= 2; ++n) {
        double prev_scaled = 0.0;
        for (double s : {1e-2, 1e-3, 1e-4}) {
            const double v = std::abs(rep_derivative(g, 0.0, o, n, s));
            const double scaled = v / std::pow(s, o.alpha - n);
            CHECK(v < std::pow(s, o.alpha - n) * 10.0);
            if (prev_scaled > 0.0) CHECK(std::abs(scaled / prev_scaled - 1.0) < 0.05);  // bounded ratio
            prev_scaled = scaled;
        }
    }
}

TEST_CASE("defining equation") {
    for (const FractionalOrder o : {FractionalOrder(1, 0.5), FractionalOrder(2, 1.5)}) {
        const Expr g = parse_formula("exp(-t)+t^2");
        const double b = 0.25;
        const Expr u = volterra_rep(g, b, o);
        double worst = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double t = b + 0.1 * i;
            worst = std::max(worst, std::abs(caputo_eval(u, b, o, t) - g(t)));
        }
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("discrete march") {
    const FractionalOrder o(1, 0.5);
    SUBCASE("zero source") {
        const auto d = discrete_solve_oracle(constant(0.0), 0.0, o, 0.01, 50);
        for (double v : d.u) CHECK(v == 0.0);
        CHECK(d.warning.empty());
    }
    SUBCASE("constant source is reproduced") {
        const auto d = discrete_solve_oracle(constant(1.0), 0.0, o, 0.01, 100);
        for (std::size_t i = 0; i < d.t.size(); ++i)
            CHECK(std::abs(d.u[i] - std::pow(d.t[i], 0.5) / std::tgamma(1.5)) < 1e-12);
    }
    SUBCASE("second-order convergence on a smooth source") {
        const Expr g = parse_formula("cos(3t)");
        const FractionalOrder o2(2, 1.5);
        double gaps[2];
        int idx = 0;
        for (double h : {0.02, 0.01}) {
            const auto d = discrete_solve_oracle(g, 0.0, o2, h, static_cast<int>(std::lround(1.0 / h)));
            gaps[idx++] = std::abs(d.u.back() - rep_value(g, 0.0, o2, 1.0));
        }
        CHECK(gaps[1] < gaps[0] / 3.0);
    }
    SUBCASE("building-block source on [1, 2]") {
        const FractionalOrder o1(1, 0.5);
        const auto d = discrete_solve_oracle(block_source(o1), 1.0, o1, 1e-3, 1000);
        double worst = 0.0;
        for (int i = 50; i <= 1000; i += 50) worst = std::max(worst, std::abs(d.u[i] - rep_value(block_source(o1), 1.0, o1, d.t[i])));
        CHECK(worst < 1e-4);
    }
    SUBCASE("coarse step warns") {
        const auto d = discrete_solve_oracle(constant(1.0), 0.0, o, 0.1, 10);
        CHECK_FALSE(d.warning.empty());
    }
}
