#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "fracdens/errors.hpp"
#include "fracdens/quadrature.hpp"

using namespace fracdens;

namespace {

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// Independent oracle: double-exponential quadrature of the full weighted integrand.
template <class F>
double tanh_sinh(const SingularKernelSpec& s, F f) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double mid = 0.5 * (s.a + s.b);
    // xc is a - x near the left end and b - x near the right end, exact where x is not
    auto g = [&](double x, double xc) {
        const double left = x < mid ? -xc : x - s.a;
        const double right = x < mid ? s.b - x : xc;
        return f(x) * std::pow(right, s.p) * std::pow(left, s.q);
    };
    return ts.integrate(g, s.a, s.b);
}

const auto one = [](double) { return 1.0; };

}  // namespace

TEST_CASE("closed-form kernels") {
    CHECK(integrate_singular({0.0, 1.0, -0.5, 0.0}, one, 1e-12).value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(rel(integrate_singular({0.0, 1.0, -0.5, 0.5}, one, 1e-12).value, std::numbers::pi / 2) < 1e-12);
    const double scaled = 4.0 * boost::math::beta(1.7, 1.3);
    CHECK(rel(integrate_singular({0.0, 2.0, 0.3, 0.7}, one, 1e-12).value, scaled) < 1e-12);
}

TEST_CASE("beta consistency on random exponents") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-0.9, 2.0);
    for (int i = 0; i < 20; ++i) {
        const double p = d(rng), q = d(rng);
        const auto r = integrate_singular({0.0, 1.0, p, q}, one, 1e-10);
        CHECK(rel(r.value, boost::math::beta(q + 1.0, p + 1.0)) < 1e-10);
        CHECK(r.evaluations > 0);
        CHECK(std::isfinite(r.abs_error_estimate));
    }
}

TEST_CASE("smooth integrands against double-exponential quadrature") {
    const SingularKernelSpec specs[] = {{-1.0, 0.5, -0.7, 0.0}, {0.0, 3.0, 0.25, -0.4}, {1.0, 1.2, -0.95, -0.95}};
    auto f = [](double x) { return std::cos(3.0 * x) + x * x; };
    for (const auto& s : specs) CHECK(rel(integrate_singular(s, f, 1e-12).value, tanh_sinh(s, f)) < 1e-10);
}

TEST_CASE("linearity") {
    const SingularKernelSpec s{0.0, 1.0, -0.3, 0.6};
    auto f1 = [](double x) { return std::exp(x); };
    auto f2 = [](double x) { return std::sin(5.0 * x); };
    auto comb = [&](double x) { return 2.0 * f1(x) - 3.0 * f2(x); };
    const double lhs = integrate_singular(s, comb, 1e-12).value;
    const double rhs = 2.0 * integrate_singular(s, f1, 1e-12).value - 3.0 * integrate_singular(s, f2, 1e-12).value;
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(lhs));
}

TEST_CASE("affine covariance") {
    const double p = -0.45, q = 0.8, a = -2.0, b = 1.5;
    const double unit = integrate_singular({0.0, 1.0, p, q}, one, 1e-12).value;
    const double mapped = integrate_singular({a, b, p, q}, one, 1e-12).value;
    CHECK(rel(mapped, std::pow(b - a, p + q + 1.0) * unit) < 1e-12);
}

TEST_CASE("tightening the tolerance never moves away from the oracle") {
    const SingularKernelSpec s{0.0, 1.0, -0.8, -0.6};
    auto f = [](double x) { return 1.0 / (1.0 + 25.0 * (x - 0.3) * (x - 0.3)); };
    const double ref = tanh_sinh(s, f);
    double prev = INFINITY;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
        const double gap = std::abs(integrate_singular(s, f, tol).value - ref);
        CHECK(gap <= std::max(prev, 1e-14));
        CHECK(gap <= tol * std::abs(ref) + 1e-14);
        prev = gap;
    }
}

TEST_CASE("invalid specs") {
    CHECK_THROWS_AS(integrate_singular({1.0, 0.0, 0.0, 0.0}, one, 1e-8), Error);
    CHECK_THROWS_AS(integrate_singular({0.0, 1.0, -1.0, 0.0}, one, 1e-8), Error);
    CHECK_THROWS_AS(integrate_singular({0.0, 1.0, 0.0, 0.0}, one, 0.5), Error);
}

TEST_CASE("nonconvergence reports the best estimate") {
    QuadOptions tight;
    tight.max_panels = 2;
    auto wild = [](double x) { return std::sin(400.0 * x); };
    try {
        integrate_singular({0.0, 1.0, 0.0, 0.0}, wild, 1e-12, tight);
        FAIL("expected an accuracy error");
    } catch (const AccuracyError& e) {
        CHECK(e.code() == ErrorCode::Accuracy);
        CHECK(std::isfinite(e.best_estimate));
    }
}

TEST_CASE("truncated semi-infinite integrals") {
    auto zero = [](double) { return 0.0; };
    CHECK(integrate_semiinfinite_truncated(zero, 1.0, -5.0, -0.5, 1e-10).value == 0.0);
    auto two = [](double) { return 2.0; };
    CHECK(integrate_semiinfinite_truncated(two, 1.0, 0.0, -0.5, 1e-12).value == doctest::Approx(4.0).epsilon(1e-13));
    // psi0 block with k = 1: psi0' = -1 on (0, 3/4), zero elsewhere
    auto block = [](double x) { return x < 0.75 ? -1.0 : 0.0; };
    CHECK(integrate_semiinfinite_truncated(block, 1.0, 0.0, -0.5, 1e-8).value == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(integrate_semiinfinite_truncated(two, 1.0, 2.0, -0.5, 1e-10).value == 0.0);
}
