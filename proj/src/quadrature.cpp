#include "fracdens/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>

#include <Eigen/Dense>

#include "fracdens/errors.hpp"

namespace fracdens {

namespace {

// Golub-Welsch for the weight (1+x)^b on [-1, 1] in long double. The Jacobi matrix is shifted by
// the identity so that its eigenvalues are y = 1 + x, which keeps full relative precision for the
// nodes crowding the singular end.
GaussRule build_rule(int n, double b) {
    using LD = long double;
    using Mat = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
    const LD bb = b;
    Mat J = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const LD s = 2.0L * i + bb;
        J(i, i) = 1.0L + (i == 0 ? bb / (bb + 2.0L) : bb * bb / (s * (s + 2.0L)));
        if (i + 1 < n) {
            const LD k = i + 1.0L;
            const LD s2 = 2.0L * k + bb;
            const LD v = 4.0L * k * k * (k + bb) * (k + bb) / (s2 * s2 * (s2 + 1.0L) * (s2 - 1.0L));
            J(i, i + 1) = J(i + 1, i) = std::sqrt(v);
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::Accuracy, "gauss_jacobi_rule: eigensolver failed");
    const LD mu0 = std::pow(2.0L, bb + 1.0L) / (bb + 1.0L);
    GaussRule rule;
    for (int i = 0; i < n; ++i) {
        const LD y = std::max(es.eigenvalues()(i), 0.0L);
        const LD v = es.eigenvectors()(0, i);
        rule.y.push_back(static_cast<double>(y));
        rule.x.push_back(static_cast<double>(y - 1.0L));
        rule.w.push_back(static_cast<double>(mu0 * v * v));
    }
    return rule;
}

struct Panel {
    double d0;       // offset of the panel's near end from its anchor
    double w;        // width
    int side;        // 0: anchored at a, 1: anchored at b
    bool end_rule;   // starts at the anchor, which carries a singular weight
    double value = 0.0;
    double err = 0.0;
    double mass = 0.0;
};

struct PanelLess {
    bool operator()(const Panel& x, const Panel& y) const { return x.err < y.err; }
};

class Integrator {
public:
    Integrator(const SingularKernelSpec& s, Integrand f, int n) : s_(s), f_(f), n_(n), len_(s.b - s.a) {}

    void eval(Panel& pan) {
        double coarse = 0.0, fine = 0.0, mass = 0.0;
        run(pan, n_, coarse, nullptr);
        run(pan, 2 * n_, fine, &mass);
        pan.value = fine;
        pan.err = std::abs(fine - coarse);
        pan.mass = mass;
    }

    std::size_t evaluations = 0;

private:
    void run(const Panel& pan, int n, double& out, double* mass) {
        const double anchor_exp = pan.side == 0 ? s_.q : s_.p;
        const double other_exp = pan.side == 0 ? s_.p : s_.q;
        const bool jac = pan.end_rule;
        const GaussRule& r = gauss_jacobi_rule(n, jac ? anchor_exp : 0.0);
        const double hw = 0.5 * pan.w;
        double sum = 0.0, abs_sum = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            const double d_anchor = pan.d0 + hw * r.y[i];
            const double d_other = len_ - d_anchor;
            const double tau = pan.side == 0 ? s_.a + d_anchor : s_.b - d_anchor;
            double v = f_(tau);
            if (other_exp != 0.0) v *= std::pow(d_other, other_exp);
            if (!jac && anchor_exp != 0.0) v *= std::pow(d_anchor, anchor_exp);
            sum += r.w[i] * v;
            abs_sum += std::abs(r.w[i] * v);
        }
        evaluations += r.x.size();
        const double factor = jac ? std::pow(hw, anchor_exp + 1.0) : hw;
        out = factor * sum;
        if (mass) *mass = factor * abs_sum;
    }

    SingularKernelSpec s_;
    Integrand f_;
    int n_;
    double len_;
};

}  // namespace

const GaussRule& gauss_jacobi_rule(int n, double q) {
    if (n < 1) throw_domain("gauss_jacobi_rule: n must be positive");
    if (!(q > -1.0)) throw_domain("gauss_jacobi_rule: weight exponent must exceed -1");
    thread_local std::map<std::pair<int, double>, GaussRule> cache;
    auto key = std::make_pair(n, q);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, build_rule(n, q)).first->second;
}

QuadratureResult integrate_singular(const SingularKernelSpec& spec, Integrand f, double rel_tol,
                                    const QuadOptions& opts) {
    if (!(spec.b > spec.a) || !std::isfinite(spec.a) || !std::isfinite(spec.b))
        throw_domain("integrate_singular: need finite a < b");
    if (!(spec.p > -1.0) || !(spec.q > -1.0)) throw_domain("integrate_singular: exponents must exceed -1");
    if (!(rel_tol > 1e-14 && rel_tol < 1e-2)) throw_domain("integrate_singular: rel_tol outside (1e-14, 1e-2)");

    Integrator integ(spec, f, opts.nodes);
    const double len = spec.b - spec.a;
    std::priority_queue<Panel, std::vector<Panel>, PanelLess> heap;
    auto push = [&](Panel pan) {
        integ.eval(pan);
        heap.push(pan);
    };
    const bool left_sing = spec.q != 0.0, right_sing = spec.p != 0.0;
    if (left_sing && right_sing) {
        push({0.0, 0.5 * len, 0, true});
        push({0.0, 0.5 * len, 1, true});
    } else if (right_sing) {
        push({0.0, len, 1, true});
    } else {
        push({0.0, len, 0, left_sing});
    }

    auto totals = [&](double& val, double& err, double& mass) {
        val = err = mass = 0.0;
        auto copy = heap;
        while (!copy.empty()) {
            val += copy.top().value;
            err += copy.top().err;
            mass += copy.top().mass;
            copy.pop();
        }
    };

    double val = 0.0, err = 0.0, mass = 0.0;
    totals(val, err, mass);
    const double eps = std::numeric_limits<double>::epsilon();
    while (true) {
        const double target = std::max({rel_tol * std::abs(val), opts.atol, 64.0 * eps * mass});
        if (err <= target) break;
        if (heap.size() >= opts.max_panels) {
            std::ostringstream os;
            os << "integrate_singular: panel budget exhausted (estimate " << val << " +- " << err << ")";
            throw AccuracyError(os.str(), val, err);
        }
        Panel worst = heap.top();
        if (worst.w < 1e-15 * len) {
            std::ostringstream os;
            os << "integrate_singular: cannot refine further (estimate " << val << " +- " << err << ")";
            throw AccuracyError(os.str(), val, err);
        }
        heap.pop();
        val -= worst.value;
        err -= worst.err;
        mass -= worst.mass;
        Panel a{worst.d0, 0.5 * worst.w, worst.side, worst.end_rule};
        Panel b{worst.d0 + 0.5 * worst.w, 0.5 * worst.w, worst.side, false};
        integ.eval(a);
        integ.eval(b);
        heap.push(a);
        heap.push(b);
        val += a.value + b.value;
        err += a.err + b.err;
        mass += a.mass + b.mass;
        if (heap.size() % 64 == 0) totals(val, err, mass);
    }
    totals(val, err, mass);
    return {val, err, integ.evaluations};
}

QuadratureResult integrate_semiinfinite_truncated(Integrand f, double t, double support_left, double kernel_exponent,
                                                  double rel_tol) {
    if (!(support_left < t)) return {0.0, 0.0, 0};
    return integrate_singular({support_left, t, kernel_exponent, 0.0}, f, rel_tol);
}

}  // namespace fracdens
