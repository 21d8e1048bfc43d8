#include "fracdens/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracdens/errors.hpp"

namespace fracdens {

double central_difference(const Expr& f, int n, double t, double h) {
    const int m = n - 1;
    return (-f.eval(m, t + 2 * h) + 8.0 * f.eval(m, t + h) - 8.0 * f.eval(m, t - h) + f.eval(m, t - 2 * h)) / (12.0 * h);
}

JetVector jet(const Expr& f, double p, int m, bool fd_check) {
    if (m < 0) throw_domain("jet: negative order");
    JetVector j{p, std::vector<double>(m + 1)};
    for (int l = 0; l <= m; ++l) j.values[l] = f.eval(l, p);
    if (fd_check) {
        for (int l = 1; l <= m; ++l) {
            const double fd = central_difference(f, l, p);
            if (!(std::abs(fd - j.values[l]) <= 1e-6 * std::max(1.0, std::abs(j.values[l])))) {
                std::ostringstream os;
                os << "jet: order " << l << " at " << p << " is " << j.values[l] << " but finite differences give " << fd;
                throw Error(ErrorCode::Accuracy, os.str());
            }
        }
    }
    return j;
}

Expr glue(const Expr& f, const Expr& g, double b, const FractionalOrder& order, double lower) {
    if (!(lower < b)) throw_domain("glue: lower bound must precede the knot");
    for (int j = 0; j < order.k; ++j) {
        const double fl = f.eval(j, b, Side::Left);
        const double gr = g.eval(j, b, Side::Right);
        const double mismatch = std::abs(fl - gr);
        if (!(mismatch <= 1e-9)) {
            std::ostringstream os;
            os << "glue: derivative of order " << j << " mismatches at b = " << b << " by " << mismatch;
            throw GluingError(os.str(), j, mismatch);
        }
    }
    std::vector<double> knots;
    std::vector<Expr> segs;
    if (auto* pf = as_piecewise(f); pf && (pf->knots.empty() || pf->knots.back() < b)) {
        knots = pf->knots;
        segs = pf->segments;
    } else {
        segs.push_back(f);
    }
    knots.push_back(b);
    if (auto* pg = as_piecewise(g); pg && (pg->knots.empty() || pg->knots.front() > b)) {
        knots.insert(knots.end(), pg->knots.begin(), pg->knots.end());
        segs.insert(segs.end(), pg->segments.begin(), pg->segments.end());
    } else {
        segs.push_back(g);
    }
    return piecewise(lower, std::move(knots), std::move(segs), order.k);
}

Expr taylor_extend(const Expr& u, double b, const FractionalOrder& order) {
    return piecewise(-kInf, {b}, {taylor_polynomial(u, b, order.k - 1), u}, order.k);
}

QuadratureResult kernel_integral(const Expr& u, int n, double lo, double hi, double t, double e, double rel_tol,
                                 bool absolute) {
    QuadratureResult total;
    if (!(hi > lo)) return total;
    std::vector<double> cuts{lo};
    for (double k : u.knots())
        if (k > lo && k < hi && !near_point(k, lo) && !near_point(k, hi)) cuts.push_back(k);
    cuts.push_back(hi);
    const bool right_singular = t - hi <= 1e-13 * std::max(1.0, std::abs(t));
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double l = cuts[i], r = cuts[i + 1];
        const double mid = 0.5 * (l + r);
        const auto beta = u.singular_power(l);
        double q = 0.0;
        if (beta) {
            q = *beta - n;
            if (!(q > -1.0)) {
                std::ostringstream os;
                os << "kernel integral: derivative of order " << n << " has a non-integrable singularity at " << l;
                throw Error(ErrorCode::Accuracy, os.str());
            }
        }
        const bool last = right_singular && i + 2 == cuts.size();
        auto f = [&](double tau) {
            const Side side = tau <= mid ? Side::Right : Side::Left;
            double v = beta ? u.eval_factored(n, tau, l, *beta, side) : u.eval(n, tau, side);
            if (!last && e != 0.0) v *= std::pow(t - tau, e);
            return absolute ? std::abs(v) : v;
        };
        SingularKernelSpec spec{l, r, last ? e : 0.0, q};
        QuadratureResult piece = integrate_singular(spec, f, rel_tol);
        total.value += piece.value;
        total.abs_error_estimate += piece.abs_error_estimate;
        total.evaluations += piece.evaluations;
    }
    return total;
}

namespace {

// Integral of |f^(k)| (t - tau)^e over a piece whose left end may hide an unknown singularity;
// contributions of dyadic shells toward the left end are summed while their ratio stays below one.
bool shell_integral(const Expr& f, int k, double l, double r, double t, double e, double& value) {
    const double w = r - l;
    value = kernel_integral(f, k, l + 0.5 * w, r, t, e, 1e-10, true).value;
    double prev = -1.0;
    int rising = 0;
    for (int i = 1; i <= 60; ++i) {
        const double a = l + w * std::ldexp(1.0, -(i + 1));
        const double b = l + w * std::ldexp(1.0, -i);
        const double s = kernel_integral(f, k, a, b, t, e, 1e-10, true).value;
        value += s;
        if (prev > 0.0) {
            const double ratio = s / prev;
            if (ratio > 0.95)
                ++rising;
            else
                rising = 0;
            if (rising >= 6) return false;
            if (s <= 1e-15 * value && ratio < 0.9) return true;
        }
        prev = s;
        if (s == 0.0 && i > 3) return true;
    }
    return rising == 0;
}

}  // namespace

MembershipReport membership_check(const Expr& f, double a, const FractionalOrder& order,
                                  const std::vector<double>& t_grid) {
    MembershipReport rep;
    rep.pass = true;
    const int k = order.k;
    const double e = order.kernel_exponent();
    double start = a;
    if (std::isinf(a)) {
        start = f.flat_left(k);
        if (start == -kInf) {
            rep.pass = false;
            rep.message = "no support boundary: the k-th derivative does not vanish near -infinity";
            return rep;
        }
    }
    for (double t : t_grid) {
        MembershipEntry entry{t, 0.0, true};
        if (!(t > start)) {
            rep.entries.push_back(entry);
            continue;
        }
        std::vector<double> cuts{start};
        for (double kn : f.knots())
            if (kn > start && kn < t && !near_point(kn, start) && !near_point(kn, t)) cuts.push_back(kn);
        cuts.push_back(t);
        try {
            for (std::size_t i = 0; i + 1 < cuts.size() && entry.converged; ++i) {
                const double l = cuts[i], r = cuts[i + 1];
                const auto beta = f.singular_power(l);
                if (beta) {
                    if (!(*beta - k > -1.0)) {
                        entry.converged = false;
                        break;
                    }
                    entry.value += kernel_integral(f, k, l, r, t, e, 1e-10, true).value;
                } else {
                    double v = 0.0;
                    entry.converged = shell_integral(f, k, l, r, t, e, v);
                    entry.value += v;
                }
            }
        } catch (const Error&) {
            entry.converged = false;
        }
        if (!entry.converged) {
            entry.value = kInf;
            rep.pass = false;
            std::ostringstream os;
            os << "divergent integral at t = " << t;
            rep.message = os.str();
        }
        rep.entries.push_back(entry);
    }
    return rep;
}

}  // namespace fracdens
