#include "fracdens/approximate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "fracdens/caputo.hpp"
#include "fracdens/errors.hpp"
#include "fracdens/funcspace.hpp"
#include "fracdens/specfun.hpp"

namespace fracdens {

namespace {

constexpr double kSpanCondLimit = 1e10;
constexpr double kDeltaFloor = 1e-8;
constexpr int kDeltaRiseLimit = 3;     // consecutive halvings with growing error before giving up
constexpr double kCoefficientCap = 1e9;  // largest sum |c| accepted from the least-squares scan
constexpr int kFitStride = 5;            // least-squares rows use every 5th grid point
constexpr double kResidualRelTol = 1e-12;

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> uniform(double lo, double hi, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    x.back() = hi;
    return x;
}

// d[l][i] = f^(l)(grid[i])
std::vector<std::vector<double>> grid_derivatives(const Expr& f, int h, const std::vector<double>& grid) {
    std::vector<std::vector<double>> d(h + 1, std::vector<double>(grid.size()));
    for (int l = 0; l <= h; ++l)
        for (std::size_t i = 0; i < grid.size(); ++i) d[l][i] = f.eval(l, grid[i]);
    return d;
}

double ch_distance(const std::vector<std::vector<double>>& u, const std::vector<std::vector<double>>& f,
                   std::vector<double>* by_order) {
    double total = 0.0;
    if (by_order) by_order->assign(u.size(), 0.0);
    for (std::size_t l = 0; l < u.size(); ++l) {
        double m = 0.0;
        for (std::size_t i = 0; i < u[l].size(); ++i) m = std::max(m, std::abs(u[l][i] - f[l][i]));
        if (!std::isfinite(m)) m = kInf;
        total += m;
        if (by_order) (*by_order)[l] = m;
    }
    return total;
}

Expr monomial(int m) {
    std::vector<double> c(m + 1, 0.0);
    c[m] = 1.0 / factorial(m);
    return polynomial(c);
}

// Sum over l <= h of sup_{[0,1]} |(t^m/m!)^(l)|.
double monomial_norm(int m, int h) {
    double s = 0.0;
    for (int l = 0; l <= std::min(h, m); ++l) s += 1.0 / factorial(m - l);
    return s;
}

struct SpanAttempt {
    double p;
    std::vector<double> scales;
};

JetSpanSolution solve_span(int m, const SpanAttempt& at, const BuildingBlock& block) {
    const int n = static_cast<int>(at.scales.size());
    std::vector<Expr> parts;
    Eigen::MatrixXd M(m + 1, n);
    for (int i = 0; i < n; ++i) {
        parts.push_back(scaled_family(block, at.scales[i]));
        for (int l = 0; l <= m; ++l) M(l, i) = parts[i].eval(l, at.p);
    }
    Eigen::VectorXd norms = M.colwise().norm().transpose();
    for (int i = 0; i < n; ++i)
        if (norms(i) == 0.0) norms(i) = 1.0;
    const Eigen::MatrixXd A = M * norms.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const int rank_dim = std::min(m + 1, n);
    JetSpanSolution s;
    s.m = m;
    s.p = at.p;
    s.scales = at.scales;
    s.condition_number = sv(rank_dim - 1) > 0.0 ? sv(0) / sv(rank_dim - 1) : kInf;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m + 1);
    e(m) = 1.0;
    const Eigen::VectorXd y = svd.solve(e);
    s.coefficients.resize(n);
    for (int i = 0; i < n; ++i) s.coefficients[i] = y(i) / norms(i);
    s.v = linear_combo(s.coefficients, parts);
    s.R = *std::max_element(at.scales.begin(), at.scales.end());
    s.residual = 0.0;
    for (int l = 0; l <= m; ++l) s.residual = std::max(s.residual, std::abs(s.v.eval(l, at.p) - (l == m ? 1.0 : 0.0)));
    if (!std::isfinite(s.residual)) s.residual = kInf;
    return s;
}

std::vector<double> enriched_scales(int m) {
    std::vector<double> s;
    for (int e = -4; e <= 2 * (m + 1) + 2; ++e) s.push_back(std::pow(2.0, 0.5 * e));
    return s;
}

}  // namespace

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    if (n <= 0) return;
    jobs = std::max(1, std::min(jobs, n));
    std::vector<std::exception_ptr> errors(n);
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (int i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double ch_error(const Expr& u, const Expr& f, int h, int points, std::vector<double>* by_order) {
    const auto grid = uniform(0.0, 1.0, points);
    return ch_distance(grid_derivatives(u, h, grid), grid_derivatives(f, h, grid), by_order);
}

std::vector<double> residual_curve(const Expr& u, const FractionalOrder& order, const std::vector<double>& grid,
                                   int jobs) {
    const auto terms = linear_terms(u);
    std::vector<double> r(grid.size(), 0.0);
    parallel_for(static_cast<int>(grid.size()), jobs, [&](int i) {
        double s = 0.0;
        for (const auto& [w, leaf] : terms) s += w * caputo_eval(leaf, -kInf, order, grid[i], kResidualRelTol);
        r[i] = s;
    });
    return r;
}

std::vector<double> psi_residual_curve(const Expr& u, double a, const FractionalOrder& order, const PsiFunction& psi,
                                       const std::vector<double>& grid, int jobs) {
    const auto terms = linear_terms(u);
    std::vector<double> r(grid.size(), 0.0);
    parallel_for(static_cast<int>(grid.size()), jobs, [&](int i) {
        double s = 0.0;
        for (const auto& [w, leaf] : terms) s += w * psi_caputo_eval(leaf, a, order, psi, grid[i], kResidualRelTol);
        r[i] = s;
    });
    return r;
}

double residual_max(const Expr& u, const FractionalOrder& order, int jobs) {
    return max_abs(residual_curve(u, order, uniform(0.0, 2.0, kResidualProbePoints), jobs));
}

JetSpanSolution span_jet(int m, const FractionalOrder& order, double p, const BuildingBlock& block) {
    if (m < 0) throw_domain("span_jet: m must be nonnegative");
    if (!(p > 0.0)) throw_domain("span_jet: p must be positive");
    if (order.k != block.order.k || order.alpha != block.order.alpha) throw_domain("span_jet: block built for another order");
    std::vector<SpanAttempt> attempts;
    std::vector<double> base;
    for (int i = 1; i <= m + 1; ++i) base.push_back(std::ldexp(1.0, i));
    attempts.push_back({p, base});
    if (m > 0) {
        attempts.push_back({p, enriched_scales(m)});
        for (double q : {0.5, 2.0, 4.0})
            if (q != p) attempts.push_back({q, enriched_scales(m)});
    }
    std::optional<JetSpanSolution> fallback;
    std::ostringstream report;
    for (const auto& at : attempts) {
        JetSpanSolution s = solve_span(m, at, block);
        report << " [p=" << at.p << ", " << at.scales.size() << " scales: cond " << s.condition_number << ", residual "
               << s.residual << "]";
        if (s.residual <= kSpanResidualTol) {
            if (s.condition_number <= kSpanCondLimit) return s;
            if (!fallback || s.condition_number < fallback->condition_number) fallback = s;
        }
    }
    if (fallback) return *fallback;
    std::ostringstream os;
    os << "span_jet: no candidate set reaches jet residual " << kSpanResidualTol << " for m = " << m << ";"
       << report.str();
    throw StageError(ErrorCode::SpanFailure, os.str(), "span", kInf);
}

MonomialApproximant monomial_approximant(int m, const FractionalOrder& order, double epsilon_m,
                                         const BuildingBlock& block, int h) {
    if (!(epsilon_m > 0.0)) throw_domain("monomial_approximant: epsilon must be positive");
    MonomialApproximant out;
    out.m = m;
    out.span = span_jet(m, order, 1.0, block);
    const auto grid = uniform(0.0, 1.0, kErrorGridPoints);
    const auto q = grid_derivatives(monomial(m), h, grid);
    double best = kInf, prev = kInf;
    int rises = 0;
    for (double delta = 0.5; delta >= kDeltaFloor; delta *= 0.5) {
        const Expr u = monomial_rescale(out.span.v, delta, out.span.p, m);
        const double err = ch_distance(grid_derivatives(u, h, grid), q, nullptr);
        if (err < best) {
            best = err;
            out.u = u;
            out.delta = delta;
            out.error = err;
        }
        if (err < epsilon_m) {
            out.a = (-out.span.R - out.span.p) / delta;
            return out;
        }
        rises = err > prev ? rises + 1 : 0;
        if (rises >= kDeltaRiseLimit) break;
        prev = err;
    }
    std::ostringstream os;
    os << "monomial_approximant: m = " << m << " reaches C^" << h << " error " << best << " (delta = " << out.delta
       << "), budget " << epsilon_m;
    throw StageError(ErrorCode::ApproximationFailure, os.str(), "delta-selection", best);
}

PolynomialFit fit_polynomial(const Expr& target, int h, double epsilon_fit) {
    if (!(epsilon_fit > 0.0)) throw_domain("fit_polynomial: epsilon must be positive");
    const auto grid = uniform(0.0, 1.0, kErrorGridPoints);
    const auto f = grid_derivatives(target, h, grid);
    PolynomialFit best;
    best.error = kInf;
    for (int n = 0; n <= kMaxFitDegree; ++n) {
        // Chebyshev interpolation at the n+1 first-kind points, x = 2t - 1
        const int np = n + 1;
        std::vector<double> fx(np), c(np, 0.0);
        for (int i = 0; i < np; ++i) fx[i] = target.eval(0, 0.5 * (std::cos(M_PI * (i + 0.5) / np) + 1.0));
        for (int j = 0; j < np; ++j) {
            long double s = 0.0L;
            for (int i = 0; i < np; ++i) s += fx[i] * std::cos(M_PI * j * (i + 0.5) / np);
            c[j] = static_cast<double>(s * (j == 0 ? 1.0L : 2.0L) / np);
        }
        // T_j(2t - 1) in powers of t
        std::vector<long double> mono(np, 0.0L), tprev(np, 0.0L), tcur(np, 0.0L);
        tprev[0] = 1.0L;
        mono[0] += c[0];
        if (np > 1) {
            tcur[0] = -1.0L;
            tcur[1] = 2.0L;
            for (int i = 0; i < np; ++i) mono[i] += c[1] * tcur[i];
        }
        for (int j = 2; j < np; ++j) {
            std::vector<long double> tnext(np, 0.0L);
            for (int i = 0; i < np; ++i) {
                tnext[i] -= 2.0L * tcur[i] + tprev[i];
                if (i + 1 < np) tnext[i + 1] += 4.0L * tcur[i];
            }
            for (int i = 0; i < np; ++i) mono[i] += c[j] * tnext[i];
            tprev = tcur;
            tcur = tnext;
        }
        PolynomialFit fit;
        fit.degree = n;
        fit.coeffs.resize(np);
        std::vector<double> tc(np);
        for (int m = 0; m < np; ++m) {
            tc[m] = static_cast<double>(mono[m]);
            fit.coeffs[m] = static_cast<double>(mono[m] * factorial(m));
        }
        fit.error = ch_distance(grid_derivatives(polynomial(tc), h, grid), f, nullptr);
        if (fit.error < best.error) best = fit;
        if (fit.error < epsilon_fit) {
            // drop monomials whose whole contribution is negligible against the budget
            const double cut = 1e-3 * epsilon_fit / (n + 1);
            bool dropped = false;
            for (int m = 0; m < np; ++m) {
                if (fit.coeffs[m] != 0.0 && std::abs(fit.coeffs[m]) * monomial_norm(m, h) < cut) {
                    fit.coeffs[m] = 0.0;
                    tc[m] = 0.0;
                    dropped = true;
                }
            }
            if (dropped) fit.error = ch_distance(grid_derivatives(polynomial(tc), h, grid), f, nullptr);
            while (fit.degree > 0 && fit.coeffs[fit.degree] == 0.0) --fit.degree;
            fit.coeffs.resize(fit.degree + 1);
            return fit;
        }
    }
    std::ostringstream os;
    os << "fit_polynomial: C^" << h << " error " << best.error << " at best (degree " << best.degree
       << "), requested " << epsilon_fit;
    throw StageError(ErrorCode::FitFailure, os.str(), "fit", best.error);
}

namespace {

ApproximationResult jet_route(const ApproxRequest& req, const BuildingBlock& block) {
    const PolynomialFit fit = fit_polynomial(req.target, req.h, 0.5 * req.epsilon);
    std::vector<int> ms;
    double l1 = 0.0;
    for (int m = 0; m <= fit.degree; ++m)
        if (fit.coeffs[m] != 0.0) {
            ms.push_back(m);
            l1 += std::abs(fit.coeffs[m]);
        }
    ApproximationResult res;
    res.method = "jet";
    json prov;
    prov["fit"] = {{"degree", fit.degree}, {"error", fit.error}, {"coefficients", fit.coeffs}};
    if (ms.empty()) {
        res.u = constant(0.0);
        res.a = -1.0;
        prov["monomials"] = json::array();
        res.provenance = prov;
        return res;
    }
    const double eps_m = req.epsilon / (2.0 * l1);
    std::vector<MonomialApproximant> parts(ms.size());
    parallel_for(static_cast<int>(ms.size()), req.jobs,
                 [&](int i) { parts[i] = monomial_approximant(ms[i], req.order, eps_m, block, req.h); });
    std::vector<double> coeffs;
    std::vector<Expr> exprs;
    res.a = 0.0;
    json mons = json::array();
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto& pa = parts[i];
        coeffs.push_back(fit.coeffs[ms[i]]);
        exprs.push_back(pa.u);
        res.a = std::min(res.a, pa.a);
        mons.push_back({{"m", pa.m},
                        {"a_m", fit.coeffs[ms[i]]},
                        {"p", pa.span.p},
                        {"delta", pa.delta},
                        {"scales", pa.span.scales},
                        {"span_coefficients", pa.span.coefficients},
                        {"R", pa.span.R},
                        {"jet_residual", pa.span.residual},
                        {"condition_number", pa.span.condition_number},
                        {"error", pa.error},
                        {"support", pa.a}});
    }
    prov["monomial_budget"] = eps_m;
    prov["monomials"] = mons;
    res.u = linear_combo(coeffs, exprs);
    res.provenance = prov;
    return res;
}

ApproximationResult least_squares_route(const ApproxRequest& req, const BuildingBlock& block) {
    const int k = req.order.k;
    const double alpha = req.order.alpha;
    std::vector<Expr> basis;
    json desc = json::array();
    for (int i = 0; i < k; ++i) {
        basis.push_back(monomial(i));
        desc.push_back({{"polynomial_degree", i}});
    }
    for (double p : {0.1, 0.25, 0.5})
        for (int e = -12; e <= 12; ++e) {
            const double j = std::pow(2.0, 0.5 * e);
            basis.push_back(affine_rescale(block.psi, j, 1.0 + p / j, alpha));  // v_j(t + p)
            desc.push_back({{"j", j}, {"p", p}});
        }
    const int nb = static_cast<int>(basis.size());
    const int h = req.h;
    const auto grid = uniform(0.0, 1.0, kErrorGridPoints);
    const int ng = static_cast<int>(grid.size());
    const auto f = grid_derivatives(req.target, h, grid);
    // B[l](i, b) = basis_b^(l)(grid_i)
    std::vector<Eigen::MatrixXd> B(h + 1, Eigen::MatrixXd(ng, nb));
    parallel_for(nb, req.jobs, [&](int b) {
        for (int l = 0; l <= h; ++l)
            for (int i = 0; i < ng; ++i) B[l](i, b) = basis[b].eval(l, grid[i]);
    });
    // D^alpha of every basis function on the residual probe grid; by linearity this predicts the
    // residual of any combination, so the rank scan can respect the stationarity tolerance
    const auto probe = uniform(0.0, 2.0, kResidualProbePoints);
    Eigen::MatrixXd leaf_residual(probe.size(), nb);
    parallel_for(nb, req.jobs, [&](int b) {
        for (std::size_t i = 0; i < probe.size(); ++i)
            leaf_residual(i, b) = caputo_eval(basis[b], -kInf, req.order, probe[i], kResidualRelTol);
    });
    const int nf = (ng - 1) / kFitStride + 1;
    Eigen::MatrixXd A((h + 1) * nf, nb);
    Eigen::VectorXd rhs((h + 1) * nf);
    for (int l = 0; l <= h; ++l)
        for (int r = 0; r < nf; ++r) {
            A.row(l * nf + r) = B[l].row(r * kFitStride);
            rhs(l * nf + r) = f[l][r * kFitStride];
        }
    Eigen::VectorXd norms = A.colwise().norm().transpose();
    for (int b = 0; b < nb; ++b)
        if (norms(b) == 0.0) norms(b) = 1.0;
    const Eigen::MatrixXd An = A * norms.cwiseInverse().asDiagonal();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(An, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd beta = svd.matrixU().transpose() * rhs;
    const auto& sv = svd.singularValues();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(nb), best_c = Eigen::VectorXd::Zero(nb);
    double best_err = kInf;
    int best_rank = 0;
    for (int r = 0; r < sv.size() && sv(r) > 0.0; ++r) {
        y += (beta(r) / sv(r)) * svd.matrixV().col(r);
        const Eigen::VectorXd c = y.cwiseQuotient(norms);
        if (c.lpNorm<1>() > kCoefficientCap) break;
        double err = 0.0;
        for (int l = 0; l <= h; ++l) {
            const Eigen::VectorXd ul = B[l] * c;
            double m = 0.0;
            for (int i = 0; i < ng; ++i) m = std::max(m, std::abs(ul(i) - f[l][i]));
            err += m;
        }
        const double predicted = (leaf_residual * c).cwiseAbs().maxCoeff();
        if (!(predicted <= 0.5 * kStationaryTol)) continue;
        if (err < best_err) {
            best_err = err;
            best_c = c;
            best_rank = r + 1;
        }
    }
    ApproximationResult res;
    res.method = "least_squares";
    std::vector<double> coeffs(best_c.data(), best_c.data() + best_c.size());
    res.u = linear_combo(coeffs, basis);
    res.a = 0.0;
    for (const auto& b : basis) res.a = std::min(res.a, b.flat_left(k));
    json prov;
    prov["basis"] = desc;
    prov["coefficients"] = coeffs;
    prov["rank"] = best_rank;
    prov["coefficient_l1"] = best_c.lpNorm<1>();
    prov["scan_error"] = best_err;
    res.provenance = prov;
    return res;
}

void check_request(const ApproxRequest& req) {
    if (!(req.epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "approximate: epsilon must be positive");
    if (req.h < 0) throw Error(ErrorCode::InvalidConfig, "approximate: h must be nonnegative");
    if (req.h > req.target.max_order()) {
        std::ostringstream os;
        os << "approximate: the target provides derivatives up to order " << req.target.max_order() << ", h = " << req.h;
        throw Error(ErrorCode::InvalidConfig, os.str());
    }
}

}  // namespace

ApproximationResult approximate(const ApproxRequest& req) {
    check_request(req);
    const auto block = build_psi(req.order);
    ApproximationResult res;
    std::string jet_failure;
    bool done = false;
    if (req.strategy != Strategy::LeastSquares) {
        try {
            res = jet_route(req, *block);
            done = true;
        } catch (const StageError& e) {
            if (req.strategy == Strategy::Jet || e.code() == ErrorCode::FitFailure) throw;
            jet_failure = e.what();
        }
    }
    if (!done) res = least_squares_route(req, *block);
    if (!jet_failure.empty()) res.provenance["jet_route_failure"] = jet_failure;
    res.measured_error = ch_error(res.u, req.target, req.h, kErrorGridPoints, &res.error_by_order);
    res.residual_max = residual_max(res.u, req.order, req.jobs);
    if (!(res.measured_error < req.epsilon)) {
        std::ostringstream os;
        os << "approximate (" << res.method << "): measured C^" << req.h << " error " << res.measured_error
           << " is not below " << req.epsilon;
        if (!jet_failure.empty()) os << "; jet route: " << jet_failure;
        throw StageError(ErrorCode::ApproximationFailure, os.str(), res.method == "jet" ? "delta-selection" : "least-squares",
                         res.measured_error);
    }
    if (!(res.residual_max < kStationaryTol)) {
        std::ostringstream os;
        os << "approximate (" << res.method << "): stationarity residual " << res.residual_max << " exceeds "
           << kStationaryTol;
        throw StageError(ErrorCode::ApproximationFailure, os.str(), "residual", res.measured_error);
    }
    return res;
}

ApproximationResult approximate_psi(const ApproxRequest& req, const PsiFunction& psi) {
    check_request(req);
    if (!psi.unbounded_below)
        throw Error(ErrorCode::InvalidConfig, "approximate_psi: psi must tend to -infinity at -infinity");
    const double p0 = psi.expr.eval(0, 0.0);
    const double len = psi.expr.eval(0, 1.0) - p0;
    if (!(len > 0.0)) throw Error(ErrorCode::Monotonicity, "approximate_psi: psi(1) must exceed psi(0)");
    ApproxRequest sub = req;
    sub.target = affine_rescale(compose_inverse(req.target, psi), 1.0 / len, p0, 0.0);  // f(psi^{-1}(p0 + len s))
    ApproximationResult inner = approximate(sub);
    const Expr tilde = affine_rescale(inner.u, len, -p0 / len, 0.0);  // U((w - p0)/len)
    ApproximationResult res;
    res.method = inner.method;
    res.u = compose(tilde, psi);
    const double a_tilde = p0 + len * inner.a;
    res.a = psi_inverse(psi, a_tilde, {a_tilde - 1.0, 0.0});
    res.measured_error = ch_error(res.u, req.target, req.h, kErrorGridPoints, &res.error_by_order);
    res.residual_max = max_abs(psi_residual_curve(res.u, res.a, req.order, psi, uniform(0.0, 2.0, kResidualProbePoints), req.jobs));
    res.provenance = {{"inner", inner.provenance},
                      {"inner_error", inner.measured_error},
                      {"inner_residual", inner.residual_max},
                      {"psi0", p0},
                      {"psi1", p0 + len},
                      {"a_tilde", a_tilde}};
    if (!(res.measured_error < req.epsilon)) {
        std::ostringstream os;
        os << "approximate_psi: measured C^" << req.h << " error " << res.measured_error << " is not below "
           << req.epsilon;
        throw StageError(ErrorCode::ApproximationFailure, os.str(), "composition", res.measured_error);
    }
    return res;
}

}  // namespace fracdens
