#include "fracdens/fracdens.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <sstream>

#include "fracdens/approximate.hpp"
#include "fracdens/caputo.hpp"
#include "fracdens/construct.hpp"
#include "fracdens/errors.hpp"
#include "fracdens/expr_json.hpp"
#include "fracdens/formula.hpp"
#include "fracdens/verify.hpp"

using namespace fracdens;

struct fd_expr {
    Expr e;
};

struct fd_result {
    ApproximationResult r;
    ApproxRequest req;
    bool warped = false;
    PsiFunction psi;
};

namespace {

constexpr const char* kSpecVersion = "1.0";

thread_local std::string last_error;
thread_local std::string last_stage;
thread_local double last_achieved = std::numeric_limits<double>::quiet_NaN();

void clear_error() {
    last_error.clear();
    last_stage.clear();
    last_achieved = std::numeric_limits<double>::quiet_NaN();
}

template <class F>
fd_status guarded(F&& body) {
    clear_error();
    try {
        body();
        return FD_OK;
    } catch (const StageError& e) {
        last_error = e.what();
        last_stage = e.stage;
        last_achieved = e.achieved_error;
        return static_cast<fd_status>(e.code());
    } catch (const Error& e) {
        last_error = e.what();
        return static_cast<fd_status>(e.code());
    } catch (const json::exception& e) {
        last_error = std::string("json: ") + e.what();
        return FD_ERR_PARSE;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return FD_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return FD_ERR_INTERNAL;
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

fd_expr* wrap(Expr e) { return new fd_expr{std::move(e)}; }

json order_json(const FractionalOrder& o) { return {{"k", o.k}, {"alpha", o.alpha}}; }

}  // namespace

#define FD_NULL_CHECK(p)                                  \
    do {                                                  \
        if (!(p)) {                                       \
            clear_error();                                \
            last_error = #p " is null";                   \
            return FD_ERR_NULL_ARGUMENT;                  \
        }                                                 \
    } while (0)

extern "C" {

const char* fd_version(void) { return "1.0.0"; }
const char* fd_spec_version(void) { return kSpecVersion; }

const char* fd_status_name(fd_status status) {
    switch (status) {
        case FD_OK: return "ok";
        case FD_ERR_NULL_ARGUMENT: return "null-argument";
        case FD_ERR_INTERNAL: return "internal";
        default:
            if (status >= FD_ERR_DOMAIN && status <= FD_ERR_INVALID_CONFIG)
                return error_code_name(static_cast<ErrorCode>(status));
            return "unknown";
    }
}

const char* fd_last_error(void) { return last_error.c_str(); }
const char* fd_last_error_stage(void) { return last_stage.c_str(); }
double fd_last_error_achieved(void) { return last_achieved; }

void fd_string_free(char* s) { std::free(s); }

fd_status fd_json_format(const char* text, char** out) {
    FD_NULL_CHECK(text);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] { *out = copy_string(dump_json(json::parse(text))); });
}

fd_status fd_expr_from_json(const char* text, fd_expr** out) {
    FD_NULL_CHECK(text);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] { *out = wrap(expr_from_json(json::parse(text))); });
}

fd_status fd_expr_parse(const char* formula, fd_expr** out) {
    FD_NULL_CHECK(formula);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] { *out = wrap(parse_formula(formula)); });
}

fd_status fd_expr_polynomial(const double* coeffs, size_t n, double center, fd_expr** out) {
    FD_NULL_CHECK(out);
    *out = nullptr;
    if (n > 0) FD_NULL_CHECK(coeffs);
    return guarded([&] { *out = wrap(polynomial(std::vector<double>(coeffs, coeffs + n), center)); });
}

fd_status fd_expr_sampled(const double* t, const double* f, size_t n, fd_expr** out) {
    FD_NULL_CHECK(t);
    FD_NULL_CHECK(f);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] { *out = wrap(sampled(std::vector<double>(t, t + n), std::vector<double>(f, f + n))); });
}

fd_status fd_expr_clone(const fd_expr* e, fd_expr** out) {
    FD_NULL_CHECK(e);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] { *out = wrap(e->e); });
}

void fd_expr_free(fd_expr* e) { delete e; }

fd_status fd_expr_eval(const fd_expr* e, int n, double t, double* out) {
    FD_NULL_CHECK(e);
    FD_NULL_CHECK(out);
    return guarded([&] {
        if (n < 0) throw_domain("derivative order must be nonnegative");
        *out = e->e.eval(n, t);
    });
}

fd_status fd_expr_max_order(const fd_expr* e, int* out) {
    FD_NULL_CHECK(e);
    FD_NULL_CHECK(out);
    return guarded([&] { *out = e->e.max_order(); });
}

fd_status fd_expr_to_json(const fd_expr* e, char** out) {
    FD_NULL_CHECK(e);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] { *out = copy_string(dump_json(e->e.to_json())); });
}

fd_status fd_caputo(const fd_expr* u, double a, int k, double alpha, double t, double* out) {
    FD_NULL_CHECK(u);
    FD_NULL_CHECK(out);
    return guarded([&] { *out = caputo_eval(u->e, a, FractionalOrder(k, alpha), t); });
}

fd_status fd_psi_caputo(const fd_expr* u, double a, int k, double alpha, const fd_expr* psi, int psi_unbounded_below,
                        double t, double* out) {
    FD_NULL_CHECK(u);
    FD_NULL_CHECK(psi);
    FD_NULL_CHECK(out);
    return guarded([&] {
        const PsiFunction p{psi->e, psi_unbounded_below != 0};
        *out = psi_caputo_eval(u->e, a, FractionalOrder(k, alpha), p, t);
    });
}

fd_status fd_psi_inverse(const fd_expr* psi, int psi_unbounded_below, double y, double* out) {
    FD_NULL_CHECK(psi);
    FD_NULL_CHECK(out);
    return guarded([&] { *out = psi_inverse(PsiFunction{psi->e, psi_unbounded_below != 0}, y); });
}

fd_status fd_kappa(int k, double alpha, double* closed_form, double* quadrature, double* delta) {
    return guarded([&] {
        const KappaCheck c = kappa_check(FractionalOrder(k, alpha));
        if (closed_form) *closed_form = c.closed_form;
        if (quadrature) *quadrature = c.quadrature;
        if (delta) *delta = c.delta;
    });
}

fd_status fd_building_block(int k, double alpha, fd_expr** out) {
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] { *out = wrap(build_psi(FractionalOrder(k, alpha))->psi); });
}

void fd_approx_options_default(fd_approx_options* opts) {
    if (!opts) return;
    *opts = fd_approx_options{1, 0.5, 0, 1e-2, FD_STRATEGY_AUTO, 1};
}

fd_status fd_approximate(const fd_expr* target, const fd_approx_options* opts, const fd_expr* psi,
                         int psi_unbounded_below, fd_result** out) {
    FD_NULL_CHECK(target);
    FD_NULL_CHECK(opts);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] {
        if (opts->jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be at least 1");
        if (opts->strategy < FD_STRATEGY_AUTO || opts->strategy > FD_STRATEGY_LEAST_SQUARES)
            throw Error(ErrorCode::InvalidConfig, "unknown strategy");
        ApproxRequest req;
        req.target = target->e;
        req.h = opts->h;
        req.order = FractionalOrder(opts->k, opts->alpha);
        req.epsilon = opts->epsilon;
        req.strategy = static_cast<Strategy>(opts->strategy);
        req.jobs = opts->jobs;
        auto res = std::make_unique<fd_result>();
        res->req = req;
        if (psi) {
            res->warped = true;
            res->psi = make_psi(psi->e, psi_unbounded_below != 0);
            res->r = approximate_psi(req, res->psi);
        } else {
            res->r = approximate(req);
        }
        *out = res.release();
    });
}

void fd_result_free(fd_result* r) { delete r; }

fd_status fd_result_u(const fd_result* r, fd_expr** out) {
    FD_NULL_CHECK(r);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] { *out = wrap(r->r.u); });
}

double fd_result_a(const fd_result* r) { return r ? r->r.a : std::numeric_limits<double>::quiet_NaN(); }
double fd_result_error(const fd_result* r) { return r ? r->r.measured_error : std::numeric_limits<double>::quiet_NaN(); }
double fd_result_residual(const fd_result* r) { return r ? r->r.residual_max : std::numeric_limits<double>::quiet_NaN(); }
const char* fd_result_method(const fd_result* r) { return r ? r->r.method.c_str() : ""; }

fd_status fd_result_json(const fd_result* r, char** out) {
    FD_NULL_CHECK(r);
    FD_NULL_CHECK(out);
    *out = nullptr;
    return guarded([&] {
        const auto& req = r->req;
        json doc;
        doc["spec_version"] = kSpecVersion;
        doc["request"] = {{"order", order_json(req.order)},
                          {"h", req.h},
                          {"epsilon", req.epsilon},
                          {"target", req.target.to_json()}};
        if (r->warped)
            doc["request"]["psi"] = {{"expr", r->psi.expr.to_json()}, {"unbounded_below", r->psi.unbounded_below}};
        doc["method"] = r->r.method;
        doc["a"] = r->r.a;
        doc["measured_error"] = r->r.measured_error;
        doc["error_by_order"] = r->r.error_by_order;
        doc["residual_max"] = r->r.residual_max;
        doc["u"] = r->r.u.to_json();
        doc["provenance"] = r->r.provenance;
        *out = copy_string(dump_json(doc));
    });
}

fd_status fd_result_residual_curve(const fd_result* r, const double* t, size_t n, double* out) {
    FD_NULL_CHECK(r);
    if (n == 0) return FD_OK;
    FD_NULL_CHECK(t);
    FD_NULL_CHECK(out);
    return guarded([&] {
        const std::vector<double> grid(t, t + n);
        const auto curve = r->warped ? psi_residual_curve(r->r.u, r->r.a, r->req.order, r->psi, grid, r->req.jobs)
                                     : residual_curve(r->r.u, r->req.order, grid, r->req.jobs);
        std::copy(curve.begin(), curve.end(), out);
    });
}

fd_status fd_verify(const char* suites, double kappa_scale, unsigned seed, char** report_json, int* all_pass) {
    FD_NULL_CHECK(suites);
    return guarded([&] {
        VerifyOptions opts;
        std::stringstream ss(suites);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) opts.suites.push_back(item);
        opts.kappa_scale = kappa_scale;
        opts.seed = seed;
        const auto checks = run_verify(opts);
        bool ok = true;
        json doc;
        doc["spec_version"] = kSpecVersion;
        doc["seed"] = seed;
        doc["kappa_scale"] = kappa_scale;
        doc["checks"] = json::array();
        for (const auto& c : checks) {
            ok = ok && c.pass;
            doc["checks"].push_back({{"suite", c.suite},
                                     {"name", c.name},
                                     {"pass", c.pass},
                                     {"value", c.value},
                                     {"tolerance", c.tolerance},
                                     {"detail", c.detail}});
        }
        doc["all_pass"] = ok;
        if (all_pass) *all_pass = ok ? 1 : 0;
        if (report_json) *report_json = copy_string(dump_json(doc));
    });
}

}  // extern "C"
