// fracdens command-line driver. Links only the C interface.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracdens/fracdens.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Thrown for configuration problems detected before any computation.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a library call fails.
struct LibraryError : std::runtime_error {
    LibraryError(fd_status s, const std::string& what) : std::runtime_error(what), status(s) {}
    fd_status status;
};

void check(fd_status s, const std::string& context) {
    if (s == FD_OK) return;
    std::string msg = context + ": " + fd_status_name(s) + ": " + fd_last_error();
    if (s == FD_ERR_INVALID_CONFIG || s == FD_ERR_PARSE || s == FD_ERR_DOMAIN) throw UsageError(msg);
    throw LibraryError(s, msg);
}

struct ExprDeleter {
    void operator()(fd_expr* e) const { fd_expr_free(e); }
};
struct ResultDeleter {
    void operator()(fd_result* r) const { fd_result_free(r); }
};
using ExprPtr = std::unique_ptr<fd_expr, ExprDeleter>;
using ResultPtr = std::unique_ptr<fd_result, ResultDeleter>;

std::string take_string(char* s) {
    std::string out(s ? s : "");
    fd_string_free(s);
    return out;
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_json(const json& doc) {
    char* out = nullptr;
    check(fd_json_format(doc.dump().c_str(), &out), "json");
    return take_string(out) + "\n";
}

double parse_real(const std::string& s) {
    if (s == "-inf") return -INFINITY;
    if (s == "inf") return INFINITY;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw UsageError("not a number: '" + s + "'");
    return v;
}

std::vector<double> split_reals(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
    return out;
}

ExprPtr read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read sample file '" + path + "'");
    std::string line;
    std::vector<double> t, f;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line == "t,f") continue;
        }
        const auto v = split_reals(line);
        if (v.size() != 2) throw UsageError("sample file '" + path + "': expected two columns t,f in '" + line + "'");
        t.push_back(v[0]);
        f.push_back(v[1]);
    }
    fd_expr* e = nullptr;
    check(fd_expr_sampled(t.data(), f.data(), t.size(), &e), "samples '" + path + "'");
    return ExprPtr(e);
}

// '{...}' JSON expression tree, 'poly:c0,c1,...' coefficients of sum c_i t^i, '@file.csv' samples, else a formula.
ExprPtr parse_target(const std::string& spec, bool* is_sampled = nullptr) {
    if (is_sampled) *is_sampled = false;
    fd_expr* e = nullptr;
    if (!spec.empty() && spec.front() == '{') {
        check(fd_expr_from_json(spec.c_str(), &e), "expression json");
    } else if (spec.rfind("poly:", 0) == 0) {
        const auto c = split_reals(spec.substr(5));
        check(fd_expr_polynomial(c.data(), c.size(), 0.0, &e), "polynomial");
    } else if (!spec.empty() && spec.front() == '@') {
        if (is_sampled) *is_sampled = true;
        return read_samples(spec.substr(1));
    } else {
        check(fd_expr_parse(spec.c_str(), &e), "formula '" + spec + "'");
    }
    return ExprPtr(e);
}

void validate_order(int k, double alpha) {
    if (k < 1) throw UsageError("k must be a positive integer");
    if (!(alpha > k - 1 && alpha < k)) {
        std::ostringstream os;
        os << "alpha must lie strictly in (k-1, k) = (" << k - 1 << ", " << k << "), got " << alpha;
        throw UsageError(os.str());
    }
}

std::vector<double> uniform(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
}

fs::path output_dir(const std::string& flag) {
    fs::path dir = ".";
    if (const char* env = std::getenv("FRACDENS_OUTPUT_DIR"); env && *env) dir = env;
    if (!flag.empty()) dir = flag;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw UsageError("output directory '" + dir.string() + "' is not usable");
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

// ------------------------------------------------------------------ approximate
struct ApproximateConfig {
    int k = 1;
    double alpha = 0.5;
    int h = 0;
    double eps = 1e-2;
    std::string target;
    std::string psi;
    bool psi_bounded = false;
    std::string strategy = "auto";
    int jobs = 1;
    int grid = 51;
    unsigned seed = 0;
    std::string out_dir;
    std::string prefix = "approximate";
};

int cmd_approximate(const ApproximateConfig& c) {
    validate_order(c.k, c.alpha);
    if (!(c.eps > 0.0)) throw UsageError("--eps must be positive");
    if (c.h < 0) throw UsageError("--h must be nonnegative");
    if (c.grid < 2) throw UsageError("--grid needs at least 2 points");
    if (c.jobs < 1) throw UsageError("--jobs must be at least 1");
    bool is_sampled = false;
    ExprPtr target = parse_target(c.target, &is_sampled);
    if (is_sampled && c.h > 1) throw UsageError("sampled targets support h <= 1");
    ExprPtr psi;
    if (!c.psi.empty()) psi = parse_target(c.psi);
    const fs::path dir = output_dir(c.out_dir);

    fd_approx_options opts;
    fd_approx_options_default(&opts);
    opts.k = c.k;
    opts.alpha = c.alpha;
    opts.h = c.h;
    opts.epsilon = c.eps;
    opts.jobs = c.jobs;
    opts.strategy = c.strategy == "jet" ? FD_STRATEGY_JET
                    : c.strategy == "lsq" ? FD_STRATEGY_LEAST_SQUARES
                                          : FD_STRATEGY_AUTO;

    fd_result* raw = nullptr;
    const fd_status s = fd_approximate(target.get(), &opts, psi.get(), c.psi_bounded ? 0 : 1, &raw);
    if (s != FD_OK) {
        if (s == FD_ERR_INVALID_CONFIG || s == FD_ERR_PARSE) throw UsageError(fd_last_error());
        std::cerr << "approximate failed: " << fd_status_name(s);
        if (*fd_last_error_stage()) std::cerr << " at stage " << fd_last_error_stage();
        if (!std::isnan(fd_last_error_achieved())) std::cerr << ", achieved error " << fmt(fd_last_error_achieved());
        std::cerr << "\n" << fd_last_error() << "\n";
        return kExitFailure;
    }
    ResultPtr result(raw);

    char* doc_text = nullptr;
    check(fd_result_json(result.get(), &doc_text), "result");
    json doc = json::parse(take_string(doc_text));
    doc["seed"] = c.seed;
    doc["strategy"] = c.strategy;

    fd_expr* u_raw = nullptr;
    check(fd_result_u(result.get(), &u_raw), "result");
    ExprPtr u(u_raw);
    const auto grid = uniform(0.0, 1.0, c.grid);
    std::vector<double> residual(grid.size());
    check(fd_result_residual_curve(result.get(), grid.data(), grid.size(), residual.data()), "residual");
    std::ostringstream csv;
    csv << "t,f,u,u_minus_f,residual\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double f = 0.0, uv = 0.0;
        check(fd_expr_eval(target.get(), 0, grid[i], &f), "target");
        check(fd_expr_eval(u.get(), 0, grid[i], &uv), "u");
        csv << fmt(grid[i]) << ',' << fmt(f) << ',' << fmt(uv) << ',' << fmt(uv - f) << ',' << fmt(residual[i]) << '\n';
    }

    const fs::path json_path = dir / (c.prefix + ".json");
    const fs::path csv_path = dir / (c.prefix + "_curves.csv");
    write_file(json_path, format_json(doc));
    write_file(csv_path, csv.str());
    std::cout << "method " << fd_result_method(result.get()) << "\n"
              << "a " << fmt(fd_result_a(result.get())) << "\n"
              << "measured_error " << fmt(fd_result_error(result.get())) << "\n"
              << "residual_max " << fmt(fd_result_residual(result.get())) << "\n"
              << "wrote " << json_path.string() << " and " << csv_path.string() << "\n";
    return fd_result_error(result.get()) < c.eps ? 0 : kExitFailure;
}

// ------------------------------------------------------------------ caputo
struct CaputoConfig {
    int k = 1;
    double alpha = 0.5;
    std::string u;
    std::string a = "0";
    std::string t;
    std::string grid;
    std::string psi;
    bool psi_bounded = false;
    std::string format = "csv";
    std::string output;
};

int cmd_caputo(const CaputoConfig& c) {
    validate_order(c.k, c.alpha);
    const double a = parse_real(c.a);
    std::vector<double> ts;
    if (!c.t.empty()) ts = split_reals(c.t);
    if (!c.grid.empty()) {
        std::vector<double> g;
        std::stringstream ss(c.grid);
        std::string item;
        while (std::getline(ss, item, ':')) g.push_back(parse_real(item));
        if (g.size() != 3 || g[2] < 1 || g[2] != std::floor(g[2])) throw UsageError("--grid expects lo:hi:count");
        const auto u = uniform(g[0], g[1], static_cast<int>(g[2]));
        ts.insert(ts.end(), u.begin(), u.end());
    }
    if (ts.empty()) throw UsageError("give evaluation points with --t or --grid");
    for (double t : ts)
        if (!(t > a)) throw UsageError("every evaluation point must exceed the initial point a");
    ExprPtr u = parse_target(c.u);
    ExprPtr psi;
    if (!c.psi.empty()) psi = parse_target(c.psi);

    std::vector<double> values(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (psi)
            check(fd_psi_caputo(u.get(), a, c.k, c.alpha, psi.get(), c.psi_bounded ? 0 : 1, ts[i], &values[i]), "caputo");
        else
            check(fd_caputo(u.get(), a, c.k, c.alpha, ts[i], &values[i]), "caputo");
    }
    std::string text;
    if (c.format == "json") {
        json doc{{"spec_version", fd_spec_version()}, {"k", c.k}, {"alpha", c.alpha}, {"a", a}, {"warped", bool(psi)}};
        doc["t"] = ts;
        doc["value"] = values;
        text = format_json(doc);
    } else {
        std::ostringstream os;
        os << "t,value\n";
        for (std::size_t i = 0; i < ts.size(); ++i) os << fmt(ts[i]) << ',' << fmt(values[i]) << '\n';
        text = os.str();
    }
    if (c.output.empty()) {
        std::cout << text;
    } else {
        write_file(output_dir("") / c.output, text);
    }
    return 0;
}

// ------------------------------------------------------------------ kappa
int cmd_kappa(int k, double alpha, const std::string& format) {
    validate_order(k, alpha);
    double closed = 0.0, quad = 0.0, delta = 0.0;
    check(fd_kappa(k, alpha, &closed, &quad, &delta), "kappa");
    if (format == "json") {
        std::cout << format_json({{"spec_version", fd_spec_version()},
                                  {"k", k},
                                  {"alpha", alpha},
                                  {"kappa", closed},
                                  {"quadrature", quad},
                                  {"delta", delta}});
    } else {
        std::cout << "kappa " << fmt(closed) << "\nquadrature " << fmt(quad) << "\ndelta " << fmt(delta) << "\n";
    }
    return delta < 1e-9 ? 0 : kExitFailure;
}

// ------------------------------------------------------------------ verify
int cmd_verify(const std::vector<std::string>& suites, bool inject_fault, unsigned seed, const std::string& output) {
    if (suites.empty()) throw UsageError("select at least one suite");
    std::string list;
    for (const auto& s : suites) {
        if (s.empty()) throw UsageError("empty suite name");
        list += (list.empty() ? "" : ",") + s;
    }
    char* report = nullptr;
    int all_pass = 0;
    check(fd_verify(list.c_str(), inject_fault ? 0.99 : 1.0, seed, &report, &all_pass), "verify");
    const json doc = json::parse(take_string(report));
    for (const auto& c : doc["checks"]) {
        std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["suite"].get<std::string>() << ": "
                  << c["name"].get<std::string>() << "  value " << fmt(c["value"].get<double>()) << " tol "
                  << fmt(c["tolerance"].get<double>());
        if (!c["detail"].get<std::string>().empty()) std::cout << "  [" << c["detail"].get<std::string>() << "]";
        std::cout << "\n";
    }
    if (!output.empty()) write_file(output_dir("") / output, format_json(doc));
    return all_pass ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Caputo-stationary approximation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fd_version()));

    ApproximateConfig ac;
    auto* approx = app.add_subcommand("approximate", "Approximate a target on [0,1] by a Caputo-stationary function");
    approx->add_option("--k", ac.k, "Integer part k of the order")->capture_default_str();
    approx->add_option("--alpha", ac.alpha, "Order alpha in (k-1, k)")->capture_default_str();
    approx->set_help_flag("--help", "Print this help message and exit");
    approx->add_option("--h", ac.h, "Smoothness index of the C^h norm")->capture_default_str();
    approx->add_option("--eps", ac.eps, "Tolerance in C^h([0,1])")->capture_default_str();
    approx->add_option("--target", ac.target, "Formula, poly:c0,c1,..., JSON tree or @samples.csv")->required();
    approx->add_option("--psi", ac.psi, "Clock psi for the warped problem (formula or JSON)");
    approx->add_flag("--psi-bounded", ac.psi_bounded, "psi does not tend to -inf at -inf (the warped problem is then rejected)");
    approx->add_option("--strategy", ac.strategy, "auto, jet or lsq")
        ->check(CLI::IsMember({"auto", "jet", "lsq"}))
        ->capture_default_str();
    approx->add_option("--jobs", ac.jobs, "Worker threads")->capture_default_str();
    approx->add_option("--grid", ac.grid, "Points of the reporting grid on [0,1]")->capture_default_str();
    approx->add_option("--seed", ac.seed, "Recorded in the result for reproducibility")->capture_default_str();
    approx->add_option("--out-dir", ac.out_dir, "Output directory (default $FRACDENS_OUTPUT_DIR or .)");
    approx->add_option("--prefix", ac.prefix, "Artifact file prefix")->capture_default_str();

    CaputoConfig cc;
    auto* caputo = app.add_subcommand("caputo", "Evaluate D_a^alpha u or D_a^{alpha,psi} u");
    caputo->add_option("--k", cc.k, "Integer part k of the order")->capture_default_str();
    caputo->add_option("--alpha", cc.alpha, "Order alpha in (k-1, k)")->capture_default_str();
    caputo->add_option("--u", cc.u, "Function: formula, poly:..., JSON tree or @samples.csv")->required();
    caputo->add_option("--a", cc.a, "Initial point (number or -inf)")->capture_default_str();
    caputo->add_option("--t", cc.t, "Comma-separated evaluation points");
    caputo->add_option("--grid", cc.grid, "Uniform grid lo:hi:count");
    caputo->add_option("--psi", cc.psi, "Clock psi (formula or JSON)");
    caputo->add_flag("--psi-bounded", cc.psi_bounded, "psi does not tend to -inf at -inf");
    caputo->add_option("--format", cc.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    caputo->add_option("--output", cc.output, "File name inside the output directory (default stdout)");

    int kk = 1;
    double kalpha = 0.5;
    std::string kformat = "text";
    auto* kap = app.add_subcommand("kappa", "Boundary constant kappa by two independent routes");
    kap->add_option("--k", kk, "Integer part k of the order")->capture_default_str();
    kap->add_option("--alpha", kalpha, "Order alpha in (k-1, k)")->capture_default_str();
    kap->add_option("--format", kformat)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    std::vector<std::string> suites{"beta", "equiv", "oracle", "asymptotic"};
    bool inject_fault = false;
    unsigned vseed = 7;
    std::string voutput;
    auto* verify = app.add_subcommand("verify", "Run the invariant suites");
    verify->add_option("--suite", suites, "Suites to run: beta, equiv, oracle, asymptotic")
        ->delimiter(',')
        ->expected(0, -1)
        ->capture_default_str();
    verify->add_flag("--inject-fault", inject_fault, "Perturb the reference kappa by 1%");
    verify->add_option("--seed", vseed)->capture_default_str();
    verify->add_option("--output", voutput, "Report file inside the output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (*approx) return cmd_approximate(ac);
        if (*caputo) return cmd_caputo(cc);
        if (*kap) return cmd_kappa(kk, kalpha, kformat);
        if (*verify) {
            if (verify->count("--suite") && suites.empty()) throw UsageError("select at least one suite");
            return cmd_verify(suites, inject_fault, vseed, voutput);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const LibraryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
