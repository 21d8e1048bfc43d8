#include "fracdens/expr_json.hpp"

#include <sstream>

#include "fracdens/caputo.hpp"
#include "fracdens/construct.hpp"
#include "fracdens/errors.hpp"
#include "fracdens/formula.hpp"
#include "fracdens/volterra.hpp"

namespace fracdens {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::Parse, "expression json: " + what); }

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing field '") + key + "'");
    return *it;
}

double number(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    bad("expected a number, got " + v.dump());
}

double number(const json& j, const char* key) { return number(field(j, key)); }

std::vector<double> numbers(const json& v) {
    if (!v.is_array()) bad("expected an array, got " + v.dump());
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x));
    return out;
}

int integer(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

FractionalOrder order_of(const json& j) {
    try {
        return FractionalOrder(integer(j, "k"), number(j, "alpha"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) throw;
        bad(e.what());
    }
}

}  // namespace

PsiFunction psi_from_json(const json& j) {
    if (!j.is_object()) bad("warp must be an object");
    const auto it = j.find("unbounded_below");
    return PsiFunction{expr_from_json(field(j, "expr")), it != j.end() && it->get<bool>()};
}

Expr expr_from_json(const json& j) {
    if (!j.is_object()) bad("node must be an object, got " + j.dump());
    const std::string type = field(j, "type").get<std::string>();
    if (type == "polynomial") {
        const auto it = j.find("center");
        return polynomial(numbers(field(j, "coeffs")), it == j.end() ? 0.0 : number(*it));
    }
    if (type == "shifted_power") {
        const auto it = j.find("clamp");
        return shifted_power(number(j, "c"), number(j, "b"), number(j, "gamma"), it == j.end() || it->get<bool>());
    }
    if (type == "psi0_block") return psi0_block(integer(j, "k"));
    if (type == "affine_rescale")
        return affine_rescale(expr_from_json(field(j, "inner")), number(j, "j"), number(j, "shift"), number(j, "out_power"));
    if (type == "monomial_rescale")
        return monomial_rescale(expr_from_json(field(j, "inner")), number(j, "delta"), number(j, "p"), integer(j, "m"));
    if (type == "linear_combo") {
        std::vector<Expr> parts;
        for (const auto& p : field(j, "parts")) parts.push_back(expr_from_json(p));
        auto c = numbers(field(j, "coeffs"));
        if (c.size() != parts.size()) bad("linear_combo needs one coefficient per part");
        return linear_combo(std::move(c), std::move(parts));
    }
    if (type == "piecewise") {
        std::vector<Expr> segs;
        for (const auto& s : field(j, "segments")) segs.push_back(expr_from_json(s));
        auto knots = numbers(field(j, "knots"));
        if (segs.size() != knots.size() + 1) bad("piecewise needs one more segment than knots");
        return piecewise(number(j, "lower"), std::move(knots), std::move(segs), integer(j, "match_order"));
    }
    if (type == "composed") {
        const Expr inner = expr_from_json(field(j, "inner"));
        const PsiFunction psi = psi_from_json(field(j, "warp"));
        const auto it = j.find("inverse");
        return it != j.end() && it->get<bool>() ? compose_inverse(inner, psi) : compose(inner, psi);
    }
    if (type == "sampled") {
        auto t = numbers(field(j, "t"));
        auto f = numbers(field(j, "f"));
        if (t.size() != f.size() || t.size() < 2) bad("sampled needs matching t and f arrays of length >= 2");
        return sampled(std::move(t), std::move(f));
    }
    if (type == "formula") return parse_formula(field(j, "text").get<std::string>());
    if (type == "memory_source")
        return memory_source(expr_from_json(field(j, "history")), number(j, "a"), number(j, "b"), order_of(j));
    if (type == "volterra") return volterra_rep(expr_from_json(field(j, "source")), number(j, "b"), order_of(j));
    if (type == "block_source") return block_source(order_of(j));
    bad("unknown type '" + type + "'");
}

namespace {

void write(std::ostringstream& os, const json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string end_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    const char* colon = indent > 0 ? ": " : ":";
    switch (j.type()) {
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (std::isnan(x)) {
                os << "null";
            } else if (std::isinf(x)) {
                os << (x > 0 ? "\"inf\"" : "\"-inf\"");
            } else {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", x);
                std::string s = buf;
                if (s.find_first_of(".eE") == std::string::npos) s += ".0";
                os << s;
            }
            break;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                break;
            }
            os << "[" << nl;
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << "," << nl;
                first = false;
                os << pad;
                write(os, v, indent, depth + 1);
            }
            os << nl << end_pad << "]";
            break;
        }
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                break;
            }
            os << "{" << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << "," << nl;
                first = false;
                os << pad << json(it.key()).dump() << colon;
                write(os, it.value(), indent, depth + 1);
            }
            os << nl << end_pad << "}";
            break;
        }
        default: os << j.dump();
    }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
    std::ostringstream os;
    write(os, j, indent, 0);
    return os.str();
}

}  // namespace fracdens
