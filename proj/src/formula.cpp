#include "fracdens/formula.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "fracdens/errors.hpp"
#include "fracdens/taylor.hpp"

namespace fracdens {

namespace {

enum class Op { Num, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt };

struct Ast {
    Op op;
    double value = 0.0;
    std::shared_ptr<const Ast> a, b;
};
using AstPtr = std::shared_ptr<const Ast>;

AstPtr make(Op op, AstPtr a = nullptr, AstPtr b = nullptr, double v = 0.0) {
    return std::make_shared<Ast>(Ast{op, v, std::move(a), std::move(b)});
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    AstPtr parse() {
        AstPtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        std::ostringstream os;
        os << "formula: " << what << " at position " << pos_ << " in \"" << s_ << "\"";
        throw Error(ErrorCode::Parse, os.str());
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    AstPtr expr() {
        AstPtr l = term();
        while (true) {
            const char c = peek();
            if (c == '+') {
                ++pos_;
                l = make(Op::Add, l, term());
            } else if (c == '-') {
                ++pos_;
                l = make(Op::Sub, l, term());
            } else {
                return l;
            }
        }
    }
    bool starts_factor(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '(' || std::isdigit(static_cast<unsigned char>(c)) || c == '.';
    }
    AstPtr term() {
        AstPtr l = unary();
        while (true) {
            const char c = peek();
            if (c == '*') {
                ++pos_;
                l = make(Op::Mul, l, unary());
            } else if (c == '/') {
                ++pos_;
                l = make(Op::Div, l, unary());
            } else if (starts_factor(c)) {
                l = make(Op::Mul, l, power());
            } else {
                return l;
            }
        }
    }
    AstPtr unary() {
        const char c = peek();
        if (c == '-') {
            ++pos_;
            return make(Op::Neg, unary());
        }
        if (c == '+') {
            ++pos_;
            return unary();
        }
        return power();
    }
    AstPtr power() {
        AstPtr base = primary();
        if (peek() == '^') {
            ++pos_;
            return make(Op::Pow, base, unary());
        }
        return base;
    }
    AstPtr primary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            AstPtr e = expr();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Op::Num, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string id = s_.substr(start, pos_ - start);
            if (id == "t") return make(Op::Var);
            if (id == "pi") return make(Op::Num, nullptr, nullptr, std::numbers::pi);
            if (id == "e") return make(Op::Num, nullptr, nullptr, std::numbers::e);
            Op op;
            if (id == "sin")
                op = Op::Sin;
            else if (id == "cos")
                op = Op::Cos;
            else if (id == "exp")
                op = Op::Exp;
            else if (id == "log")
                op = Op::Log;
            else if (id == "sqrt")
                op = Op::Sqrt;
            else {
                pos_ = start;
                fail("unknown identifier '" + id + "'");
            }
            if (peek() != '(') fail("expected '(' after function name");
            ++pos_;
            AstPtr arg = expr();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return make(op, arg);
        }
        fail("unexpected token");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

Taylor eval_ast(const Ast& a, const Taylor& t) {
    switch (a.op) {
        case Op::Num: return Taylor(t.degree(), a.value);
        case Op::Var: return t;
        case Op::Add: return eval_ast(*a.a, t) + eval_ast(*a.b, t);
        case Op::Sub: return eval_ast(*a.a, t) - eval_ast(*a.b, t);
        case Op::Mul: return eval_ast(*a.a, t) * eval_ast(*a.b, t);
        case Op::Div: return eval_ast(*a.a, t) / eval_ast(*a.b, t);
        case Op::Neg: return -eval_ast(*a.a, t);
        case Op::Pow:
            if (a.b->op == Op::Num) return pow(eval_ast(*a.a, t), a.b->value);
            return exp(eval_ast(*a.b, t) * log(eval_ast(*a.a, t)));
        case Op::Sin: return sin(eval_ast(*a.a, t));
        case Op::Cos: return cos(eval_ast(*a.a, t));
        case Op::Exp: return exp(eval_ast(*a.a, t));
        case Op::Log: return log(eval_ast(*a.a, t));
        case Op::Sqrt: return pow(eval_ast(*a.a, t), 0.5);
    }
    return Taylor(t.degree());
}

using Poly = std::vector<double>;

Poly padd(const Poly& x, const Poly& y, double s) {
    Poly r(std::max(x.size(), y.size()), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] += x[i];
    for (std::size_t i = 0; i < y.size(); ++i) r[i] += s * y[i];
    return r;
}

Poly pmul(const Poly& x, const Poly& y) {
    if (x.empty() || y.empty()) return {};
    Poly r(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
    return r;
}

std::optional<Poly> as_poly(const Ast& a) {
    switch (a.op) {
        case Op::Num: return Poly{a.value};
        case Op::Var: return Poly{0.0, 1.0};
        case Op::Add:
        case Op::Sub: {
            auto x = as_poly(*a.a), y = as_poly(*a.b);
            if (!x || !y) return std::nullopt;
            return padd(*x, *y, a.op == Op::Add ? 1.0 : -1.0);
        }
        case Op::Mul: {
            auto x = as_poly(*a.a), y = as_poly(*a.b);
            if (!x || !y) return std::nullopt;
            return pmul(*x, *y);
        }
        case Op::Div: {
            auto x = as_poly(*a.a), y = as_poly(*a.b);
            if (!x || !y || y->size() != 1 || (*y)[0] == 0.0) return std::nullopt;
            for (double& c : *x) c /= (*y)[0];
            return x;
        }
        case Op::Neg: {
            auto x = as_poly(*a.a);
            if (!x) return std::nullopt;
            for (double& c : *x) c = -c;
            return x;
        }
        case Op::Pow: {
            auto x = as_poly(*a.a);
            if (!x || a.b->op != Op::Num) return std::nullopt;
            const double e = a.b->value;
            if (e < 0 || e != std::floor(e) || e > 64) return std::nullopt;
            Poly r{1.0};
            for (int i = 0; i < static_cast<int>(e); ++i) r = pmul(r, *x);
            return r;
        }
        default: return std::nullopt;
    }
}

class FormulaNode : public ExprNode {
public:
    FormulaNode(std::string text, AstPtr ast) : text_(std::move(text)), ast_(std::move(ast)) {}
    std::string kind() const override { return "formula"; }
    double eval(int n, double t, Side) const override {
        return eval_ast(*ast_, Taylor::variable(n, t)).derivative(n);
    }
    json to_json() const override { return {{"type", "formula"}, {"text", text_}}; }

private:
    std::string text_;
    AstPtr ast_;
};

}  // namespace

Expr parse_formula(const std::string& text) {
    Parser p(text);
    AstPtr ast = p.parse();
    if (auto poly = as_poly(*ast)) return polynomial(*poly);
    return Expr(std::make_shared<FormulaNode>(text, ast));
}

}  // namespace fracdens
