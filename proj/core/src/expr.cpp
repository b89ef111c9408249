#include "magnex/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace magnex {

enum class NodeKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Lt, Le, Gt, Ge, Eq, Call };

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Tanh, Abs, Min, Max, Where };

struct Expr::Node {
    NodeKind kind = NodeKind::Number;
    double value = 0.0;   // Number
    int var = 0;          // Var: 0=x 1=y 2=z 3=t
    Func func = Func::Sin;
    bool named_pi = false;
    std::vector<std::shared_ptr<const Node>> args;
    std::size_t begin = 0, end = 0;  // source span
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct FuncInfo {
    const char* name;
    Func func;
    int arity;
};

constexpr FuncInfo kFuncs[] = {
    {"sin", Func::Sin, 1},   {"cos", Func::Cos, 1},   {"tan", Func::Tan, 1},
    {"exp", Func::Exp, 1},   {"log", Func::Log, 1},   {"sqrt", Func::Sqrt, 1},
    {"tanh", Func::Tanh, 1}, {"abs", Func::Abs, 1},   {"min", Func::Min, 2},
    {"max", Func::Max, 2},   {"where", Func::Where, 3},
};

const char* func_name(Func f) {
    for (const auto& fi : kFuncs)
        if (fi.func == f) return fi.name;
    return "?";
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        NodePtr n = comparison();
        skip_ws();
        if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("expression: " + msg, line, col);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(std::string_view tok) {
        skip_ws();
        if (src_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    static NodePtr make(NodeKind k, std::vector<NodePtr> args, std::size_t b, std::size_t e) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = k;
        n->args = std::move(args);
        n->begin = b;
        n->end = e;
        return n;
    }

    NodePtr comparison() {
        skip_ws();
        const std::size_t b = pos_;
        NodePtr lhs = additive();
        skip_ws();
        NodeKind k;
        if (accept("<=")) k = NodeKind::Le;
        else if (accept(">=")) k = NodeKind::Ge;
        else if (accept("==")) k = NodeKind::Eq;
        else if (accept("<")) k = NodeKind::Lt;
        else if (accept(">")) k = NodeKind::Gt;
        else return lhs;
        NodePtr rhs = additive();
        return make(k, {lhs, rhs}, b, pos_);
    }

    NodePtr additive() {
        skip_ws();
        const std::size_t b = pos_;
        NodePtr lhs = term();
        for (;;) {
            if (accept("+")) lhs = make(NodeKind::Add, {lhs, term()}, b, pos_);
            else if (accept("-")) lhs = make(NodeKind::Sub, {lhs, term()}, b, pos_);
            else return lhs;
        }
    }

    NodePtr term() {
        skip_ws();
        const std::size_t b = pos_;
        NodePtr lhs = unary();
        for (;;) {
            if (accept("*")) lhs = make(NodeKind::Mul, {lhs, unary()}, b, pos_);
            else if (accept("/")) lhs = make(NodeKind::Div, {lhs, unary()}, b, pos_);
            else return lhs;
        }
    }

    NodePtr unary() {
        skip_ws();
        const std::size_t b = pos_;
        if (accept("-")) return make(NodeKind::Neg, {unary()}, b, pos_);
        if (accept("+")) return unary();
        return power();
    }

    NodePtr power() {
        skip_ws();
        const std::size_t b = pos_;
        NodePtr base = primary();
        if (accept("^")) return make(NodeKind::Pow, {base, unary()}, b, pos_);
        return base;
    }

    NodePtr primary() {
        skip_ws();
        const std::size_t b = pos_;
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = comparison();
            if (!accept(")")) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t e = pos_;
            while (e < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[e])) || src_[e] == '_'))
                ++e;
            const std::string name(src_.substr(pos_, e - pos_));
            pos_ = e;
            if (accept("(")) return call(name, b);
            auto n = std::make_shared<Expr::Node>();
            n->begin = b;
            n->end = pos_;
            if (name == "x" || name == "y" || name == "z" || name == "t") {
                n->kind = NodeKind::Var;
                n->var = name == "x" ? 0 : name == "y" ? 1 : name == "z" ? 2 : 3;
            } else if (name == "pi") {
                n->kind = NodeKind::Number;
                n->value = kPiValue;
                n->named_pi = true;
            } else {
                fail_at("unknown identifier '" + name + "'", b);
            }
            return n;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t b = pos_;
        std::size_t e = pos_;
        auto digits = [&] {
            while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) ++e;
        };
        digits();
        if (e < src_.size() && src_[e] == '.') {
            ++e;
            digits();
        }
        if (e < src_.size() && (src_[e] == 'e' || src_[e] == 'E')) {
            std::size_t save = e;
            ++e;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) digits();
            else e = save;
        }
        double v = 0.0;
        const auto res = std::from_chars(src_.data() + b, src_.data() + e, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + e) fail_at("malformed number", b);
        pos_ = e;
        auto n = std::make_shared<Expr::Node>();
        n->kind = NodeKind::Number;
        n->value = v;
        n->begin = b;
        n->end = e;
        return n;
    }

    NodePtr call(const std::string& name, std::size_t b) {
        const FuncInfo* info = nullptr;
        for (const auto& fi : kFuncs)
            if (name == fi.name) info = &fi;
        if (!info) fail_at("unknown function '" + name + "'", b);
        std::vector<NodePtr> args;
        if (!accept(")")) {
            for (;;) {
                args.push_back(comparison());
                if (accept(")")) break;
                if (!accept(",")) fail("expected ',' or ')'");
            }
        }
        if (static_cast<int>(args.size()) != info->arity) {
            fail_at(name + "() takes " + std::to_string(info->arity) + " argument(s), got " +
                        std::to_string(args.size()),
                    b);
        }
        auto n = std::make_shared<Expr::Node>();
        n->kind = NodeKind::Call;
        n->func = info->func;
        n->args = std::move(args);
        n->begin = b;
        n->end = pos_;
        return n;
    }

    static constexpr double kPiValue = 3.141592653589793;
    std::string_view src_;
    std::size_t pos_ = 0;
};

struct Evaluator {
    const std::string& src;
    double vars[4];

    std::string text(const Expr::Node& n) const {
        if (n.end > n.begin && n.end <= src.size()) return src.substr(n.begin, n.end - n.begin);
        return "<expr>";
    }

    double operator()(const Expr::Node& n) const {
        switch (n.kind) {
            case NodeKind::Number: return n.value;
            case NodeKind::Var: return vars[n.var];
            case NodeKind::Neg: return -(*this)(*n.args[0]);
            case NodeKind::Add: return (*this)(*n.args[0]) + (*this)(*n.args[1]);
            case NodeKind::Sub: return (*this)(*n.args[0]) - (*this)(*n.args[1]);
            case NodeKind::Mul: return (*this)(*n.args[0]) * (*this)(*n.args[1]);
            case NodeKind::Div: return (*this)(*n.args[0]) / (*this)(*n.args[1]);
            case NodeKind::Pow: return std::pow((*this)(*n.args[0]), (*this)(*n.args[1]));
            case NodeKind::Lt: return (*this)(*n.args[0]) < (*this)(*n.args[1]) ? 1.0 : 0.0;
            case NodeKind::Le: return (*this)(*n.args[0]) <= (*this)(*n.args[1]) ? 1.0 : 0.0;
            case NodeKind::Gt: return (*this)(*n.args[0]) > (*this)(*n.args[1]) ? 1.0 : 0.0;
            case NodeKind::Ge: return (*this)(*n.args[0]) >= (*this)(*n.args[1]) ? 1.0 : 0.0;
            case NodeKind::Eq: return (*this)(*n.args[0]) == (*this)(*n.args[1]) ? 1.0 : 0.0;
            case NodeKind::Call: return call(n);
        }
        return 0.0;
    }

    double call(const Expr::Node& n) const {
        if (n.func == Func::Where) {
            return (*this)(*n.args[0]) != 0.0 ? (*this)(*n.args[1]) : (*this)(*n.args[2]);
        }
        const double a = (*this)(*n.args[0]);
        switch (n.func) {
            case Func::Sin: return std::sin(a);
            case Func::Cos: return std::cos(a);
            case Func::Tan: return std::tan(a);
            case Func::Exp: return std::exp(a);
            case Func::Tanh: return std::tanh(a);
            case Func::Abs: return std::abs(a);
            case Func::Log:
                if (!(a > 0.0)) throw EvalError("log of non-positive value " + std::to_string(a), text(n));
                return std::log(a);
            case Func::Sqrt:
                if (a < 0.0) throw EvalError("sqrt of negative value " + std::to_string(a), text(n));
                return std::sqrt(a);
            case Func::Min: return std::min(a, (*this)(*n.args[1]));
            case Func::Max: return std::max(a, (*this)(*n.args[1]));
            case Func::Where: break;
        }
        return 0.0;
    }
};

void print_node(const Expr::Node& n, std::string& out) {
    auto bin = [&](const char* op) {
        out += '(';
        print_node(*n.args[0], out);
        out += op;
        print_node(*n.args[1], out);
        out += ')';
    };
    switch (n.kind) {
        case NodeKind::Number: {
            if (n.named_pi) {
                out += "pi";
                break;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            if (!std::isfinite(n.value)) out += "(1 / 0)";
            else out += buf;
            break;
        }
        case NodeKind::Var: out += "xyzt"[n.var]; break;
        case NodeKind::Neg:
            out += "(-";
            print_node(*n.args[0], out);
            out += ')';
            break;
        case NodeKind::Add: bin(" + "); break;
        case NodeKind::Sub: bin(" - "); break;
        case NodeKind::Mul: bin(" * "); break;
        case NodeKind::Div: bin(" / "); break;
        case NodeKind::Pow: bin(" ^ "); break;
        case NodeKind::Lt: bin(" < "); break;
        case NodeKind::Le: bin(" <= "); break;
        case NodeKind::Gt: bin(" > "); break;
        case NodeKind::Ge: bin(" >= "); break;
        case NodeKind::Eq: bin(" == "); break;
        case NodeKind::Call:
            out += func_name(n.func);
            out += '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                print_node(*n.args[i], out);
            }
            out += ')';
            break;
    }
}

bool uses_var(const Expr::Node& n, int lo, int hi) {
    if (n.kind == NodeKind::Var) return n.var >= lo && n.var <= hi;
    for (const auto& a : n.args)
        if (uses_var(*a, lo, hi)) return true;
    return false;
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

Expr Expr::parse(std::string_view source) {
    Parser p(source);
    NodePtr root = p.parse_all();
    return Expr(std::move(root), std::string(source));
}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Number;
    n->value = value;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return Expr(std::move(n), buf);
}

double Expr::eval(double x, double y, double z, double t) const {
    Evaluator ev{source_, {x, y, z, t}};
    return ev(*root_);
}

std::string Expr::print() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

bool Expr::depends_on_space() const { return uses_var(*root_, 0, 2); }
bool Expr::depends_on_time() const { return uses_var(*root_, 3, 3); }
bool Expr::is_constant() const { return root_->kind == NodeKind::Number; }

}  // namespace magnex
