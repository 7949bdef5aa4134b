#include "pmc/cli/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pmc::cli {

enum class Kind { Number, Eps, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

struct Expression::Node {
    Kind kind;
    double value = 0.0;  // Number
    int var = 0;         // Var: 0..n-1 for x, n for s
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr number(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Number;
    n->value = v;
    return n;
}

bool is_number(const NodePtr& n, double v) { return n->kind == Kind::Number && n->value == v; }

NodePtr add(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    if (a->kind == Kind::Number && b->kind == Kind::Number) return number(a->value + b->value);
    return make(Kind::Add, a, b);
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_number(b, 0.0)) return a;
    if (a->kind == Kind::Number && b->kind == Kind::Number) return number(a->value - b->value);
    if (is_number(a, 0.0)) return make(Kind::Neg, b);
    return make(Kind::Sub, a, b);
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0) || is_number(b, 0.0)) return number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    if (a->kind == Kind::Number && b->kind == Kind::Number) return number(a->value * b->value);
    return make(Kind::Mul, a, b);
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0)) return number(0.0);
    if (is_number(b, 1.0)) return a;
    return make(Kind::Div, a, b);
}

NodePtr neg(NodePtr a) {
    if (a->kind == Kind::Number) return number(-a->value);
    return make(Kind::Neg, a);
}

class Parser {
public:
    Parser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    NodePtr run() {
        NodePtr e = expr();
        skip();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression '" + text_ + "': " + what + " at column " + std::to_string(pos_ + 1));
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            if (accept('+')) {
                left = make(Kind::Add, left, term());
            } else if (accept('-')) {
                left = make(Kind::Sub, left, term());
            } else {
                return left;
            }
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            if (accept('*')) {
                left = make(Kind::Mul, left, unary());
            } else if (accept('/')) {
                left = make(Kind::Div, left, unary());
            } else {
                return left;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Kind::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Kind::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end");
        const char c = text_[pos_];
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(text_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return number(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            if (name == "sin" || name == "cos" || name == "exp") {
                if (!accept('(')) fail("expected '(' after " + name);
                NodePtr arg = expr();
                if (!accept(')')) fail("expected ')'");
                return make(name == "sin" ? Kind::Sin : name == "cos" ? Kind::Cos : Kind::Exp, arg);
            }
            if (name == "pi") return number(std::numbers::pi);
            if (name == "eps") return make(Kind::Eps);
            if (name == "s") {
                auto n = std::make_shared<Expression::Node>();
                n->kind = Kind::Var;
                n->var = dim_;
                return n;
            }
            if (name.size() >= 2 && name[0] == 'x' && std::isdigit(static_cast<unsigned char>(name[1]))) {
                const int k = std::stoi(name.substr(1));
                if (k < 1 || k > dim_ || name.size() > 2) {
                    pos_ = start;
                    fail("unknown variable '" + name + "' (dimension " + std::to_string(dim_) + ")");
                }
                auto n = std::make_shared<Expression::Node>();
                n->kind = Kind::Var;
                n->var = k - 1;
                return n;
            }
            pos_ = start;
            fail("unknown name '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;
};

bool depends(const NodePtr& n, int var) {
    if (!n) return false;
    if (n->kind == Kind::Var) return n->var == var;
    return depends(n->a, var) || depends(n->b, var);
}

NodePtr derive(const NodePtr& n, int var) {
    switch (n->kind) {
        case Kind::Number:
        case Kind::Eps:
            return number(0.0);
        case Kind::Var:
            return number(n->var == var ? 1.0 : 0.0);
        case Kind::Add:
            return add(derive(n->a, var), derive(n->b, var));
        case Kind::Sub:
            return sub(derive(n->a, var), derive(n->b, var));
        case Kind::Mul:
            return add(mul(derive(n->a, var), n->b), mul(n->a, derive(n->b, var)));
        case Kind::Div:
            return div(sub(mul(derive(n->a, var), n->b), mul(n->a, derive(n->b, var))), mul(n->b, n->b));
        case Kind::Neg:
            return neg(derive(n->a, var));
        case Kind::Sin:
            return mul(make(Kind::Cos, n->a), derive(n->a, var));
        case Kind::Cos:
            return neg(mul(make(Kind::Sin, n->a), derive(n->a, var)));
        case Kind::Exp:
            return mul(n, derive(n->a, var));
        case Kind::Pow: {
            if (depends(n->b, var)) throw ParseError("d/ds of a power with an s-dependent exponent is not supported");
            const NodePtr da = derive(n->a, var);
            if (is_number(da, 0.0)) return number(0.0);
            return mul(mul(n->b, make(Kind::Pow, n->a, sub(n->b, number(1.0)))), da);
        }
    }
    return number(0.0);
}

// Postfix codes: 0 number, 1 var, then one per operator kind.
enum Code { kPush = 0, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSin, kCos, kExp };

int emit(const NodePtr& n, double eps, std::vector<Expression::Compiled::Op>& prog) {
    switch (n->kind) {
        case Kind::Number:
            prog.push_back({kPush, n->value});
            return 1;
        case Kind::Eps:
            prog.push_back({kPush, eps});
            return 1;
        case Kind::Var:
            prog.push_back({kVar, static_cast<double>(n->var)});
            return 1;
        case Kind::Neg:
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp: {
            const int d = emit(n->a, eps, prog);
            prog.push_back({n->kind == Kind::Neg ? kNeg : n->kind == Kind::Sin ? kSin : n->kind == Kind::Cos ? kCos : kExp,
                            0.0});
            return d;
        }
        default: {
            const int da = emit(n->a, eps, prog);
            const int db = emit(n->b, eps, prog);
            int code = kAdd;
            switch (n->kind) {
                case Kind::Sub: code = kSub; break;
                case Kind::Mul: code = kMul; break;
                case Kind::Div: code = kDiv; break;
                case Kind::Pow: code = kPow; break;
                default: break;
            }
            prog.push_back({code, 0.0});
            return std::max(da, db + 1);
        }
    }
}

}  // namespace

Expression Expression::parse(const std::string& text, int dim) {
    if (dim < 1 || dim > 3) throw ParseError("expression dimension must be 1, 2 or 3");
    Parser p(text, dim);
    return Expression(p.run(), text, dim);
}

bool Expression::depends_on_s() const { return depends(root_, dim_); }

Expression Expression::derivative_s() const { return Expression(derive(root_, dim_), "d/ds(" + text_ + ")", dim_); }

Expression::Compiled Expression::compile(double eps) const {
    auto prog = std::make_shared<std::vector<Compiled::Op>>();
    Compiled c;
    c.depth_ = emit(root_, eps, *prog);
    c.program_ = std::move(prog);
    return c;
}

double Expression::Compiled::operator()(std::span<const double> x, double s) const {
    constexpr int kInline = 32;
    double small[kInline] = {};
    std::vector<double> big;
    double* st = small;
    if (depth_ > kInline) {
        big.resize(depth_);
        st = big.data();
    }
    int top = 0;
    const int n = static_cast<int>(x.size());
    for (const auto& op : *program_) {
        switch (op.code) {
            case kPush: st[top++] = op.value; break;
            case kVar: {
                const int k = static_cast<int>(op.value);
                st[top++] = k < n ? x[k] : s;
                break;
            }
            case kAdd: --top; st[top - 1] += st[top]; break;
            case kSub: --top; st[top - 1] -= st[top]; break;
            case kMul: --top; st[top - 1] *= st[top]; break;
            case kDiv: --top; st[top - 1] /= st[top]; break;
            case kPow: --top; st[top - 1] = std::pow(st[top - 1], st[top]); break;
            case kNeg: st[top - 1] = -st[top - 1]; break;
            case kSin: st[top - 1] = std::sin(st[top - 1]); break;
            case kCos: st[top - 1] = std::cos(st[top - 1]); break;
            case kExp: st[top - 1] = std::exp(st[top - 1]); break;
        }
    }
    return st[0];
}

}  // namespace pmc::cli
