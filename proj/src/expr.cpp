#include "rdi/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace rdi {

ParseError::ParseError(std::string msg, std::size_t offset)
    : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

Expr::Expr(double c) {
    Node n;
    n.op = Op::Const;
    n.value = c;
    node_ = std::make_shared<const Node>(std::move(n));
}

Expr Expr::make(Node n) {
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::var(VarKind kind, int index) {
    Node n;
    n.op = Op::Var;
    n.kind = kind;
    n.index = index;
    return make(std::move(n));
}

namespace {

bool is_neg_of(const Expr& a, const Expr& b) {
    return a.op() == Expr::Op::Neg && a.node().kids[0].same_node(b);
}

} // namespace

Expr operator+(const Expr& a, const Expr& b) {
    std::vector<Expr> kids;
    double c = 0.0;
    auto absorb = [&](const Expr& e) {
        if (e.op() == Expr::Op::Add) {
            for (const Expr& k : e.node().kids) {
                if (k.is_const()) c += k.const_value();
                else kids.push_back(k);
            }
        } else if (e.is_const()) {
            c += e.const_value();
        } else {
            kids.push_back(e);
        }
    };
    absorb(a);
    absorb(b);
    if (c != 0.0 || kids.empty()) kids.push_back(Expr(c));
    if (kids.size() == 1) return kids[0];
    Expr::Node n;
    n.op = Expr::Op::Add;
    n.kids = std::move(kids);
    return Expr::make(std::move(n));
}

Expr operator-(const Expr& a) {
    if (a.is_const()) return Expr(-a.const_value());
    if (a.op() == Expr::Op::Neg) return a.node().kids[0];
    Expr::Node n;
    n.op = Expr::Op::Neg;
    n.kids = {a};
    return Expr::make(std::move(n));
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.same_node(b)) return Expr(0.0);
    return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
    std::vector<Expr> kids;
    double c = 1.0;
    bool zero = false;
    auto absorb = [&](const Expr& e) {
        if (e.op() == Expr::Op::Mul) {
            for (const Expr& k : e.node().kids) {
                if (k.is_const()) c *= k.const_value();
                else kids.push_back(k);
            }
        } else if (e.op() == Expr::Op::Neg) {
            c = -c;
            kids.push_back(e.node().kids[0]);
        } else if (e.is_const()) {
            if (e.const_value() == 0.0) zero = true;
            c *= e.const_value();
        } else {
            kids.push_back(e);
        }
    };
    absorb(a);
    absorb(b);
    if (zero || c == 0.0) return Expr(0.0);
    if (kids.empty()) return Expr(c);
    if (c == -1.0 && kids.size() == 1) return -kids[0];
    if (c != 1.0) kids.insert(kids.begin(), Expr(c));
    if (kids.size() == 1) return kids[0];
    Expr::Node n;
    n.op = Expr::Op::Mul;
    n.kids = std::move(kids);
    return Expr::make(std::move(n));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_zero() && !b.is_zero()) return Expr(0.0);
    if (b.is_one()) return a;
    if (a.is_const() && b.is_const() && b.const_value() != 0.0)
        return Expr(a.const_value() / b.const_value());
    if (a.same_node(b)) return Expr(1.0);
    if (is_neg_of(a, b) || is_neg_of(b, a)) return Expr(-1.0);
    Expr::Node n;
    n.op = Expr::Op::Div;
    n.kids = {a, b};
    return Expr::make(std::move(n));
}

Expr pow(const Expr& a, const Expr& b) {
    if (b.is_const()) {
        double e = b.const_value();
        if (e == 0.0) return Expr(1.0);
        if (e == 1.0) return a;
        if (a.is_const()) return Expr(std::pow(a.const_value(), e));
    }
    Expr::Node n;
    n.op = Expr::Op::Pow;
    n.kids = {a, b};
    return Expr::make(std::move(n));
}

namespace {

Expr unary(Expr::Op op, const Expr& a, double (*f)(double)) {
    if (a.is_const()) return Expr(f(a.const_value()));
    Expr::Node n;
    n.op = op;
    n.kids = {a};
    return Expr::make(std::move(n));
}

} // namespace

Expr sin(const Expr& a) { return unary(Expr::Op::Sin, a, std::sin); }
Expr cos(const Expr& a) { return unary(Expr::Op::Cos, a, std::cos); }
Expr exp(const Expr& a) { return unary(Expr::Op::Exp, a, std::exp); }
Expr log(const Expr& a) { return unary(Expr::Op::Log, a, std::log); }
Expr sqrt(const Expr& a) { return unary(Expr::Op::Sqrt, a, std::sqrt); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void domain_error(const char* what, const Expr& e) {
    throw EvalError(std::string(what) + " in subexpression: " + e.str());
}

double lookup(Point p, VarKind kind, int index, const Expr& e) {
    std::span<const double> slot;
    switch (kind) {
    case VarKind::Ambient: slot = p.ambient; break;
    case VarKind::Base: slot = p.base; break;
    case VarKind::Param: slot = p.param; break;
    }
    if (index < 0 || static_cast<std::size_t>(index) >= slot.size())
        domain_error("coordinate not supplied", e);
    return slot[static_cast<std::size_t>(index)];
}

double eval_node(const Expr& e, Point p,
                 std::unordered_map<const Expr::Node*, double>& memo) {
    const Expr::Node& n = e.node();
    if (n.op == Expr::Op::Const) return n.value;
    if (auto it = memo.find(e.raw()); it != memo.end()) return it->second;
    double r = 0.0;
    auto kid = [&](std::size_t i) { return eval_node(n.kids[i], p, memo); };
    switch (n.op) {
    case Expr::Op::Const:
        break;
    case Expr::Op::Var:
        r = lookup(p, n.kind, n.index, e);
        break;
    case Expr::Op::Add:
        for (const Expr& k : n.kids) r += eval_node(k, p, memo);
        break;
    case Expr::Op::Mul:
        r = 1.0;
        for (const Expr& k : n.kids) r *= eval_node(k, p, memo);
        break;
    case Expr::Op::Div: {
        double den = kid(1);
        if (den == 0.0) domain_error("division by zero", e);
        r = kid(0) / den;
        break;
    }
    case Expr::Op::Pow:
        r = std::pow(kid(0), kid(1));
        if (!std::isfinite(r)) domain_error("invalid power", e);
        break;
    case Expr::Op::Neg: r = -kid(0); break;
    case Expr::Op::Sin: r = std::sin(kid(0)); break;
    case Expr::Op::Cos: r = std::cos(kid(0)); break;
    case Expr::Op::Exp: r = std::exp(kid(0)); break;
    case Expr::Op::Log: {
        double x = kid(0);
        if (x <= 0.0) domain_error("log of non-positive value", e);
        r = std::log(x);
        break;
    }
    case Expr::Op::Sqrt: {
        double x = kid(0);
        if (x < 0.0) domain_error("sqrt of negative value", e);
        r = std::sqrt(x);
        break;
    }
    }
    memo.emplace(e.raw(), r);
    return r;
}

} // namespace

double Evaluator::eval(const Expr& e) {
    roots_.push_back(e);
    return eval_node(e, point_, memo_);
}

double eval(const Expr& e, Point p) {
    Evaluator ev(p);
    return ev.eval(e);
}

double eval(const Expr& e, std::span<const double> ambient,
            std::span<const double> base) {
    return eval(e, Point{ambient, base, {}});
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

struct DiffCtx {
    VarKind kind;
    int index;
    std::unordered_map<const Expr::Node*, Expr> memo;
};

Expr diff_node(const Expr& e, DiffCtx& ctx) {
    const Expr::Node& n = e.node();
    if (n.op == Expr::Op::Const) return Expr(0.0);
    if (n.op == Expr::Op::Var)
        return Expr(n.kind == ctx.kind && n.index == ctx.index ? 1.0 : 0.0);
    if (auto it = ctx.memo.find(e.raw()); it != ctx.memo.end())
        return it->second;
    Expr r;
    switch (n.op) {
    case Expr::Op::Add: {
        r = Expr(0.0);
        for (const Expr& k : n.kids) r += diff_node(k, ctx);
        break;
    }
    case Expr::Op::Mul: {
        r = Expr(0.0);
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
            Expr term = diff_node(n.kids[i], ctx);
            for (std::size_t j = 0; j < n.kids.size(); ++j)
                if (j != i) term = term * n.kids[j];
            r += term;
        }
        break;
    }
    case Expr::Op::Div: {
        const Expr& a = n.kids[0];
        const Expr& b = n.kids[1];
        r = (diff_node(a, ctx) * b - a * diff_node(b, ctx)) / (b * b);
        break;
    }
    case Expr::Op::Pow: {
        const Expr& a = n.kids[0];
        const Expr& b = n.kids[1];
        Expr da = diff_node(a, ctx);
        if (b.is_const()) {
            double c = b.const_value();
            r = Expr(c) * pow(a, Expr(c - 1.0)) * da;
        } else {
            Expr db = diff_node(b, ctx);
            r = e * (db * log(a) + b * da / a);
        }
        break;
    }
    case Expr::Op::Neg: r = -diff_node(n.kids[0], ctx); break;
    case Expr::Op::Sin: r = cos(n.kids[0]) * diff_node(n.kids[0], ctx); break;
    case Expr::Op::Cos: r = -(sin(n.kids[0]) * diff_node(n.kids[0], ctx)); break;
    case Expr::Op::Exp: r = e * diff_node(n.kids[0], ctx); break;
    case Expr::Op::Log: r = diff_node(n.kids[0], ctx) / n.kids[0]; break;
    case Expr::Op::Sqrt:
        r = diff_node(n.kids[0], ctx) / (Expr(2.0) * e);
        break;
    default: r = Expr(0.0); break;
    }
    ctx.memo.emplace(e.raw(), r);
    return r;
}

} // namespace

Expr diff(const Expr& e, VarKind kind, int index) {
    DiffCtx ctx{kind, index, {}};
    return diff_node(e, ctx);
}

// ---------------------------------------------------------------------------
// Simplify / substitute: rebuild bottom-up through the smart constructors.
// ---------------------------------------------------------------------------

namespace {

template <typename Leaf>
Expr rebuild(const Expr& e, std::unordered_map<const Expr::Node*, Expr>& memo,
             Leaf&& leaf) {
    const Expr::Node& n = e.node();
    if (n.op == Expr::Op::Const) return e;
    if (n.op == Expr::Op::Var) return leaf(e);
    if (auto it = memo.find(e.raw()); it != memo.end()) return it->second;
    std::vector<Expr> kids;
    kids.reserve(n.kids.size());
    for (const Expr& k : n.kids) kids.push_back(rebuild(k, memo, leaf));
    Expr r;
    switch (n.op) {
    case Expr::Op::Add:
        r = Expr(0.0);
        for (const Expr& k : kids) r += k;
        break;
    case Expr::Op::Mul:
        r = Expr(1.0);
        for (const Expr& k : kids) r *= k;
        break;
    case Expr::Op::Div: r = kids[0] / kids[1]; break;
    case Expr::Op::Pow: r = pow(kids[0], kids[1]); break;
    case Expr::Op::Neg: r = -kids[0]; break;
    case Expr::Op::Sin: r = sin(kids[0]); break;
    case Expr::Op::Cos: r = cos(kids[0]); break;
    case Expr::Op::Exp: r = exp(kids[0]); break;
    case Expr::Op::Log: r = log(kids[0]); break;
    case Expr::Op::Sqrt: r = sqrt(kids[0]); break;
    default: r = e; break;
    }
    memo.emplace(e.raw(), r);
    return r;
}

} // namespace

Expr simplify(const Expr& e) {
    std::unordered_map<const Expr::Node*, Expr> memo;
    return rebuild(e, memo, [](const Expr& v) { return v; });
}

Expr substitute(const Expr& e, const Substitution& s) {
    std::unordered_map<const Expr::Node*, Expr> memo;
    return rebuild(e, memo, [&](const Expr& v) -> Expr {
        const Expr::Node& n = v.node();
        const std::vector<Expr>* slot = nullptr;
        switch (n.kind) {
        case VarKind::Ambient: slot = &s.ambient; break;
        case VarKind::Base: slot = &s.base; break;
        case VarKind::Param: slot = &s.param; break;
        }
        if (slot->empty()) return v;
        if (n.index < 0 || static_cast<std::size_t>(n.index) >= slot->size())
            throw EvalError("substitution missing coordinate for " + v.str());
        return (*slot)[static_cast<std::size_t>(n.index)];
    });
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence: Add 1, Mul/Div 2, Neg 3, Pow 4, atom 5.
int prec(Expr::Op op) {
    switch (op) {
    case Expr::Op::Add: return 1;
    case Expr::Op::Mul:
    case Expr::Op::Div: return 2;
    case Expr::Op::Neg: return 3;
    case Expr::Op::Pow: return 4;
    default: return 5;
    }
}

void print(const Expr& e, std::ostream& os, int parent_prec) {
    const Expr::Node& n = e.node();
    int p = prec(n.op);
    bool parens = p < parent_prec;
    if (parens) os << '(';
    switch (n.op) {
    case Expr::Op::Const: {
        std::ostringstream tmp;
        tmp.precision(17);
        tmp << n.value;
        std::string s = tmp.str();
        if (n.value < 0.0) os << '(' << s << ')';
        else os << s;
        break;
    }
    case Expr::Op::Var:
        os << (n.kind == VarKind::Ambient ? 'x'
               : n.kind == VarKind::Base  ? 'l'
                                          : 't')
           << (n.index + 1);
        break;
    case Expr::Op::Add:
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
            if (i) os << " + ";
            print(n.kids[i], os, p);
        }
        break;
    case Expr::Op::Mul:
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
            if (i) os << "*";
            print(n.kids[i], os, p + 1);
        }
        break;
    case Expr::Op::Div:
        print(n.kids[0], os, p);
        os << "/";
        print(n.kids[1], os, p + 1);
        break;
    case Expr::Op::Pow:
        print(n.kids[0], os, p + 1);
        os << "^";
        print(n.kids[1], os, p + 1);
        break;
    case Expr::Op::Neg:
        os << "-";
        print(n.kids[0], os, p + 1);
        break;
    case Expr::Op::Sin: os << "sin("; print(n.kids[0], os, 0); os << ')'; break;
    case Expr::Op::Cos: os << "cos("; print(n.kids[0], os, 0); os << ')'; break;
    case Expr::Op::Exp: os << "exp("; print(n.kids[0], os, 0); os << ')'; break;
    case Expr::Op::Log: os << "log("; print(n.kids[0], os, 0); os << ')'; break;
    case Expr::Op::Sqrt: os << "sqrt("; print(n.kids[0], os, 0); os << ')'; break;
    }
    if (parens) os << ')';
}

} // namespace

std::string Expr::str() const {
    std::ostringstream os;
    print(*this, os, 0);
    return os.str();
}

// ---------------------------------------------------------------------------
// Parser (recursive descent, grammar in the header)
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    std::string_view src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
            ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < src.size() && src[pos] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept('+')) e = e + parse_term();
            else if (accept('-')) e = e - parse_term();
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (accept('*')) e = e * parse_factor();
            else if (accept('/')) e = e / parse_factor();
            else return e;
        }
    }

    Expr parse_factor() {
        Expr e = parse_atom();
        if (accept('^')) return pow(e, parse_atom());
        return e;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of input");
        char c = src[pos];
        if (c == '-') {
            ++pos;
            return -parse_atom();
        }
        if (c == '(') {
            ++pos;
            Expr e = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return parse_ident();
        fail("unexpected character");
    }

    Expr parse_number() {
        std::size_t start = pos;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
            ++pos;
        if (pos < src.size() && src[pos] == '.') {
            ++pos;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
                ++pos;
        }
        if (pos + 1 < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            std::size_t save = pos;
            std::size_t q = pos + 1;
            if (q < src.size() && (src[q] == '+' || src[q] == '-')) ++q;
            if (q < src.size() && std::isdigit(static_cast<unsigned char>(src[q]))) {
                pos = q;
                while (pos < src.size() &&
                       std::isdigit(static_cast<unsigned char>(src[pos])))
                    ++pos;
            } else {
                pos = save;
            }
        }
        if (pos == start || (pos == start + 1 && src[start] == '.'))
            fail("malformed number");
        return Expr(std::stod(std::string(src.substr(start, pos - start))));
    }

    Expr parse_ident() {
        std::size_t start = pos;
        while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos])))
            ++pos;
        std::string name(src.substr(start, pos - start));
        static const std::map<std::string, Expr (*)(const Expr&)> funcs = {
            {"sin", static_cast<Expr (*)(const Expr&)>(&rdi::sin)},
            {"cos", static_cast<Expr (*)(const Expr&)>(&rdi::cos)},
            {"exp", static_cast<Expr (*)(const Expr&)>(&rdi::exp)},
            {"log", static_cast<Expr (*)(const Expr&)>(&rdi::log)},
            {"sqrt", static_cast<Expr (*)(const Expr&)>(&rdi::sqrt)},
        };
        if (auto it = funcs.find(name); it != funcs.end()) {
            if (!accept('(')) fail("expected '(' after function name");
            Expr arg = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return it->second(arg);
        }
        if (name.size() == 1 && (name[0] == 'x' || name[0] == 'l' || name[0] == 't')) {
            std::size_t dstart = pos;
            while (pos < src.size() &&
                   std::isdigit(static_cast<unsigned char>(src[pos])))
                ++pos;
            if (pos == dstart) fail("expected coordinate index");
            int idx = std::stoi(std::string(src.substr(dstart, pos - dstart)));
            if (idx < 1) fail("coordinate indices are 1-based");
            VarKind kind = name[0] == 'x'   ? VarKind::Ambient
                           : name[0] == 'l' ? VarKind::Base
                                            : VarKind::Param;
            return Expr::var(kind, idx - 1);
        }
        pos = start;
        fail("unknown identifier '" + name + "'");
    }
};

} // namespace

Expr parse(std::string_view src) {
    Parser p{src};
    Expr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size()) p.fail("trailing input");
    return e;
}

} // namespace rdi
