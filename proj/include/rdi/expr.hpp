#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rdi {

// Coordinate families: x1..xm live on the ambient manifold M, l1..lk on the
// base N, t1..td are chart parameters on a fiber.
enum class VarKind : std::uint8_t { Ambient, Base, Param };

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public std::runtime_error {
public:
    explicit EvalError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Immutable scalar expression DAG. Value-semantic handle to a shared node;
// all building operations fold constants and strip 0/1 identities so that
// repeated differentiation stays tractable.
class Expr {
public:
    enum class Op : std::uint8_t {
        Const, Var, Add, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt
    };

    struct Node {
        Op op;
        double value = 0.0;       // Const
        VarKind kind = VarKind::Ambient;
        int index = 0;            // Var, 0-based
        std::vector<Expr> kids;
    };

    Expr() : Expr(0.0) {}
    explicit Expr(double c);

    static Expr constant(double c) { return Expr(c); }
    static Expr var(VarKind kind, int index);
    static Expr ambient(int index) { return var(VarKind::Ambient, index); }
    static Expr base(int index) { return var(VarKind::Base, index); }
    static Expr param(int index) { return var(VarKind::Param, index); }

    const Node& node() const { return *node_; }
    const Node* raw() const { return node_.get(); }
    Op op() const { return node_->op; }

    bool is_const() const { return node_->op == Op::Const; }
    bool is_zero() const { return is_const() && node_->value == 0.0; }
    bool is_one() const { return is_const() && node_->value == 1.0; }
    double const_value() const { return node_->value; }

    bool same_node(const Expr& other) const { return node_ == other.node_; }

    std::string str() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

    Expr& operator+=(const Expr& b) { return *this = *this + b; }
    Expr& operator-=(const Expr& b) { return *this = *this - b; }
    Expr& operator*=(const Expr& b) { return *this = *this * b; }
    Expr& operator/=(const Expr& b) { return *this = *this / b; }

    static Expr make(Node n);

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& a, const Expr& b);
inline Expr pow(const Expr& a, double b) { return pow(a, Expr(b)); }
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

// Evaluation point: coordinate slots for each variable family. Missing slots
// are an error if the expression references them.
struct Point {
    std::span<const double> ambient{};
    std::span<const double> base{};
    std::span<const double> param{};
};

// Memoizing evaluator. Shared sub-DAGs across several expressions evaluated
// at the same point are computed once. Evaluated roots are retained so that
// memo keys (node addresses) stay valid for the evaluator's lifetime even
// when callers pass temporaries.
class Evaluator {
public:
    explicit Evaluator(Point p) : point_(p) {}
    double eval(const Expr& e);

private:
    Point point_;
    std::vector<Expr> roots_;
    std::unordered_map<const Expr::Node*, double> memo_;
};

double eval(const Expr& e, Point p);
double eval(const Expr& e, std::span<const double> ambient,
            std::span<const double> base = {});

// Exact symbolic partial derivative with respect to one coordinate.
Expr diff(const Expr& e, VarKind kind, int index);

// Conservative simplification: constant folding, 0/1 elimination, flattening
// of nested sums/products. Evaluation-equivalent to the input.
Expr simplify(const Expr& e);

// Substitution maps, indexed by coordinate. An empty vector leaves that
// family untouched.
struct Substitution {
    std::vector<Expr> ambient{};
    std::vector<Expr> base{};
    std::vector<Expr> param{};
};

Expr substitute(const Expr& e, const Substitution& s);

// Parser for the expression grammar:
//   expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
//   factor := atom ('^' atom)? ;
//   atom := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom ;
//   ident := 'x'digits | 'l'digits | 't'digits | 'sin'|'cos'|'exp'|'log'|'sqrt'
Expr parse(std::string_view src);

} // namespace rdi
