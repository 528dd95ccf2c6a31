#pragma once

#include <cassert>
#include <vector>

#include "rdi/expr.hpp"

namespace rdi {

// Small dense matrix of symbolic entries. Dimensions here never exceed the
// ambient dimension, so cofactor expansion is fine for determinants.
class ExprMat {
public:
    ExprMat() : rows_(0), cols_(0) {}
    ExprMat(int rows, int cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * cols, Expr(0.0)) {}

    static ExprMat identity(int n) {
        ExprMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Expr(1.0);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Expr& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    const Expr& operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    ExprMat transposed() const;

    friend ExprMat operator*(const ExprMat& a, const ExprMat& b);
    friend ExprMat operator+(const ExprMat& a, const ExprMat& b);
    friend ExprMat operator-(const ExprMat& a, const ExprMat& b);

    std::vector<Expr> apply(std::span<const Expr> v) const;

private:
    int rows_, cols_;
    std::vector<Expr> data_;
};

Expr det(const ExprMat& m);

// Adjugate (transposed cofactor matrix): m * adjugate(m) = det(m) * I.
ExprMat adjugate(const ExprMat& m);

// Complex scalar as a pair of real expressions; conjugation is structural.
struct ComplexExpr {
    Expr re{0.0};
    Expr im{0.0};

    ComplexExpr() = default;
    ComplexExpr(Expr r) : re(std::move(r)) {}
    ComplexExpr(Expr r, Expr i) : re(std::move(r)), im(std::move(i)) {}
    ComplexExpr(double r) : re(Expr(r)) {}

    static ComplexExpr i() { return ComplexExpr(Expr(0.0), Expr(1.0)); }

    ComplexExpr conj() const { return ComplexExpr(re, -im); }
    Expr norm_sq() const { return re * re + im * im; }
};

ComplexExpr operator+(const ComplexExpr& a, const ComplexExpr& b);
ComplexExpr operator-(const ComplexExpr& a, const ComplexExpr& b);
ComplexExpr operator*(const ComplexExpr& a, const ComplexExpr& b);
ComplexExpr operator-(const ComplexExpr& a);
ComplexExpr operator*(const Expr& a, const ComplexExpr& b);

class ComplexMat {
public:
    ComplexMat() : rows_(0), cols_(0) {}
    ComplexMat(int rows, int cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * cols) {}

    static ComplexMat identity(int n) {
        ComplexMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = ComplexExpr(1.0);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    ComplexExpr& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    const ComplexExpr& operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    // Conjugate transpose.
    ComplexMat adjoint() const;

    friend ComplexMat operator*(const ComplexMat& a, const ComplexMat& b);
    friend ComplexMat operator+(const ComplexMat& a, const ComplexMat& b);
    friend ComplexMat operator-(const ComplexMat& a, const ComplexMat& b);

    std::vector<ComplexExpr> apply(std::span<const ComplexExpr> v) const;

private:
    int rows_, cols_;
    std::vector<ComplexExpr> data_;
};

ComplexMat operator*(const ComplexExpr& a, const ComplexMat& b);

// Entrywise helpers shared by several modules.
ExprMat map_entries(const ExprMat& m, const Substitution& s);
ComplexMat map_entries(const ComplexMat& m, const Substitution& s);
ComplexMat diff_entries(const ComplexMat& m, VarKind kind, int index);

} // namespace rdi
