#include "rdi/matrix.hpp"

namespace rdi {

ExprMat ExprMat::transposed() const {
    ExprMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

ExprMat operator*(const ExprMat& a, const ExprMat& b) {
    assert(a.cols_ == b.rows_);
    ExprMat r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < b.cols_; ++j) {
            Expr s(0.0);
            for (int k = 0; k < a.cols_; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

ExprMat operator+(const ExprMat& a, const ExprMat& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    ExprMat r(a.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < a.cols_; ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

ExprMat operator-(const ExprMat& a, const ExprMat& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    ExprMat r(a.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < a.cols_; ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

std::vector<Expr> ExprMat::apply(std::span<const Expr> v) const {
    assert(static_cast<int>(v.size()) == cols_);
    std::vector<Expr> r;
    r.reserve(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) {
        Expr s(0.0);
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[static_cast<std::size_t>(j)];
        r.push_back(s);
    }
    return r;
}

namespace {

ExprMat minor_of(const ExprMat& m, int row, int col) {
    ExprMat r(m.rows() - 1, m.cols() - 1);
    for (int i = 0, ri = 0; i < m.rows(); ++i) {
        if (i == row) continue;
        for (int j = 0, rj = 0; j < m.cols(); ++j) {
            if (j == col) continue;
            r(ri, rj) = m(i, j);
            ++rj;
        }
        ++ri;
    }
    return r;
}

} // namespace

Expr det(const ExprMat& m) {
    assert(m.rows() == m.cols());
    int n = m.rows();
    if (n == 0) return Expr(1.0);
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Expr s(0.0);
    for (int j = 0; j < n; ++j) {
        Expr term = m(0, j) * det(minor_of(m, 0, j));
        s += (j % 2 == 0) ? term : -term;
    }
    return s;
}

ExprMat adjugate(const ExprMat& m) {
    assert(m.rows() == m.cols());
    int n = m.rows();
    ExprMat r(n, n);
    if (n == 1) {
        r(0, 0) = Expr(1.0);
        return r;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr c = det(minor_of(m, i, j));
            r(j, i) = ((i + j) % 2 == 0) ? c : -c;
        }
    return r;
}

ComplexExpr operator+(const ComplexExpr& a, const ComplexExpr& b) {
    return {a.re + b.re, a.im + b.im};
}

ComplexExpr operator-(const ComplexExpr& a, const ComplexExpr& b) {
    return {a.re - b.re, a.im - b.im};
}

ComplexExpr operator*(const ComplexExpr& a, const ComplexExpr& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexExpr operator-(const ComplexExpr& a) { return {-a.re, -a.im}; }

ComplexExpr operator*(const Expr& a, const ComplexExpr& b) {
    return {a * b.re, a * b.im};
}

ComplexMat ComplexMat::adjoint() const {
    ComplexMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j).conj();
    return r;
}

ComplexMat operator*(const ComplexMat& a, const ComplexMat& b) {
    assert(a.cols_ == b.rows_);
    ComplexMat r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < b.cols_; ++j) {
            ComplexExpr s;
            for (int k = 0; k < a.cols_; ++k) s = s + a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

ComplexMat operator+(const ComplexMat& a, const ComplexMat& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    ComplexMat r(a.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < a.cols_; ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

ComplexMat operator-(const ComplexMat& a, const ComplexMat& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    ComplexMat r(a.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < a.cols_; ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

std::vector<ComplexExpr> ComplexMat::apply(std::span<const ComplexExpr> v) const {
    assert(static_cast<int>(v.size()) == cols_);
    std::vector<ComplexExpr> r(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) {
        ComplexExpr s;
        for (int j = 0; j < cols_; ++j)
            s = s + (*this)(i, j) * v[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] = s;
    }
    return r;
}

ComplexMat operator*(const ComplexExpr& a, const ComplexMat& b) {
    ComplexMat r(b.rows(), b.cols());
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) r(i, j) = a * b(i, j);
    return r;
}

ExprMat map_entries(const ExprMat& m, const Substitution& s) {
    ExprMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = substitute(m(i, j), s);
    return r;
}

ComplexMat map_entries(const ComplexMat& m, const Substitution& s) {
    ComplexMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            r(i, j) = ComplexExpr(substitute(m(i, j).re, s),
                                  substitute(m(i, j).im, s));
    return r;
}

ComplexMat diff_entries(const ComplexMat& m, VarKind kind, int index) {
    ComplexMat r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            r(i, j) = ComplexExpr(diff(m(i, j).re, kind, index),
                                  diff(m(i, j).im, kind, index));
    return r;
}

} // namespace rdi
