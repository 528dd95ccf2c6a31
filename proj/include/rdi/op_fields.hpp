#pragma once

#include "rdi/geometry.hpp"
#include "rdi/report.hpp"

namespace rdi {

// A family of linear maps C^{d1} -> C^{d2} varying over the base
// coordinates l1..lk.
struct OperatorField {
    ComplexMat entries;

    int dim_in() const { return entries.cols(); }
    int dim_out() const { return entries.rows(); }

    OperatorField adjoint() const { return {entries.adjoint()}; }

    static OperatorField identity(int d) {
        return {ComplexMat::identity(d)};
    }
};

OperatorField operator*(const OperatorField& a, const OperatorField& b);
OperatorField operator+(const OperatorField& a, const OperatorField& b);
OperatorField operator-(const OperatorField& a, const OperatorField& b);
OperatorField operator*(const Expr& f, const OperatorField& a);

// Connection on the constant field C^d over the base: the covariant
// derivative along X is X + Gamma(X) with Gamma(d/dl_j) = gamma_j.
class MatrixConnection {
public:
    explicit MatrixConnection(std::vector<ComplexMat> gamma);

    static MatrixConnection flat(int dim, int base_dim);

    int dim() const { return dim_; }
    int base_dim() const { return static_cast<int>(gamma_.size()); }

    // Gamma(X) = sum_j X^j gamma_j.
    ComplexMat of(const VectorField& X) const;

    double anti_hermitian_residual(std::span<const double> lambda) const;

private:
    int dim_;
    std::vector<ComplexMat> gamma_;
};

// Entrywise derivative of the operator field along a base field.
OperatorField field_derivative(const OperatorField& A, const VectorField& X);

// Induced derivative between two connected fields:
//   X(A) + Gamma_out(X) A - A Gamma_in(X).
OperatorField nabla_hat(const OperatorField& A, const MatrixConnection& in,
                        const MatrixConnection& out, const VectorField& X);

// Largest entrywise |a - b| over the given base points.
double max_entry_residual(const ComplexMat& a, const ComplexMat& b,
                          std::span<const std::vector<double>> lambda_points);

// Residuals of the induced-derivative calculus: direction additivity and
// scalar linearity, the product rule over base functions, compatibility with
// the constant-fiber pairing, and the adjoint relation.
std::vector<CheckReport> prop_con_checks(
    const OperatorField& A, const MatrixConnection& in,
    const MatrixConnection& out, const VectorField& X, const VectorField& Y,
    const Expr& f, std::span<const std::vector<double>> lambda_points,
    double tol);

// Residual of nabla_hat(AB) = nabla_hat(A) B + A nabla_hat(B) across three
// connected fields.
CheckReport leibniz_check(const OperatorField& A, const OperatorField& B,
                          const MatrixConnection& c1,
                          const MatrixConnection& c2,
                          const MatrixConnection& c3, const VectorField& X,
                          std::span<const std::vector<double>> lambda_points,
                          double tol);

// Transition identity for tau conjugating two trivialized connections:
// compares the plain derivative of tau against tau a_i - a_j tau. The
// report's abs_err is that residual; oracle[0] records the residual of the
// variant with a_i in both slots, which is expected NOT to vanish for
// generic data.
CheckReport transition_relation_check(
    const OperatorField& tau, const OperatorField& a_i,
    const OperatorField& a_j, const VectorField& X,
    std::span<const std::vector<double>> lambda_points, double tol);

} // namespace rdi
