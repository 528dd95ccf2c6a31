#include "rdi/op_fields.hpp"

#include <chrono>
#include <cmath>

namespace rdi {

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(
               clock::now().time_since_epoch())
        .count();
}

} // namespace

OperatorField operator*(const OperatorField& a, const OperatorField& b) {
    return {a.entries * b.entries};
}
OperatorField operator+(const OperatorField& a, const OperatorField& b) {
    return {a.entries + b.entries};
}
OperatorField operator-(const OperatorField& a, const OperatorField& b) {
    return {a.entries - b.entries};
}
OperatorField operator*(const Expr& f, const OperatorField& a) {
    ComplexMat r(a.entries.rows(), a.entries.cols());
    for (int i = 0; i < r.rows(); ++i)
        for (int j = 0; j < r.cols(); ++j)
            r(i, j) = f * a.entries(i, j);
    return {std::move(r)};
}

MatrixConnection::MatrixConnection(std::vector<ComplexMat> gamma)
    : gamma_(std::move(gamma)) {
    if (gamma_.empty())
        throw DimensionError("connection needs at least one direction");
    dim_ = gamma_.front().rows();
    for (const ComplexMat& m : gamma_)
        if (m.rows() != dim_ || m.cols() != dim_)
            throw DimensionError("connection coefficient is not dim x dim");
}

MatrixConnection MatrixConnection::flat(int dim, int base_dim) {
    return MatrixConnection(std::vector<ComplexMat>(
        static_cast<std::size_t>(base_dim), ComplexMat(dim, dim)));
}

ComplexMat MatrixConnection::of(const VectorField& X) const {
    if (X.domain != VarKind::Base || X.dim() != base_dim())
        throw DimensionError("connection expects a base field");
    ComplexMat r(dim_, dim_);
    for (int j = 0; j < base_dim(); ++j) {
        const Expr& xj = X.components[static_cast<std::size_t>(j)];
        if (xj.is_zero()) continue;
        const ComplexMat& gj = gamma_[static_cast<std::size_t>(j)];
        for (int p = 0; p < dim_; ++p)
            for (int q = 0; q < dim_; ++q)
                r(p, q) = r(p, q) + xj * gj(p, q);
    }
    return r;
}

double MatrixConnection::anti_hermitian_residual(
    std::span<const double> lambda) const {
    Evaluator ev(Point{{}, lambda, {}});
    double worst = 0.0;
    for (const ComplexMat& gj : gamma_) {
        ComplexMat s = gj + gj.adjoint();
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                worst = std::max(worst, std::hypot(ev.eval(s(i, j).re),
                                                   ev.eval(s(i, j).im)));
    }
    return worst;
}

OperatorField field_derivative(const OperatorField& A, const VectorField& X) {
    ComplexMat r(A.entries.rows(), A.entries.cols());
    for (int i = 0; i < r.rows(); ++i)
        for (int j = 0; j < r.cols(); ++j)
            r(i, j) = ComplexExpr(apply_field(X, A.entries(i, j).re),
                                  apply_field(X, A.entries(i, j).im));
    return {std::move(r)};
}

OperatorField nabla_hat(const OperatorField& A, const MatrixConnection& in,
                        const MatrixConnection& out, const VectorField& X) {
    if (in.dim() != A.dim_in() || out.dim() != A.dim_out())
        throw DimensionError("nabla_hat: connection/field dimension mismatch");
    OperatorField r = field_derivative(A, X);
    r.entries = r.entries + out.of(X) * A.entries - A.entries * in.of(X);
    return r;
}

double max_entry_residual(const ComplexMat& a, const ComplexMat& b,
                          std::span<const std::vector<double>> lambda_points) {
    double worst = 0.0;
    for (const auto& lam : lambda_points) {
        Evaluator ev(Point{{}, lam, {}});
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j)
                worst = std::max(
                    worst, std::hypot(ev.eval(a(i, j).re) - ev.eval(b(i, j).re),
                                      ev.eval(a(i, j).im) - ev.eval(b(i, j).im)));
    }
    return worst;
}

std::vector<CheckReport> prop_con_checks(
    const OperatorField& A, const MatrixConnection& in,
    const MatrixConnection& out, const VectorField& X, const VectorField& Y,
    const Expr& f, std::span<const std::vector<double>> lambda_points,
    double tol) {
    std::vector<CheckReport> out_reports;
    auto push = [&](std::string name, std::string ref, double res) {
        out_reports.push_back(
            CheckReport::residual(std::move(name), std::move(ref), res, tol));
    };

    // (i) additivity in the direction and linearity over base functions.
    {
        VectorField sum{VarKind::Base, {}};
        for (int j = 0; j < X.dim(); ++j)
            sum.components.push_back(X.components[static_cast<std::size_t>(j)] +
                                     Y.components[static_cast<std::size_t>(j)]);
        OperatorField lhs = nabla_hat(A, in, out, sum);
        OperatorField rhs = nabla_hat(A, in, out, X) + nabla_hat(A, in, out, Y);
        push("direction_additivity", "derivative is additive in the direction",
             max_entry_residual(lhs.entries, rhs.entries, lambda_points));

        VectorField fX{VarKind::Base, {}};
        for (int j = 0; j < X.dim(); ++j)
            fX.components.push_back(f * X.components[static_cast<std::size_t>(j)]);
        OperatorField lhs2 = nabla_hat(A, in, out, fX);
        OperatorField rhs2 = f * nabla_hat(A, in, out, X);
        push("direction_function_linearity",
             "derivative is linear over base functions in the direction",
             max_entry_residual(lhs2.entries, rhs2.entries, lambda_points));
    }

    // (ii) product rule over base functions.
    {
        OperatorField lhs = nabla_hat(f * A, in, out, X);
        OperatorField rhs = apply_field(X, f) * A + f * nabla_hat(A, in, out, X);
        push("function_product_rule",
             "derivative of f A is X(f) A + f times the derivative",
             max_entry_residual(lhs.entries, rhs.entries, lambda_points));
    }

    // (iii) pairing compatibility on constant vectors u, v:
    // X<Au, v> = <dA u, v> + <A Gamma_in(X) u, v> + <Au, Gamma_out(X) v>.
    {
        std::vector<ComplexExpr> u(static_cast<std::size_t>(A.dim_in()));
        std::vector<ComplexExpr> v(static_cast<std::size_t>(A.dim_out()));
        for (int i = 0; i < A.dim_in(); ++i)
            u[static_cast<std::size_t>(i)] =
                ComplexExpr(Expr(0.3 + 0.1 * i), Expr(0.2 - 0.05 * i));
        for (int i = 0; i < A.dim_out(); ++i)
            v[static_cast<std::size_t>(i)] =
                ComplexExpr(Expr(-0.4 + 0.2 * i), Expr(0.1 * i));
        auto pair = [](std::span<const ComplexExpr> a,
                       std::span<const ComplexExpr> b) {
            ComplexExpr s;
            for (std::size_t i = 0; i < a.size(); ++i)
                s = s + a[i] * b[i].conj();
            return s;
        };
        std::vector<ComplexExpr> au = A.entries.apply(u);
        ComplexExpr lhs_pair = pair(au, v);
        ComplexExpr lhs = ComplexExpr(apply_field(X, lhs_pair.re),
                                      apply_field(X, lhs_pair.im));
        std::vector<ComplexExpr> dau =
            nabla_hat(A, in, out, X).entries.apply(u);
        std::vector<ComplexExpr> agu =
            A.entries.apply(in.of(X).apply(u));
        std::vector<ComplexExpr> gv = out.of(X).apply(v);
        ComplexExpr rhs = pair(dau, v) + pair(agu, v) + pair(au, gv);
        ComplexMat l(1, 1), r(1, 1);
        l(0, 0) = lhs;
        r(0, 0) = rhs;
        push("pairing_compatibility",
             "derivative is compatible with the constant-fiber pairing",
             max_entry_residual(l, r, lambda_points));
    }

    // (iv) adjoint relation: the adjoint of the derivative is the derivative
    // of the adjoint with the connections swapped.
    {
        OperatorField lhs = nabla_hat(A, in, out, X).adjoint();
        OperatorField rhs = nabla_hat(A.adjoint(), out, in, X);
        push("adjoint_relation",
             "conjugate transpose commutes with the derivative",
             max_entry_residual(lhs.entries, rhs.entries, lambda_points));
    }
    return out_reports;
}

CheckReport leibniz_check(const OperatorField& A, const OperatorField& B,
                          const MatrixConnection& c1,
                          const MatrixConnection& c2,
                          const MatrixConnection& c3, const VectorField& X,
                          std::span<const std::vector<double>> lambda_points,
                          double tol) {
    double t0 = now_ms();
    if (A.dim_in() != B.dim_out())
        throw DimensionError("leibniz_check: fields are not composable");
    OperatorField lhs = nabla_hat(A * B, c1, c3, X);
    OperatorField rhs = nabla_hat(A, c2, c3, X) * B + A * nabla_hat(B, c1, c2, X);
    CheckReport rep = CheckReport::residual(
        "composition_product_rule",
        "derivative of a composition expands term by term",
        max_entry_residual(lhs.entries, rhs.entries, lambda_points), tol);
    rep.ms = now_ms() - t0;
    return rep;
}

CheckReport transition_relation_check(
    const OperatorField& tau, const OperatorField& a_i,
    const OperatorField& a_j, const VectorField& X,
    std::span<const std::vector<double>> lambda_points, double tol) {
    double t0 = now_ms();
    OperatorField dtau = field_derivative(tau, X);
    OperatorField corrected = tau * a_i - a_j * tau;
    OperatorField printed = tau * a_i - a_i * tau;
    double res_corrected =
        max_entry_residual(dtau.entries, corrected.entries, lambda_points);
    double res_printed =
        max_entry_residual(dtau.entries, printed.entries, lambda_points);
    CheckReport rep = CheckReport::residual(
        "transition_relation",
        "derivative of the transition field against both index conventions",
        res_corrected, tol);
    rep.value = {res_corrected};
    rep.oracle = {res_printed};
    rep.ms = now_ms() - t0;
    return rep;
}

} // namespace rdi
