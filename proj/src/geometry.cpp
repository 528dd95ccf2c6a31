#include "rdi/geometry.hpp"

namespace rdi {

Metric::Metric(ExprMat entries, VarKind coords)
    : entries_(std::move(entries)), coords_(coords) {
    if (entries_.rows() != entries_.cols())
        throw DimensionError("metric matrix must be square");
    for (int i = 0; i < entries_.rows(); ++i)
        for (int j = 0; j < i; ++j)
            if (!entries_(i, j).same_node(entries_(j, i)))
                entries_(i, j) = entries_(j, i);  // enforce structural symmetry
    det_ = simplify(det(entries_));
    adj_ = adjugate(entries_);
    sqrt_det_ = det_.is_one() ? Expr(1.0) : sqrt(det_);
    euclidean_ = true;
    for (int i = 0; i < entries_.rows() && euclidean_; ++i)
        for (int j = 0; j < entries_.cols() && euclidean_; ++j)
            euclidean_ = (i == j) ? entries_(i, j).is_one()
                                  : entries_(i, j).is_zero();
}

Metric Metric::euclidean(int dim, VarKind coords) {
    return Metric(ExprMat::identity(dim), coords);
}

Metric Metric::conformal(const Expr& u, int dim, VarKind coords) {
    ExprMat m(dim, dim);
    Expr factor = exp(Expr(2.0) * u);
    for (int i = 0; i < dim; ++i) m(i, i) = factor;
    return Metric(std::move(m), coords);
}

ExprMat Metric::inverse() const {
    ExprMat inv(dim(), dim());
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j)
            inv(i, j) = det_.is_one() ? adj_(i, j) : adj_(i, j) / det_;
    return inv;
}

VectorField VectorField::coordinate(VarKind domain, int dim, int index) {
    VectorField v{domain, std::vector<Expr>(static_cast<std::size_t>(dim), Expr(0.0))};
    v.components[static_cast<std::size_t>(index)] = Expr(1.0);
    return v;
}

VectorField VectorField::zero(VarKind domain, int dim) {
    return {domain, std::vector<Expr>(static_cast<std::size_t>(dim), Expr(0.0))};
}

Expr apply_field(const VectorField& Y, const Expr& f) {
    Expr s(0.0);
    for (int i = 0; i < Y.dim(); ++i)
        s += Y.components[static_cast<std::size_t>(i)] * diff(f, Y.domain, i);
    return s;
}

VectorField gradient(const Expr& f, const Metric& g) {
    ExprMat inv = g.inverse();
    VectorField r{g.coords(), {}};
    r.components.reserve(static_cast<std::size_t>(g.dim()));
    for (int i = 0; i < g.dim(); ++i) {
        Expr s(0.0);
        for (int j = 0; j < g.dim(); ++j)
            s += inv(i, j) * diff(f, g.coords(), j);
        r.components.push_back(s);
    }
    return r;
}

Expr divergence(const VectorField& Y, const Metric& g) {
    if (Y.dim() != g.dim() || Y.domain != g.coords())
        throw DimensionError("divergence: field/metric dimension mismatch");
    const Expr& w = g.sqrt_det();
    Expr s(0.0);
    for (int i = 0; i < g.dim(); ++i)
        s += diff(w * Y.components[static_cast<std::size_t>(i)], g.coords(), i);
    return w.is_one() ? s : s / w;
}

Expr divergence_weighted(const VectorField& Y, const Metric& g, const Expr& J) {
    return divergence(Y, g) - apply_field(Y, J) / J;
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    if (X.dim() != Y.dim() || X.domain != Y.domain)
        throw DimensionError("lie_bracket: field dimension mismatch");
    VectorField r{X.domain, {}};
    r.components.reserve(X.components.size());
    for (int i = 0; i < X.dim(); ++i) {
        Expr s(0.0);
        for (int j = 0; j < X.dim(); ++j) {
            s += X.components[static_cast<std::size_t>(j)] *
                     diff(Y.components[static_cast<std::size_t>(i)], X.domain, j) -
                 Y.components[static_cast<std::size_t>(j)] *
                     diff(X.components[static_cast<std::size_t>(i)], X.domain, j);
        }
        r.components.push_back(s);
    }
    return r;
}

Expr metric_pairing(const Metric& g, const VectorField& X, const VectorField& Y) {
    if (X.dim() != g.dim() || Y.dim() != g.dim())
        throw DimensionError("metric_pairing: dimension mismatch");
    Expr s(0.0);
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            s += g.entries()(i, j) * X.components[static_cast<std::size_t>(i)] *
                 Y.components[static_cast<std::size_t>(j)];
    return s;
}

} // namespace rdi
