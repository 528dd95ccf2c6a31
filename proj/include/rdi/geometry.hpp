#pragma once

#include "rdi/matrix.hpp"

namespace rdi {

class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Riemannian metric on an open chart, given as a symmetric matrix of
// symbolic entries over one coordinate family. The determinant and adjugate
// are cached so the inverse metric adj/det is built once.
class Metric {
public:
    Metric(ExprMat entries, VarKind coords = VarKind::Ambient);

    static Metric euclidean(int dim, VarKind coords = VarKind::Ambient);
    static Metric conformal(const Expr& u, int dim,
                            VarKind coords = VarKind::Ambient);

    int dim() const { return entries_.rows(); }
    VarKind coords() const { return coords_; }
    const ExprMat& entries() const { return entries_; }
    const Expr& det_expr() const { return det_; }
    const ExprMat& adjugate_mat() const { return adj_; }
    const Expr& sqrt_det() const { return sqrt_det_; }

    // (g^{-1})^{ij} as adj^{ij}/det.
    ExprMat inverse() const;

    bool is_euclidean() const { return euclidean_; }

private:
    ExprMat entries_;
    VarKind coords_;
    Expr det_;
    ExprMat adj_;
    Expr sqrt_det_;
    bool euclidean_;
};

// Contravariant vector field over one coordinate family.
struct VectorField {
    VarKind domain = VarKind::Ambient;
    std::vector<Expr> components;

    int dim() const { return static_cast<int>(components.size()); }

    static VectorField coordinate(VarKind domain, int dim, int index);
    static VectorField zero(VarKind domain, int dim);
};

// Directional derivative Y(f) = Y^i d_i f.
Expr apply_field(const VectorField& Y, const Expr& f);

// grad f = (g^{-1})^{ij} d_j f.
VectorField gradient(const Expr& f, const Metric& g);

// Divergence with respect to the Riemannian volume density sqrt(det g):
// (1/sqrt det g) d_i (sqrt det g * Y^i).
Expr divergence(const VectorField& Y, const Metric& g);

// Divergence with respect to omega = J^{-1} eta: div_eta(Y) - Y(J)/J.
Expr divergence_weighted(const VectorField& Y, const Metric& g, const Expr& J);

// [X, Y]^i = X^j d_j Y^i - Y^j d_j X^i.
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

// g(X, Y) = g_ij X^i Y^j.
Expr metric_pairing(const Metric& g, const VectorField& X, const VectorField& Y);

} // namespace rdi
