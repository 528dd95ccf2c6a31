#pragma once

#include "rdi/geometry.hpp"

namespace rdi {

class RankError : public std::runtime_error {
public:
    explicit RankError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// A submersion rho: M -> N given by k component expressions over the ambient
// coordinates, together with the metrics on both manifolds. Owns the
// Jacobian, the Gram matrix W = G g^{-1} G^T and the Jacobian density
// J = sqrt(det W) (times sqrt(det zeta) o rho for a non-Euclidean base).
class Submersion {
public:
    Submersion(std::vector<Expr> components, Metric ambient_metric,
               Metric base_metric);

    int ambient_dim() const { return ambient_.dim(); }
    int base_dim() const { return static_cast<int>(rho_.size()); }

    const std::vector<Expr>& components() const { return rho_; }
    const Metric& ambient_metric() const { return ambient_; }
    const Metric& base_metric() const { return base_; }

    // k x m matrix G_ij = d rho_i / d x_j.
    const ExprMat& jacobian() const { return jacobian_; }
    // k x k Gram matrix W = G g^{-1} G^T.
    const ExprMat& gram() const { return gram_; }
    // Jacobian density J_rho.
    const Expr& j_density() const { return j_density_; }

    // Compose a base expression with rho (substitute l_j := rho_j).
    Expr compose_with_rho(const Expr& base_expr) const;

    // Normal lift: the unique field on M, normal to every fiber, with
    // D rho(lift) = X o rho. Closed form g^{-1} G^T W^{-1} (X o rho).
    VectorField lift(const VectorField& X) const;

    // Pushforward D rho(Y) as k ambient expressions.
    std::vector<Expr> pushforward(const VectorField& Y) const;

    // Coordinate lift via orthogonal projection (Euclidean base only):
    // pi^i(grad rho_i) / ||pi^i(grad rho_i)||^2 with pi^i the g-orthogonal
    // projection onto the complement of span{grad rho_n : n != i}.
    VectorField lift_coordinate_projection(int i) const;

    // Divergence with respect to a form nu with eta = nu ^ rho* zeta:
    // div_nu(Y) = div_eta(Y) - div_zeta(X_push) o rho, where X_push is the
    // caller-supplied base field with D rho(Y) = X_push o rho (verified
    // numerically at the given sample points).
    Expr div_nu(const VectorField& Y, const VectorField& X_push,
                std::span<const std::vector<double>> sample_points = {}) const;

    // Smallest eigenvalue of the Gram matrix at an ambient point; the rank
    // condition is min_eig > threshold.
    double gram_min_eigenvalue(std::span<const double> point,
                               std::span<const double> base = {}) const;

private:
    std::vector<Expr> rho_;
    Metric ambient_;
    Metric base_;
    ExprMat jacobian_;
    ExprMat gram_;
    ExprMat gram_adjugate_;
    Expr gram_det_;
    Expr j_density_;
};

} // namespace rdi
