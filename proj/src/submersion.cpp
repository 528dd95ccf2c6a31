#include "rdi/submersion.hpp"

#include <cmath>

namespace rdi {

Submersion::Submersion(std::vector<Expr> components, Metric ambient_metric,
                       Metric base_metric)
    : rho_(std::move(components)), ambient_(std::move(ambient_metric)),
      base_(std::move(base_metric)) {
    const int m = ambient_.dim();
    const int k = static_cast<int>(rho_.size());
    if (k >= m)
        throw DimensionError("submersion requires base_dim < ambient_dim");
    if (base_.dim() != k)
        throw DimensionError("base metric dimension does not match rho");

    jacobian_ = ExprMat(k, m);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j)
            jacobian_(i, j) = diff(rho_[static_cast<std::size_t>(i)],
                                   VarKind::Ambient, j);

    gram_ = jacobian_ * ambient_.inverse() * jacobian_.transposed();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) gram_(i, j) = simplify(gram_(i, j));
    gram_adjugate_ = adjugate(gram_);
    gram_det_ = simplify(det(gram_));

    j_density_ = sqrt(gram_det_);
    if (!base_.is_euclidean())
        j_density_ = j_density_ * compose_with_rho(base_.sqrt_det());
}

Expr Submersion::compose_with_rho(const Expr& base_expr) const {
    Substitution s;
    s.base = rho_;
    return substitute(base_expr, s);
}

VectorField Submersion::lift(const VectorField& X) const {
    if (X.domain != VarKind::Base || X.dim() != base_dim())
        throw DimensionError("lift expects a base vector field of dimension k");
    const int m = ambient_dim();
    const int k = base_dim();
    // W^{-1} (X o rho), with W^{-1} = adj(W)/det(W).
    std::vector<Expr> rhs;
    rhs.reserve(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a)
        rhs.push_back(compose_with_rho(X.components[static_cast<std::size_t>(a)]));
    std::vector<Expr> coeffs(static_cast<std::size_t>(k), Expr(0.0));
    for (int a = 0; a < k; ++a) {
        Expr s(0.0);
        for (int b = 0; b < k; ++b)
            s += gram_adjugate_(a, b) * rhs[static_cast<std::size_t>(b)];
        coeffs[static_cast<std::size_t>(a)] = s / gram_det_;
    }
    // g^{-1} G^T coeffs.
    ExprMat ginv_gt = ambient_.inverse() * jacobian_.transposed();  // m x k
    VectorField r{VarKind::Ambient, std::vector<Expr>()};
    r.components.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        Expr s(0.0);
        for (int a = 0; a < k; ++a)
            s += ginv_gt(i, a) * coeffs[static_cast<std::size_t>(a)];
        r.components.push_back(simplify(s));
    }
    return r;
}

std::vector<Expr> Submersion::pushforward(const VectorField& Y) const {
    if (Y.domain != VarKind::Ambient || Y.dim() != ambient_dim())
        throw DimensionError("pushforward expects an ambient field");
    std::vector<Expr> r;
    r.reserve(static_cast<std::size_t>(base_dim()));
    for (int a = 0; a < base_dim(); ++a)
        r.push_back(apply_field(Y, rho_[static_cast<std::size_t>(a)]));
    return r;
}

VectorField Submersion::lift_coordinate_projection(int i) const {
    if (!base_.is_euclidean())
        throw DimensionError(
            "coordinate-projection lift requires a Euclidean base metric");
    const int k = base_dim();
    const int m = ambient_dim();
    std::vector<VectorField> grads;
    grads.reserve(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a)
        grads.push_back(gradient(rho_[static_cast<std::size_t>(a)], ambient_));

    // Project grad rho_i onto the g-orthogonal complement of the other
    // gradients: pi = v_i - sum_n c_n v_n with the c solving the sub-Gram
    // system Gm c = b.
    std::vector<int> others;
    for (int a = 0; a < k; ++a)
        if (a != i) others.push_back(a);
    const int p = static_cast<int>(others.size());
    VectorField proj = grads[static_cast<std::size_t>(i)];
    if (p > 0) {
        ExprMat gm(p, p);
        std::vector<Expr> b;
        b.reserve(static_cast<std::size_t>(p));
        for (int a = 0; a < p; ++a) {
            for (int c = 0; c < p; ++c)
                gm(a, c) = metric_pairing(ambient_,
                                          grads[static_cast<std::size_t>(others[static_cast<std::size_t>(a)])],
                                          grads[static_cast<std::size_t>(others[static_cast<std::size_t>(c)])]);
            b.push_back(metric_pairing(ambient_,
                                       grads[static_cast<std::size_t>(others[static_cast<std::size_t>(a)])],
                                       grads[static_cast<std::size_t>(i)]));
        }
        ExprMat adj = adjugate(gm);
        Expr d = det(gm);
        for (int a = 0; a < p; ++a) {
            Expr coeff(0.0);
            for (int c = 0; c < p; ++c)
                coeff += adj(a, c) * b[static_cast<std::size_t>(c)];
            coeff = coeff / d;
            for (int j = 0; j < m; ++j)
                proj.components[static_cast<std::size_t>(j)] -=
                    coeff * grads[static_cast<std::size_t>(others[static_cast<std::size_t>(a)])]
                                .components[static_cast<std::size_t>(j)];
        }
    }
    Expr norm_sq = metric_pairing(ambient_, proj, proj);
    VectorField r{VarKind::Ambient, std::vector<Expr>()};
    r.components.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        r.components.push_back(
            simplify(proj.components[static_cast<std::size_t>(j)] / norm_sq));
    return r;
}

Expr Submersion::div_nu(const VectorField& Y, const VectorField& X_push,
                        std::span<const std::vector<double>> sample_points) const {
    if (X_push.domain != VarKind::Base || X_push.dim() != base_dim())
        throw DimensionError("div_nu: X_push must be a base field");
    // Verify that D rho(Y) really is X_push o rho where sampled.
    std::vector<Expr> push = pushforward(Y);
    for (const auto& pt : sample_points) {
        Evaluator ev(Point{pt, {}, {}});
        for (int a = 0; a < base_dim(); ++a) {
            double lhs = ev.eval(push[static_cast<std::size_t>(a)]);
            double rhs = ev.eval(compose_with_rho(
                X_push.components[static_cast<std::size_t>(a)]));
            if (std::abs(lhs - rhs) > 1e-8 * (1.0 + std::abs(rhs)))
                throw EvalError(
                    "div_nu: pushforward of Y is not expressible over the base "
                    "(D rho(Y) != X o rho at a sample point)");
        }
    }
    return divergence(Y, ambient_) -
           compose_with_rho(divergence(X_push, base_));
}

namespace {

// Jacobi eigenvalue sweep for a small symmetric matrix.
double min_eigenvalue_sym(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0];
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
    }
    double mn = a[0][0];
    for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, a[i][i]);
    return mn;
}

} // namespace

double Submersion::gram_min_eigenvalue(std::span<const double> point,
                                       std::span<const double> base) const {
    const int k = base_dim();
    Evaluator ev(Point{point, base, {}});
    std::vector<std::vector<double>> w(static_cast<std::size_t>(k),
                                       std::vector<double>(static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                ev.eval(gram_(i, j));
    return min_eigenvalue_sym(std::move(w));
}

} // namespace rdi
