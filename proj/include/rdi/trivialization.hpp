#pragma once

#include "rdi/bundle.hpp"

namespace rdi {

// Identification of the fibers with one fixed parameter box K: the chart map
// is the inverse of the trivialization, and k_volume is the reference volume
// density on K (an Expr over the parameter coordinates).
struct BundleTrivialization {
    FiberChart chart;
    Expr k_volume{1.0};
};

// Density w(lambda, t) of the fiber measure pushed to K, relative to the
// reference volume: (area element / (J o psi)) / k_volume.
Expr fiber_density(const BundleTrivialization& triv, const Metric& g,
                   const Submersion& S);

// (T(lambda)u)(t) = sqrt(w(lambda, t)) * u(psi(lambda, t)), componentwise in
// the trivialized frame. Result: r complex expressions over (l, t).
std::vector<ComplexExpr> apply_T(const BundleTrivialization& triv,
                                 const Metric& g, const Submersion& S,
                                 const Section& u);

// Inverse pullback: recover the section values on the fiber from a
// K-function, u(psi(lambda, t)) = f(t) / sqrt(w).
std::vector<ComplexExpr> apply_T_inverse_on_chart(
    const BundleTrivialization& triv, const Metric& g, const Submersion& S,
    std::span<const ComplexExpr> k_function);

// L2(K, k_volume) pairing of two K-functions (over (l, t) is allowed; lambda
// is supplied at evaluation time).
std::complex<double> k_inner_product(const BundleTrivialization& triv,
                                     std::span<const ComplexExpr> f,
                                     std::span<const ComplexExpr> h,
                                     const QuadratureRule& rule,
                                     std::span<const double> lambda);

// ||T(lambda)u||_{L2(K)} vs ||u||_{L2(fiber, mu)}.
CheckReport unitarity_check(const BundleTrivialization& triv, const Metric& g,
                            const Submersion& S, const Section& u,
                            const QuadratureRule& rule,
                            std::span<const double> lambda, double tol);

// Compares the lambda-derivative of (T phi)(lambda, t) along X (centered
// differences, Richardson) against T(nabla_X phi) - A(lift X) o psi applied
// to T phi, at every quadrature node: the transported derivative picks up
// the connection action with a minus sign because the plain lambda-derivative
// at fixed t carries no connection term. Reports the worst node.
CheckReport intertwine_check(const BundleTrivialization& triv,
                             const HermitianBundle& B, const Metric& g,
                             const Submersion& S, const Section& phi,
                             const VectorField& X, const QuadratureRule& rule,
                             std::span<const double> lambda, double tol,
                             double h = 1e-3);

// For a flat bundle, sections with constant trivialized image are
// horizontal; their pairwise inner products must not depend on the base
// point. Evaluates h(lambda) = <T* u0, T* v0>_{mu_lambda} on a grid of base
// points and reports the maximal deviation from the grid mean.
CheckReport horizontal_constancy_check(
    const BundleTrivialization& triv, const Metric& g, const Submersion& S,
    std::span<const ComplexExpr> u0, std::span<const ComplexExpr> v0,
    const QuadratureRule& rule,
    std::span<const std::vector<double>> lambda_grid, double tol);

} // namespace rdi
