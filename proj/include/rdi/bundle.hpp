#pragma once

#include <complex>

#include "rdi/fiber.hpp"

namespace rdi {

// Section of a trivialized rank-r Hermitian bundle: r complex components
// over the ambient coordinates.
struct Section {
    std::vector<ComplexExpr> components;

    int rank() const { return static_cast<int>(components.size()); }

    static Section zero(int rank) {
        return Section{std::vector<ComplexExpr>(static_cast<std::size_t>(rank))};
    }
};

// Globally trivialized Hermitian bundle of rank r over an m-dimensional
// chart: the covariant derivative along a coordinate direction is
// d_i + A_i with anti-Hermitian coefficient matrices A_i.
class HermitianBundle {
public:
    HermitianBundle(int rank, std::vector<ComplexMat> coefficients);

    static HermitianBundle flat(int rank, int ambient_dim);

    int rank() const { return rank_; }
    int ambient_dim() const { return static_cast<int>(coeff_.size()); }
    const ComplexMat& coeff(int i) const {
        return coeff_[static_cast<std::size_t>(i)];
    }
    bool is_flat() const { return flat_; }

    // A(Y) = sum_i Y^i A_i for an ambient field Y.
    ComplexMat connection_of(const VectorField& Y) const;

    // max |(A_i + A_i^*)_{ab}| over i, a, b at one point; zero for a
    // metric-compatible connection.
    double anti_hermitian_residual(std::span<const double> point) const;

private:
    int rank_;
    std::vector<ComplexMat> coeff_;
    bool flat_;
};

std::complex<double> eval_complex(const ComplexExpr& e, Point p);

// Componentwise directional derivative of a section along an ambient field.
Section apply_field(const VectorField& Y, const Section& phi);

// Covariant derivative along an ambient field: Y(phi) + A(Y) phi.
Section nabla_E(const HermitianBundle& B, const VectorField& Y,
                const Section& phi);

// Covariant derivative along a base field X through the submersion:
//   nabla_E along the normal lift plus the divergence correction
//   (div(lift X) - div X o rho) / 2 times phi.
Section nabla(const HermitianBundle& B, const Submersion& S,
              const VectorField& X, const Section& phi);

// Fiberwise inner product h(phi, psi)(lambda) = int sum_a phi^a conj(psi^a)
// dmu_lambda; antilinear in the second argument.
std::complex<double> inner_product(const FiberChart& chart, const Metric& g,
                                   const Submersion& S, const Section& phi,
                                   const Section& psi,
                                   const QuadratureRule& rule,
                                   std::span<const double> lambda);

// Compares the directional derivative of h(phi, psi) along X (centered
// differences with Richardson extrapolation) against
// h(nabla_X phi, psi) + h(phi, nabla_X psi).
CheckReport metric_compat_check(const HermitianBundle& B,
                                const FiberChart& chart, const Metric& g,
                                const Submersion& S, const Section& phi,
                                const Section& psi, const VectorField& X,
                                const QuadratureRule& rule,
                                std::span<const double> lambda, double tol,
                                double h = 1e-3);

// Pointwise comparison of the commutator defect
// (nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]) phi against the bundle
// curvature applied to the lifted fields:
// (Xl(A(Yl)) - Yl(A(Xl)) + [A(Xl), A(Yl)] - A([Xl, Yl])) phi.
CheckReport curvature_check(const HermitianBundle& B, const Submersion& S,
                            const VectorField& X, const VectorField& Y,
                            const Section& phi,
                            std::span<const std::vector<double>> sample_points,
                            double tol);

} // namespace rdi
