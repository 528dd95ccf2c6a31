#pragma once

#include "rdi/quadrature.hpp"
#include "rdi/report.hpp"
#include "rdi/submersion.hpp"

namespace rdi {

enum class FiberMeasure { EtaLambda, MuLambda };

// Axis of a chart parameter domain.
struct ChartAxis {
    enum class Kind { Interval, Periodic };
    Kind kind = Kind::Interval;
    double a = -1.0;
    double b = 1.0;

    static ChartAxis interval(double a, double b) { return {Kind::Interval, a, b}; }
    static ChartAxis periodic() { return {Kind::Periodic, 0.0, 0.0}; }
};

// Parameterization psi_lambda: K -> M_lambda, given as m expressions over
// the base coordinates l1..lk and the parameter coordinates t1..t_{m-k}.
// With param_dim == m and no base dependence this doubles as an ambient
// chart for full-dimensional quadrature.
struct FiberChart {
    int ambient_dim = 0;
    std::vector<Expr> map;
    std::vector<ChartAxis> domain;

    int param_dim() const { return static_cast<int>(domain.size()); }

    // Substitute x_i := map_i into an ambient expression, producing an
    // expression over (l, t).
    Expr pullback(const Expr& ambient_expr) const;

    // m x param_dim Jacobian of the map with respect to the parameters.
    ExprMat param_jacobian() const;

    QuadratureRule rule(int order) const;
};

// Induced volume density sqrt(det(Dpsi^T g Dpsi)) over (l, t).
Expr area_element(const FiberChart& chart, const Metric& g);

// Weight of the fiber measure in parameter coordinates:
//   eta_lambda -> area element, mu_lambda -> area element / (J o psi).
Expr fiber_weight(const FiberChart& chart, const Metric& g,
                  const Submersion& S, FiberMeasure measure);

double fiber_integral(const FiberChart& chart, const Metric& g,
                      const Submersion& S, const Expr& f, FiberMeasure measure,
                      const QuadratureRule& rule,
                      std::span<const double> lambda);

// Integrand of the fiber-derivative identity:
//   lift(f') + (div(lift) - div X o rho) f, integrated against mu_lambda.
double derivation_formula_rhs(const FiberChart& chart, const Metric& g,
                              const Submersion& S, const Expr& f,
                              const VectorField& X, const QuadratureRule& rule,
                              std::span<const double> lambda);

// Directional derivative of F(lambda) = int_{M_lambda} f dmu along X by
// centered differences with Richardson extrapolation at steps h and h/10.
double fiber_integral_directional_fd(const FiberChart& chart, const Metric& g,
                                     const Submersion& S, const Expr& f,
                                     const VectorField& X,
                                     const QuadratureRule& rule,
                                     std::span<const double> lambda,
                                     double h = 1e-3);

struct CoareaResult {
    double direct = 0.0;   // int_M f J deta, full-dimensional quadrature
    double nested = 0.0;   // int_N (int_{M_lambda} f deta_lambda) dzeta
};

// Both sides of the coarea identity. ambient_chart must parameterize the
// region rho^{-1}(base_box); base_box is quadratured with Gauss axes.
CoareaResult coarea_both_sides(const FiberChart& fiber_chart,
                               const FiberChart& ambient_chart,
                               const Metric& g, const Submersion& S,
                               const Expr& f,
                               std::span<const std::pair<double, double>> base_box,
                               int order);

CheckReport coarea_check(const FiberChart& fiber_chart,
                         const FiberChart& ambient_chart, const Metric& g,
                         const Submersion& S, const Expr& f,
                         std::span<const std::pair<double, double>> base_box,
                         int order, double tol);

} // namespace rdi
