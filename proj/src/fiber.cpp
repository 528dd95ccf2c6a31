#include "rdi/fiber.hpp"

#include <cmath>

namespace rdi {

Expr FiberChart::pullback(const Expr& ambient_expr) const {
    Substitution s;
    s.ambient = map;
    return substitute(ambient_expr, s);
}

ExprMat FiberChart::param_jacobian() const {
    const int m = static_cast<int>(map.size());
    const int d = param_dim();
    ExprMat jac(m, d);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j)
            jac(i, j) = diff(map[static_cast<std::size_t>(i)], VarKind::Param, j);
    return jac;
}

QuadratureRule FiberChart::rule(int order) const {
    std::vector<QuadratureAxis> axes;
    axes.reserve(domain.size());
    for (const ChartAxis& ax : domain) {
        if (ax.kind == ChartAxis::Kind::Interval)
            axes.push_back(QuadratureAxis::gauss(ax.a, ax.b, order));
        else
            axes.push_back(QuadratureAxis::periodic(2 * order));
    }
    return QuadratureRule(std::move(axes));
}

Expr area_element(const FiberChart& chart, const Metric& g) {
    ExprMat jac = chart.param_jacobian();
    Substitution s;
    s.ambient = chart.map;
    ExprMat g_on_chart = map_entries(g.entries(), s);
    ExprMat pulled = jac.transposed() * g_on_chart * jac;
    Expr d = simplify(det(pulled));
    return sqrt(d);
}

Expr fiber_weight(const FiberChart& chart, const Metric& g,
                  const Submersion& S, FiberMeasure measure) {
    Expr area = area_element(chart, g);
    if (measure == FiberMeasure::EtaLambda) return area;
    return simplify(area / chart.pullback(S.j_density()));
}

double fiber_integral(const FiberChart& chart, const Metric& g,
                      const Submersion& S, const Expr& f, FiberMeasure measure,
                      const QuadratureRule& rule,
                      std::span<const double> lambda) {
    Expr integrand = chart.pullback(f) * fiber_weight(chart, g, S, measure);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.node_count(); ++i) {
        Evaluator ev(Point{{}, lambda, rule.node(i)});
        sum += rule.weight(i) * ev.eval(integrand);
    }
    return sum;
}

double derivation_formula_rhs(const FiberChart& chart, const Metric& g,
                              const Submersion& S, const Expr& f,
                              const VectorField& X, const QuadratureRule& rule,
                              std::span<const double> lambda) {
    VectorField lifted = S.lift(X);
    Expr integrand = apply_field(lifted, f) +
                     (divergence(lifted, g) -
                      S.compose_with_rho(divergence(X, S.base_metric()))) *
                         f;
    return fiber_integral(chart, g, S, integrand, FiberMeasure::MuLambda, rule,
                          lambda);
}

double fiber_integral_directional_fd(const FiberChart& chart, const Metric& g,
                                     const Submersion& S, const Expr& f,
                                     const VectorField& X,
                                     const QuadratureRule& rule,
                                     std::span<const double> lambda, double h) {
    const int k = static_cast<int>(lambda.size());
    std::vector<double> dir(static_cast<std::size_t>(k));
    {
        Evaluator ev(Point{{}, lambda, {}});
        for (int a = 0; a < k; ++a)
            dir[static_cast<std::size_t>(a)] =
                ev.eval(X.components[static_cast<std::size_t>(a)]);
    }
    auto F = [&](double s) {
        std::vector<double> shifted(lambda.begin(), lambda.end());
        for (int a = 0; a < k; ++a)
            shifted[static_cast<std::size_t>(a)] +=
                s * dir[static_cast<std::size_t>(a)];
        return fiber_integral(chart, g, S, f, FiberMeasure::MuLambda, rule,
                              shifted);
    };
    auto centered = [&](double step) {
        return (F(step) - F(-step)) / (2.0 * step);
    };
    double d1 = centered(h);
    double d2 = centered(h / 10.0);
    return (100.0 * d2 - d1) / 99.0;  // cancels the O(h^2) term
}

CoareaResult coarea_both_sides(const FiberChart& fiber_chart,
                               const FiberChart& ambient_chart,
                               const Metric& g, const Submersion& S,
                               const Expr& f,
                               std::span<const std::pair<double, double>> base_box,
                               int order) {
    CoareaResult r;

    // Direct side: int f * J over the region, in ambient-chart coordinates.
    {
        Expr integrand = ambient_chart.pullback(f * S.j_density()) *
                         area_element(ambient_chart, g);
        QuadratureRule rule = ambient_chart.rule(order);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.node_count(); ++i) {
            Evaluator ev(Point{{}, {}, rule.node(i)});
            sum += rule.weight(i) * ev.eval(integrand);
        }
        r.direct = sum;
    }

    // Nested side: base quadrature of the fiber integrals against eta_lambda.
    {
        std::vector<QuadratureAxis> axes;
        for (const auto& [a, b] : base_box)
            axes.push_back(QuadratureAxis::gauss(a, b, order));
        QuadratureRule base_rule(std::move(axes));
        QuadratureRule fiber_rule = fiber_chart.rule(order);
        const Expr& zeta_density = S.base_metric().sqrt_det();
        double sum = 0.0;
        for (std::size_t i = 0; i < base_rule.node_count(); ++i) {
            const std::vector<double>& lam = base_rule.node(i);
            double inner = fiber_integral(fiber_chart, g, S, f,
                                          FiberMeasure::EtaLambda, fiber_rule,
                                          lam);
            Evaluator ev(Point{{}, lam, {}});
            sum += base_rule.weight(i) * inner * ev.eval(zeta_density);
        }
        r.nested = sum;
    }
    return r;
}

CheckReport coarea_check(const FiberChart& fiber_chart,
                         const FiberChart& ambient_chart, const Metric& g,
                         const Submersion& S, const Expr& f,
                         std::span<const std::pair<double, double>> base_box,
                         int order, double tol) {
    CoareaResult r = coarea_both_sides(fiber_chart, ambient_chart, g, S, f,
                                       base_box, order);
    CheckReport rep = CheckReport::make("coarea", "coarea formula", r.direct,
                                        r.nested, tol);
    return rep;
}

} // namespace rdi
