#include "rdi/trivialization.hpp"

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

Expr fiber_density(const BundleTrivialization& triv, const Metric& g,
                   const Submersion& S) {
    Expr mu_weight = fiber_weight(triv.chart, g, S, FiberMeasure::MuLambda);
    return triv.k_volume.is_one() ? mu_weight
                                  : simplify(mu_weight / triv.k_volume);
}

std::vector<ComplexExpr> apply_T(const BundleTrivialization& triv,
                                 const Metric& g, const Submersion& S,
                                 const Section& u) {
    Expr root_w = sqrt(fiber_density(triv, g, S));
    std::vector<ComplexExpr> r;
    r.reserve(u.components.size());
    for (const ComplexExpr& c : u.components)
        r.push_back(ComplexExpr(root_w * triv.chart.pullback(c.re),
                                root_w * triv.chart.pullback(c.im)));
    return r;
}

std::vector<ComplexExpr> apply_T_inverse_on_chart(
    const BundleTrivialization& triv, const Metric& g, const Submersion& S,
    std::span<const ComplexExpr> k_function) {
    Expr root_w = sqrt(fiber_density(triv, g, S));
    std::vector<ComplexExpr> r;
    r.reserve(k_function.size());
    for (const ComplexExpr& c : k_function)
        r.push_back(ComplexExpr(c.re / root_w, c.im / root_w));
    return r;
}

std::complex<double> k_inner_product(const BundleTrivialization& triv,
                                     std::span<const ComplexExpr> f,
                                     std::span<const ComplexExpr> h,
                                     const QuadratureRule& rule,
                                     std::span<const double> lambda) {
    if (f.size() != h.size())
        throw DimensionError("k_inner_product: component count mismatch");
    ComplexExpr density;
    for (std::size_t a = 0; a < f.size(); ++a)
        density = density + f[a] * h[a].conj();
    Expr re = density.re * triv.k_volume;
    Expr im = density.im * triv.k_volume;
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < rule.node_count(); ++i) {
        Evaluator ev(Point{{}, lambda, rule.node(i)});
        sum += rule.weight(i) * std::complex<double>(ev.eval(re), ev.eval(im));
    }
    return sum;
}

CheckReport unitarity_check(const BundleTrivialization& triv, const Metric& g,
                            const Submersion& S, const Section& u,
                            const QuadratureRule& rule,
                            std::span<const double> lambda, double tol) {
    double t0 = now_ms();
    std::vector<ComplexExpr> tu = apply_T(triv, g, S, u);
    double lhs = k_inner_product(triv, tu, tu, rule, lambda).real();
    double rhs = inner_product(triv.chart, g, S, u, u, rule, lambda).real();
    CheckReport rep = CheckReport::make(
        "unitarity", "norm preservation of the fiber-to-K identification",
        lhs, rhs, tol);
    rep.ms = now_ms() - t0;
    return rep;
}

CheckReport intertwine_check(const BundleTrivialization& triv,
                             const HermitianBundle& B, const Metric& g,
                             const Submersion& S, const Section& phi,
                             const VectorField& X, const QuadratureRule& rule,
                             std::span<const double> lambda, double tol,
                             double h) {
    double t0 = now_ms();
    const int r = B.rank();
    const int k = static_cast<int>(lambda.size());

    std::vector<ComplexExpr> t_phi = apply_T(triv, g, S, phi);
    std::vector<ComplexExpr> t_dphi = apply_T(triv, g, S, nabla(B, S, X, phi));

    // Multiplication part: A(lift X) composed with the chart.
    ComplexMat a = B.connection_of(S.lift(X));
    Substitution sub;
    sub.ambient = triv.chart.map;
    ComplexMat a_on_chart = map_entries(a, sub);
    std::vector<ComplexExpr> twist = a_on_chart.apply(t_phi);

    std::vector<double> dir(static_cast<std::size_t>(k));
    {
        Evaluator ev(Point{{}, lambda, {}});
        for (int i = 0; i < k; ++i)
            dir[static_cast<std::size_t>(i)] =
                ev.eval(X.components[static_cast<std::size_t>(i)]);
    }

    double worst = 0.0;
    for (std::size_t n = 0; n < rule.node_count(); ++n) {
        const std::vector<double>& t = rule.node(n);
        auto at = [&](double s, const ComplexExpr& e) {
            std::vector<double> shifted(lambda.begin(), lambda.end());
            for (int i = 0; i < k; ++i)
                shifted[static_cast<std::size_t>(i)] +=
                    s * dir[static_cast<std::size_t>(i)];
            return eval_complex(e, Point{{}, shifted, t});
        };
        Evaluator ev(Point{{}, lambda, t});
        for (int c = 0; c < r; ++c) {
            const ComplexExpr& e = t_phi[static_cast<std::size_t>(c)];
            auto centered = [&](double step) {
                return (at(step, e) - at(-step, e)) / (2.0 * step);
            };
            std::complex<double> d1 = centered(h);
            std::complex<double> d2 = centered(h / 10.0);
            std::complex<double> lhs = (100.0 * d2 - d1) / 99.0;
            std::complex<double> rhs =
                eval_complex(t_dphi[static_cast<std::size_t>(c)],
                             Point{{}, lambda, t}) -
                std::complex<double>(
                    ev.eval(twist[static_cast<std::size_t>(c)].re),
                    ev.eval(twist[static_cast<std::size_t>(c)].im));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    CheckReport rep = CheckReport::residual(
        "intertwining",
        "base derivative of the trivialized section matches the transported "
        "derivative plus the connection action",
        worst, tol);
    rep.ms = now_ms() - t0;
    return rep;
}

CheckReport horizontal_constancy_check(
    const BundleTrivialization& triv, const Metric& g, const Submersion& S,
    std::span<const ComplexExpr> u0, std::span<const ComplexExpr> v0,
    const QuadratureRule& rule,
    std::span<const std::vector<double>> lambda_grid, double tol) {
    double t0 = now_ms();
    // Horizontal sections for the flat bundle: constant trivialized image.
    std::vector<ComplexExpr> phi_on_chart =
        apply_T_inverse_on_chart(triv, g, S, u0);
    std::vector<ComplexExpr> psi_on_chart =
        apply_T_inverse_on_chart(triv, g, S, v0);
    ComplexExpr density;
    for (std::size_t a = 0; a < phi_on_chart.size(); ++a)
        density = density + phi_on_chart[a] * psi_on_chart[a].conj();
    Expr weight = fiber_weight(triv.chart, g, S, FiberMeasure::MuLambda);
    Expr re = density.re * weight;
    Expr im = density.im * weight;

    std::vector<std::complex<double>> values;
    values.reserve(lambda_grid.size());
    for (const auto& lam : lambda_grid) {
        std::complex<double> sum = 0.0;
        for (std::size_t i = 0; i < rule.node_count(); ++i) {
            Evaluator ev(Point{{}, lam, rule.node(i)});
            sum += rule.weight(i) *
                   std::complex<double>(ev.eval(re), ev.eval(im));
        }
        values.push_back(sum);
    }
    std::complex<double> mean = 0.0;
    for (auto v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double spread = 0.0;
    for (auto v : values) spread = std::max(spread, std::abs(v - mean));

    CheckReport rep = CheckReport::residual(
        "horizontal_constancy",
        "inner products of horizontal sections are base-independent", spread,
        tol);
    rep.value = {mean.real(), mean.imag()};
    rep.ms = now_ms() - t0;
    return rep;
}

} // namespace rdi
