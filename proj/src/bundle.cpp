#include "rdi/bundle.hpp"

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

HermitianBundle::HermitianBundle(int rank, std::vector<ComplexMat> coefficients)
    : rank_(rank), coeff_(std::move(coefficients)) {
    for (const ComplexMat& a : coeff_)
        if (a.rows() != rank_ || a.cols() != rank_)
            throw DimensionError("connection coefficient is not rank x rank");
    flat_ = true;
    for (const ComplexMat& a : coeff_)
        for (int i = 0; i < rank_ && flat_; ++i)
            for (int j = 0; j < rank_ && flat_; ++j)
                flat_ = a(i, j).re.is_zero() && a(i, j).im.is_zero();
}

HermitianBundle HermitianBundle::flat(int rank, int ambient_dim) {
    return HermitianBundle(
        rank, std::vector<ComplexMat>(static_cast<std::size_t>(ambient_dim),
                                      ComplexMat(rank, rank)));
}

ComplexMat HermitianBundle::connection_of(const VectorField& Y) const {
    if (Y.domain != VarKind::Ambient || Y.dim() != ambient_dim())
        throw DimensionError("connection_of expects an ambient field");
    ComplexMat r(rank_, rank_);
    for (int i = 0; i < ambient_dim(); ++i) {
        const ComplexMat& a = coeff_[static_cast<std::size_t>(i)];
        const Expr& yi = Y.components[static_cast<std::size_t>(i)];
        if (yi.is_zero()) continue;
        for (int p = 0; p < rank_; ++p)
            for (int q = 0; q < rank_; ++q)
                r(p, q) = r(p, q) + yi * a(p, q);
    }
    return r;
}

double HermitianBundle::anti_hermitian_residual(
    std::span<const double> point) const {
    Evaluator ev(Point{point, {}, {}});
    double worst = 0.0;
    for (const ComplexMat& a : coeff_) {
        ComplexMat s = a + a.adjoint();
        for (int i = 0; i < rank_; ++i)
            for (int j = 0; j < rank_; ++j)
                worst = std::max(worst, std::hypot(ev.eval(s(i, j).re),
                                                   ev.eval(s(i, j).im)));
    }
    return worst;
}

std::complex<double> eval_complex(const ComplexExpr& e, Point p) {
    Evaluator ev(p);
    return {ev.eval(e.re), ev.eval(e.im)};
}

Section apply_field(const VectorField& Y, const Section& phi) {
    Section r;
    r.components.reserve(phi.components.size());
    for (const ComplexExpr& c : phi.components)
        r.components.push_back(
            ComplexExpr(apply_field(Y, c.re), apply_field(Y, c.im)));
    return r;
}

Section nabla_E(const HermitianBundle& B, const VectorField& Y,
                const Section& phi) {
    if (phi.rank() != B.rank())
        throw DimensionError("section rank does not match bundle rank");
    Section r = apply_field(Y, phi);
    if (!B.is_flat()) {
        ComplexMat a = B.connection_of(Y);
        std::vector<ComplexExpr> twist = a.apply(phi.components);
        for (int i = 0; i < B.rank(); ++i)
            r.components[static_cast<std::size_t>(i)] =
                r.components[static_cast<std::size_t>(i)] +
                twist[static_cast<std::size_t>(i)];
    }
    return r;
}

Section nabla(const HermitianBundle& B, const Submersion& S,
              const VectorField& X, const Section& phi) {
    VectorField lifted = S.lift(X);
    Section r = nabla_E(B, lifted, phi);
    Expr corr = (divergence(lifted, S.ambient_metric()) -
                 S.compose_with_rho(divergence(X, S.base_metric()))) /
                Expr(2.0);
    for (int a = 0; a < B.rank(); ++a)
        r.components[static_cast<std::size_t>(a)] =
            r.components[static_cast<std::size_t>(a)] +
            corr * phi.components[static_cast<std::size_t>(a)];
    return r;
}

std::complex<double> inner_product(const FiberChart& chart, const Metric& g,
                                   const Submersion& S, const Section& phi,
                                   const Section& psi,
                                   const QuadratureRule& rule,
                                   std::span<const double> lambda) {
    if (phi.rank() != psi.rank())
        throw DimensionError("inner_product: section rank mismatch");
    ComplexExpr density;
    for (int a = 0; a < phi.rank(); ++a)
        density = density + phi.components[static_cast<std::size_t>(a)] *
                                psi.components[static_cast<std::size_t>(a)].conj();
    Expr weight = fiber_weight(chart, g, S, FiberMeasure::MuLambda);
    Expr re = chart.pullback(density.re) * weight;
    Expr im = chart.pullback(density.im) * weight;
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < rule.node_count(); ++i) {
        Evaluator ev(Point{{}, lambda, rule.node(i)});
        sum += rule.weight(i) * std::complex<double>(ev.eval(re), ev.eval(im));
    }
    return sum;
}

CheckReport metric_compat_check(const HermitianBundle& B,
                                const FiberChart& chart, const Metric& g,
                                const Submersion& S, const Section& phi,
                                const Section& psi, const VectorField& X,
                                const QuadratureRule& rule,
                                std::span<const double> lambda, double tol,
                                double h) {
    double t0 = now_ms();
    const int k = static_cast<int>(lambda.size());
    std::vector<double> dir(static_cast<std::size_t>(k));
    {
        Evaluator ev(Point{{}, lambda, {}});
        for (int a = 0; a < k; ++a)
            dir[static_cast<std::size_t>(a)] =
                ev.eval(X.components[static_cast<std::size_t>(a)]);
    }
    auto H = [&](double s) {
        std::vector<double> shifted(lambda.begin(), lambda.end());
        for (int a = 0; a < k; ++a)
            shifted[static_cast<std::size_t>(a)] +=
                s * dir[static_cast<std::size_t>(a)];
        return inner_product(chart, g, S, phi, psi, rule, shifted);
    };
    auto centered = [&](double step) {
        return (H(step) - H(-step)) / (2.0 * step);
    };
    std::complex<double> d1 = centered(h);
    std::complex<double> d2 = centered(h / 10.0);
    std::complex<double> lhs = (100.0 * d2 - d1) / 99.0;

    Section dphi = nabla(B, S, X, phi);
    Section dpsi = nabla(B, S, X, psi);
    std::complex<double> rhs =
        inner_product(chart, g, S, dphi, psi, rule, lambda) +
        inner_product(chart, g, S, phi, dpsi, rule, lambda);

    CheckReport rep;
    rep.name = "metric_compatibility";
    rep.paper_ref = "connection compatible with the fiber inner product";
    rep.value = {lhs.real(), lhs.imag()};
    rep.oracle = {rhs.real(), rhs.imag()};
    rep.abs_err = std::abs(lhs - rhs);
    rep.tol = tol;
    rep.pass = rep.abs_err <= tol;
    rep.ms = now_ms() - t0;
    return rep;
}

namespace {

// Entrywise derivative of a matrix along an ambient field.
ComplexMat apply_field_mat(const VectorField& Y, const ComplexMat& a) {
    ComplexMat r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r(i, j) = ComplexExpr(apply_field(Y, a(i, j).re),
                                  apply_field(Y, a(i, j).im));
    return r;
}

} // namespace

CheckReport curvature_check(const HermitianBundle& B, const Submersion& S,
                            const VectorField& X, const VectorField& Y,
                            const Section& phi,
                            std::span<const std::vector<double>> sample_points,
                            double tol) {
    double t0 = now_ms();
    Section lhs_sec = nabla(B, S, X, nabla(B, S, Y, phi));
    {
        Section t = nabla(B, S, Y, nabla(B, S, X, phi));
        for (int a = 0; a < B.rank(); ++a)
            lhs_sec.components[static_cast<std::size_t>(a)] =
                lhs_sec.components[static_cast<std::size_t>(a)] -
                t.components[static_cast<std::size_t>(a)];
    }
    {
        Section t = nabla(B, S, lie_bracket(X, Y), phi);
        for (int a = 0; a < B.rank(); ++a)
            lhs_sec.components[static_cast<std::size_t>(a)] =
                lhs_sec.components[static_cast<std::size_t>(a)] -
                t.components[static_cast<std::size_t>(a)];
    }

    VectorField lx = S.lift(X);
    VectorField ly = S.lift(Y);
    ComplexMat ax = B.connection_of(lx);
    ComplexMat ay = B.connection_of(ly);
    ComplexMat curv = apply_field_mat(lx, ay) - apply_field_mat(ly, ax) +
                      (ax * ay - ay * ax) -
                      B.connection_of(lie_bracket(lx, ly));
    std::vector<ComplexExpr> rhs_vec = curv.apply(phi.components);

    double worst = 0.0;
    for (const auto& pt : sample_points) {
        Evaluator ev(Point{pt, {}, {}});
        for (int a = 0; a < B.rank(); ++a) {
            const ComplexExpr& l = lhs_sec.components[static_cast<std::size_t>(a)];
            const ComplexExpr& r = rhs_vec[static_cast<std::size_t>(a)];
            worst = std::max(worst, std::hypot(ev.eval(l.re) - ev.eval(r.re),
                                               ev.eval(l.im) - ev.eval(r.im)));
        }
    }
    CheckReport rep = CheckReport::residual(
        "curvature_identity", "commutator defect equals bundle curvature",
        worst, tol);
    rep.ms = now_ms() - t0;
    return rep;
}

} // namespace rdi
