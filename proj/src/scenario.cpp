#include "rdi/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace rdi {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(
               clock::now().time_since_epoch())
        .count();
}

Expr x(int i) { return Expr::ambient(i); }
Expr l(int i) { return Expr::base(i); }
Expr t(int i) { return Expr::param(i); }

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------

Section bump_section1(const Expr& bump) {
    return Section{{ComplexExpr(bump)}};
}

Scenario make_sphere2() {
    Scenario s;
    s.name = "sphere2";
    s.ambient_dim = 2;
    s.base_dim = 1;
    s.metric_entries = ExprMat::identity(2);
    s.rho = {x(0) * x(0) + x(1) * x(1)};
    Expr r = sqrt(l(0));
    s.chart = FiberChart{2, {r * cos(t(0)), r * sin(t(0))},
                         {ChartAxis::periodic()}};
    s.closed_fiber = true;
    s.region_chart = FiberChart{2, {t(0) * cos(t(1)), t(0) * sin(t(1))},
                                {ChartAxis::interval(1.0, 2.0),
                                 ChartAxis::periodic()}};
    s.base_box = {{1.0, 4.0}};
    s.region_function = Expr(1.0);
    s.region_oracle = 28.0 * kPi / 3.0;
    s.bundle = HermitianBundle::flat(1, 2);
    s.trivialization = BundleTrivialization{s.chart, Expr(1.0)};
    s.sections = {Section{{ComplexExpr(Expr(1.0))}},
                  Section{{ComplexExpr(x(0), Expr(0.3) * x(1))}}};
    s.test_functions = {Expr(1.0), Expr(1.0) + Expr(0.4) * x(0) * x(1)};
    s.lambda_grid = {{0.7}, {1.0}, {1.6}};
    return s;
}

Scenario make_sphere3() {
    Scenario s;
    s.name = "sphere3";
    s.ambient_dim = 3;
    s.base_dim = 1;
    s.metric_entries = ExprMat::identity(3);
    s.rho = {x(0) * x(0) + x(1) * x(1) + x(2) * x(2)};
    Expr r = sqrt(l(0));
    s.chart = FiberChart{3,
                         {r * sin(t(0)) * cos(t(1)), r * sin(t(0)) * sin(t(1)),
                          r * cos(t(0))},
                         {ChartAxis::interval(0.0, kPi), ChartAxis::periodic()}};
    s.closed_fiber = true;
    s.region_chart = FiberChart{
        3,
        {t(0) * sin(t(1)) * cos(t(2)), t(0) * sin(t(1)) * sin(t(2)),
         t(0) * cos(t(1))},
        {ChartAxis::interval(1.0, 2.0), ChartAxis::interval(0.0, kPi),
         ChartAxis::periodic()}};
    s.base_box = {{1.0, 4.0}};
    s.region_function = Expr(1.0);
    s.region_oracle = 30.0 * kPi;
    s.bundle = HermitianBundle::flat(1, 3);
    s.trivialization = BundleTrivialization{s.chart, sin(t(0))};
    s.sections = {Section{{ComplexExpr(Expr(1.0))}},
                  Section{{ComplexExpr(Expr(1.0) + Expr(0.3) * x(2),
                                       Expr(0.2) * x(0))}}};
    s.test_functions = {Expr(1.0),
                        exp(Expr(0.2) * x(0)) * (Expr(1.0) + Expr(0.5) * x(2))};
    s.lambda_grid = {{0.5}, {1.0}, {2.0}};
    return s;
}

Scenario make_linear_projection() {
    Scenario s;
    s.name = "linear_projection";
    s.ambient_dim = 2;
    s.base_dim = 1;
    s.metric_entries = ExprMat::identity(2);
    s.rho = {x(0)};
    s.chart = FiberChart{2, {l(0), t(0)}, {ChartAxis::interval(0.0, 1.0)}};
    s.fiber_bump = pow(x(1) * (Expr(1.0) - x(1)), 2.0);
    s.region_chart = FiberChart{2, {t(0), t(1)},
                                {ChartAxis::interval(0.0, 1.0),
                                 ChartAxis::interval(0.0, 1.0)}};
    s.base_box = {{0.0, 1.0}};
    s.region_function = x(0) * x(1);
    s.region_oracle = 0.25;
    {
        std::vector<ComplexMat> coeffs(2, ComplexMat(1, 1));
        coeffs[0](0, 0) = ComplexExpr(Expr(0.0), Expr(0.3) * x(1));
        coeffs[1](0, 0) = ComplexExpr(Expr(0.0), Expr(0.2) * x(0));
        s.bundle = HermitianBundle(1, std::move(coeffs));
    }
    s.trivialization = BundleTrivialization{s.chart, Expr(1.0)};
    Expr bump = pow(x(1) * (Expr(1.0) - x(1)), 2.0);
    s.sections = {bump_section1(bump),
                  Section{{ComplexExpr(bump * x(0), Expr(0.5) * bump)}}};
    s.test_functions = {bump, x(0) * bump};
    s.lambda_grid = {{0.25}, {0.5}, {0.75}};
    return s;
}

Scenario make_conformal_sphere() {
    Scenario s;
    s.name = "conformal_sphere";
    s.ambient_dim = 3;
    s.base_dim = 1;
    Expr u = Expr(0.1) * x(2);
    Expr factor = exp(Expr(2.0) * u);
    ExprMat m(3, 3);
    for (int i = 0; i < 3; ++i) m(i, i) = factor;
    s.metric_entries = std::move(m);
    s.rho = {x(0) * x(0) + x(1) * x(1) + x(2) * x(2)};
    Expr r = sqrt(l(0));
    s.chart = FiberChart{3,
                         {r * sin(t(0)) * cos(t(1)), r * sin(t(0)) * sin(t(1)),
                          r * cos(t(0))},
                         {ChartAxis::interval(0.0, kPi), ChartAxis::periodic()}};
    s.closed_fiber = true;
    s.region_chart = FiberChart{
        3,
        {t(0) * sin(t(1)) * cos(t(2)), t(0) * sin(t(1)) * sin(t(2)),
         t(0) * cos(t(1))},
        {ChartAxis::interval(1.0, 2.0), ChartAxis::interval(0.0, kPi),
         ChartAxis::periodic()}};
    s.base_box = {{1.0, 4.0}};
    s.region_function = Expr(1.0);
    s.bundle = HermitianBundle::flat(1, 3);
    s.trivialization = BundleTrivialization{s.chart, sin(t(0))};
    s.sections = {Section{{ComplexExpr(Expr(1.0))}},
                  Section{{ComplexExpr(x(2), Expr(0.4) * x(0))}}};
    s.test_functions = {Expr(1.0), Expr(1.0) + Expr(0.3) * x(2)};
    s.lambda_grid = {{1.0}, {1.5}};
    return s;
}

Scenario make_rank2_bundle() {
    Scenario s;
    s.name = "rank2_bundle";
    s.ambient_dim = 2;
    s.base_dim = 1;
    s.metric_entries = ExprMat::identity(2);
    // Vertical-line fibers keep the chart flow equal to the normal lift, so
    // the reference-fiber transport admits the multiplier form; the interest
    // here is the non-commuting rank-2 connection.
    s.rho = {x(0)};
    s.chart = FiberChart{2, {l(0), t(0)}, {ChartAxis::interval(-1.2, 1.2)}};
    Expr bump = pow(Expr(1.0) - pow(x(1) / Expr(1.2), 2.0), 4.0);
    s.fiber_bump = bump;
    {
        // Anti-Hermitian coefficients with nonzero commutators.
        std::vector<ComplexMat> coeffs;
        for (int i = 0; i < 2; ++i) {
            ComplexMat m(2, 2);
            Expr a = Expr(0.3) * x(i);
            Expr b = Expr(0.2) * x(1 - i);
            Expr c = Expr(0.1) * x(0) * x(1);
            m(0, 0) = ComplexExpr(Expr(0.0), a);
            m(0, 1) = ComplexExpr(b, c);
            m(1, 0) = ComplexExpr(-b, c);
            m(1, 1) = ComplexExpr(Expr(0.0), Expr(-0.4) * x(i));
            coeffs.push_back(std::move(m));
        }
        s.bundle = HermitianBundle(2, std::move(coeffs));
    }
    s.trivialization = BundleTrivialization{s.chart, Expr(1.0)};
    s.sections = {Section{{ComplexExpr(bump), ComplexExpr(Expr(0.0))}},
                  Section{{ComplexExpr(bump * x(0), Expr(0.3) * bump),
                           ComplexExpr(Expr(0.2) * bump,
                                       bump * (Expr(1.0) - x(1)))}}};
    s.test_functions = {bump, bump * (Expr(1.0) + Expr(0.5) * x(0))};
    s.lambda_grid = {{0.0}, {0.3}};
    return s;
}

Scenario make_two_component() {
    Scenario s;
    s.name = "two_component";
    s.ambient_dim = 3;
    s.base_dim = 2;
    s.metric_entries = ExprMat::identity(3);
    s.rho = {x(0), x(1) + pow(x(2), 3.0) / Expr(3.0)};
    s.chart = FiberChart{3, {l(0), l(1) - pow(t(0), 3.0) / Expr(3.0), t(0)},
                         {ChartAxis::interval(-1.2, 1.2)}};
    Expr bump = pow(Expr(1.0) - pow(x(2) / Expr(1.2), 2.0), 4.0);
    s.fiber_bump = bump;
    s.region_chart = FiberChart{
        3,
        {t(0), t(1) - pow(t(2), 3.0) / Expr(3.0), t(2)},
        {ChartAxis::interval(0.0, 0.5), ChartAxis::interval(0.0, 0.5),
         ChartAxis::interval(-1.2, 1.2)}};
    s.base_box = {{0.0, 0.5}, {0.0, 0.5}};
    s.region_function = bump;
    {
        std::vector<ComplexMat> coeffs;
        for (int i = 0; i < 3; ++i) {
            ComplexMat m(2, 2);
            Expr a = Expr(0.3) * x(i);
            Expr b = Expr(0.2) * x((i + 1) % 3);
            Expr c = Expr(0.1) * x(i) * x((i + 2) % 3);
            m(0, 0) = ComplexExpr(Expr(0.0), a);
            m(0, 1) = ComplexExpr(b, c);
            m(1, 0) = ComplexExpr(-b, c);
            m(1, 1) = ComplexExpr(Expr(0.0), Expr(-0.4) * x(i));
            coeffs.push_back(std::move(m));
        }
        s.bundle = HermitianBundle(2, std::move(coeffs));
    }
    s.trivialization = BundleTrivialization{s.chart, Expr(1.0)};
    s.sections = {Section{{ComplexExpr(bump), ComplexExpr(Expr(0.1) * bump)}},
                  Section{{ComplexExpr(bump * x(0), Expr(0.2) * bump),
                           ComplexExpr(Expr(0.0), bump * x(1))}}};
    s.test_functions = {bump, bump * (Expr(1.0) + Expr(0.4) * x(1))};
    s.lambda_grid = {{0.0, 0.0}, {0.2, -0.1}};
    return s;
}

Scenario make_levi_civita_flatish() {
    Scenario s;
    s.name = "levi_civita_flatish";
    s.ambient_dim = 2;
    s.base_dim = 1;
    // Conformal metric with a harmonic exponent; the frame-rotation
    // coefficients of its compatible connection are real anti-symmetric.
    Expr u = Expr(0.1) * (x(0) * x(0) - x(1) * x(1));
    Expr factor = exp(Expr(2.0) * u);
    ExprMat m(2, 2);
    m(0, 0) = factor;
    m(1, 1) = factor;
    s.metric_entries = std::move(m);
    s.rho = {x(0) * x(0) + x(1) * x(1)};
    Expr r = sqrt(l(0));
    s.chart = FiberChart{2, {r * cos(t(0)), r * sin(t(0))},
                         {ChartAxis::periodic()}};
    s.closed_fiber = true;
    {
        Expr u1 = Expr(0.2) * x(0);   // d u / d x1
        Expr u2 = Expr(-0.2) * x(1);  // d u / d x2
        std::vector<ComplexMat> coeffs(2, ComplexMat(2, 2));
        coeffs[0](0, 1) = ComplexExpr(u2);
        coeffs[0](1, 0) = ComplexExpr(-u2);
        coeffs[1](0, 1) = ComplexExpr(-u1);
        coeffs[1](1, 0) = ComplexExpr(u1);
        s.bundle = HermitianBundle(2, std::move(coeffs));
    }
    s.trivialization = BundleTrivialization{s.chart, Expr(1.0)};
    s.sections = {Section{{ComplexExpr(Expr(1.0)), ComplexExpr(Expr(0.0))}},
                  Section{{ComplexExpr(x(0), Expr(0.1) * x(1)),
                           ComplexExpr(x(1))}}};
    s.test_functions = {Expr(1.0), Expr(1.0) + Expr(0.3) * x(0)};
    s.lambda_grid = {{0.8}, {1.2}};
    return s;
}

const std::vector<std::string>& names() {
    static const std::vector<std::string> n{
        "sphere2",           "sphere3",       "linear_projection",
        "conformal_sphere",  "rank2_bundle",  "two_component",
        "levi_civita_flatish"};
    return n;
}

} // namespace

std::vector<std::string> builtin_scenario_names() { return names(); }

Scenario builtin_scenario(const std::string& name) {
    if (name == "sphere2") return make_sphere2();
    if (name == "sphere3") return make_sphere3();
    if (name == "linear_projection") return make_linear_projection();
    if (name == "conformal_sphere") return make_conformal_sphere();
    if (name == "rank2_bundle") return make_rank2_bundle();
    if (name == "two_component") return make_two_component();
    if (name == "levi_civita_flatish") return make_levi_civita_flatish();
    throw ScenarioNotFound(name);
}

// ---------------------------------------------------------------------------
// Check suite
// ---------------------------------------------------------------------------

namespace {

struct RunCtx {
    const Scenario& s;
    const Metric& g;
    const Metric& base;
    const Submersion& S;
    int order;
    bool tol_fixed;  // a global override is active: use it verbatim
    std::vector<std::vector<double>> ambient_pts;  // chart samples
    std::function<double(const char*, double)> tol;
    std::vector<CheckReport>* out;
};

void add_residual(RunCtx& ctx, const char* name, const char* ref, double res,
                  double def_tol, double t0) {
    CheckReport rep =
        CheckReport::residual(name, ref, res, ctx.tol(name, def_tol));
    rep.ms = now_ms() - t0;
    ctx.out->push_back(std::move(rep));
}

// Normal-space component g^{-1} G^T W^{-1} c for an ambient k-vector c.
std::vector<Expr> normal_solve(const Submersion& S, const Metric& g,
                               std::span<const Expr> c) {
    const int k = S.base_dim();
    const int m = S.ambient_dim();
    ExprMat adj = adjugate(S.gram());
    Expr d = det(S.gram());
    std::vector<Expr> coeffs(static_cast<std::size_t>(k), Expr(0.0));
    for (int a = 0; a < k; ++a) {
        Expr sum(0.0);
        for (int b = 0; b < k; ++b) sum += adj(a, b) * c[static_cast<std::size_t>(b)];
        coeffs[static_cast<std::size_t>(a)] = sum / d;
    }
    ExprMat ginv_gt = g.inverse() * S.jacobian().transposed();
    std::vector<Expr> r(static_cast<std::size_t>(m), Expr(0.0));
    for (int i = 0; i < m; ++i) {
        Expr sum(0.0);
        for (int a = 0; a < k; ++a)
            sum += ginv_gt(i, a) * coeffs[static_cast<std::size_t>(a)];
        r[static_cast<std::size_t>(i)] = sum;
    }
    return r;
}

double max_abs_at(const Expr& e, std::span<const std::vector<double>> pts) {
    double worst = 0.0;
    for (const auto& p : pts) {
        Evaluator ev(Point{p, {}, {}});
        worst = std::max(worst, std::abs(ev.eval(e)));
    }
    return worst;
}

VectorField generic_ambient_field(int m, int variant) {
    VectorField v{VarKind::Ambient, {}};
    for (int i = 0; i < m; ++i) {
        Expr c = Expr(0.3 + 0.1 * variant) +
                 Expr(0.2) * x((i + variant) % m) +
                 Expr(0.1) * x(i) * x((i + 1) % m);
        v.components.push_back(c);
    }
    return v;
}

void geometry_checks(RunCtx& ctx) {
    const Submersion& S = ctx.S;
    const Metric& g = ctx.g;
    const int k = S.base_dim();
    const int m = S.ambient_dim();
    std::span<const std::vector<double>> pts = ctx.ambient_pts;

    // Chart really parameterizes the level sets.
    {
        double t0 = now_ms();
        double worst = 0.0;
        for (int a = 0; a < k; ++a) {
            Expr residual = ctx.s.chart.pullback(S.components()[static_cast<std::size_t>(a)]) - l(a);
            for (const auto& lam : ctx.s.lambda_grid) {
                QuadratureRule rule = ctx.s.chart.rule(4);
                for (std::size_t n = 0; n < rule.node_count(); ++n) {
                    Evaluator ev(Point{{}, lam, rule.node(n)});
                    worst = std::max(worst, std::abs(ev.eval(residual)));
                }
            }
        }
        add_residual(ctx, "chart_consistency",
                     "fiber chart lands on the required level set", worst,
                     1e-12, t0);
    }

    // Full rank along the sampled fibers.
    {
        double t0 = now_ms();
        double min_eig = std::numeric_limits<double>::infinity();
        for (const auto& p : pts)
            min_eig = std::min(min_eig, S.gram_min_eigenvalue(p));
        CheckReport rep = CheckReport::residual(
            "rank_condition", "differential is surjective on the sampled set",
            std::max(0.0, 1e-8 - min_eig), ctx.tol("rank_condition", 0.0));
        rep.value = {min_eig};
        rep.ms = now_ms() - t0;
        ctx.out->push_back(std::move(rep));
    }

    // The lift pushes forward to the original base field.
    {
        double t0 = now_ms();
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            VectorField lifted = S.lift(VectorField::coordinate(VarKind::Base, k, i));
            std::vector<Expr> push = S.pushforward(lifted);
            for (int a = 0; a < k; ++a) {
                Expr residual = push[static_cast<std::size_t>(a)] -
                                Expr(a == i ? 1.0 : 0.0);
                worst = std::max(worst, max_abs_at(residual, pts));
            }
        }
        add_residual(ctx, "lift_pushforward",
                     "lifted field projects back to the base direction", worst,
                     1e-11, t0);
    }

    // The lift is orthogonal to the fiber directions.
    {
        double t0 = now_ms();
        VectorField v = generic_ambient_field(m, 1);
        std::vector<Expr> push = S.pushforward(v);
        std::vector<Expr> normal = normal_solve(S, g, push);
        VectorField tangent{VarKind::Ambient, {}};
        for (int i = 0; i < m; ++i)
            tangent.components.push_back(v.components[static_cast<std::size_t>(i)] -
                                         normal[static_cast<std::size_t>(i)]);
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            VectorField lifted = S.lift(VectorField::coordinate(VarKind::Base, k, i));
            worst = std::max(worst,
                             max_abs_at(metric_pairing(g, lifted, tangent), pts));
        }
        add_residual(ctx, "lift_orthogonality",
                     "lifted field is normal to every fiber", worst, 1e-10, t0);
    }

    // Closed form of the lift via the projected gradient (Euclidean base).
    {
        double t0 = now_ms();
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            VectorField a = S.lift(VectorField::coordinate(VarKind::Base, k, i));
            VectorField b = S.lift_coordinate_projection(i);
            for (int c = 0; c < m; ++c)
                worst = std::max(
                    worst,
                    max_abs_at(a.components[static_cast<std::size_t>(c)] -
                                   b.components[static_cast<std::size_t>(c)],
                               pts));
        }
        add_residual(ctx, "lift_agreement",
                     "closed-form lift matches the linear-solve lift", worst,
                     1e-10, t0);
    }

    // Density: positive; equal to the gradient norm for scalar maps.
    {
        double t0 = now_ms();
        double min_j = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
            Evaluator ev(Point{p, {}, {}});
            min_j = std::min(min_j, ev.eval(S.j_density()));
        }
        CheckReport rep = CheckReport::residual(
            "density_positivity", "area-correction density stays positive",
            min_j > 0.0 ? 0.0 : 1.0, ctx.tol("density_positivity", 0.0));
        rep.value = {min_j};
        rep.ms = now_ms() - t0;
        ctx.out->push_back(std::move(rep));
    }
    if (k == 1) {
        double t0 = now_ms();
        VectorField grad = gradient(S.components()[0], g);
        Expr norm = sqrt(metric_pairing(g, grad, grad));
        add_residual(ctx, "density_gradient_norm",
                     "scalar-map density equals the gradient length",
                     max_abs_at(S.j_density() - norm, pts), 1e-12, t0);
    }
    if (k >= 2) {
        double t0 = now_ms();
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            std::vector<Expr> reduced;
            for (int a = 0; a < k; ++a)
                if (a != i) reduced.push_back(S.components()[static_cast<std::size_t>(a)]);
            Submersion Si(reduced, g, Metric::euclidean(k - 1, VarKind::Base));
            VectorField lift_i = S.lift_coordinate_projection(i);
            Expr lift_norm = sqrt(metric_pairing(g, lift_i, lift_i));
            // |projected gradient| = 1 / |lift|.
            Expr residual = S.j_density() - Si.j_density() / lift_norm;
            worst = std::max(worst, max_abs_at(residual, pts));
        }
        add_residual(ctx, "density_factorization",
                     "density splits through each projected component", worst,
                     1e-10, t0);
    }

    // Weighted divergence identity: div w.r.t. J^{-1} eta computed two ways.
    {
        double t0 = now_ms();
        VectorField Y = generic_ambient_field(m, 2);
        Expr lhs = divergence_weighted(Y, g, S.j_density());
        VectorField scaled{VarKind::Ambient, {}};
        for (int i = 0; i < m; ++i)
            scaled.components.push_back(
                Y.components[static_cast<std::size_t>(i)] / S.j_density());
        Expr rhs = S.j_density() * divergence(scaled, g);
        add_residual(ctx, "weighted_divergence_identity",
                     "rescaled-volume divergence matches its product form",
                     max_abs_at(lhs - rhs, pts), 1e-10, t0);
    }

    // Divergence of a bracket.
    {
        double t0 = now_ms();
        VectorField X1 = generic_ambient_field(m, 3);
        VectorField X2 = generic_ambient_field(m, 4);
        Expr lhs = divergence(lie_bracket(X1, X2), g);
        Expr rhs = apply_field(X1, divergence(X2, g)) -
                   apply_field(X2, divergence(X1, g));
        add_residual(ctx, "bracket_divergence",
                     "divergence of a bracket telescopes", max_abs_at(lhs - rhs, pts),
                     1e-10, t0);
    }

    // Fiber-tangent fields have zero total fiber divergence.
    if (ctx.s.closed_fiber || ctx.s.fiber_bump) {
        double t0 = now_ms();
        VectorField v = generic_ambient_field(m, 5);
        std::vector<Expr> push = S.pushforward(v);
        std::vector<Expr> normal = normal_solve(S, g, push);
        VectorField tangent{VarKind::Ambient, {}};
        for (int i = 0; i < m; ++i) {
            Expr c = v.components[static_cast<std::size_t>(i)] -
                     normal[static_cast<std::size_t>(i)];
            if (ctx.s.fiber_bump) c = (*ctx.s.fiber_bump) * c;
            tangent.components.push_back(simplify(c));
        }
        Expr integrand = S.div_nu(tangent, VectorField::zero(VarKind::Base, k),
                                  ctx.ambient_pts);
        // The integrand mixes rational lift denominators into the cutoff, so
        // give this integral twice the working order.
        QuadratureRule rule = ctx.s.chart.rule(2 * ctx.order);
        double worst = 0.0;
        for (const auto& lam : ctx.s.lambda_grid)
            worst = std::max(worst, std::abs(fiber_integral(
                                        ctx.s.chart, g, S, integrand,
                                        FiberMeasure::MuLambda, rule, lam)));
        add_residual(ctx, "tangent_divergence_integral",
                     "compactly supported tangent flows preserve fiber mass",
                     worst, 1e-8, t0);
    }
}

void derivation_checks(RunCtx& ctx) {
    const Submersion& S = ctx.S;
    const Metric& g = ctx.g;
    const int k = S.base_dim();
    QuadratureRule rule = ctx.s.chart.rule(ctx.order);
    double t0 = now_ms();
    double worst = 0.0;
    double tol_floor = ctx.tol("derivation_formula", 1e-6);
    double tol_eff = tol_floor;
    double first_value = 0.0;
    bool have_first = false;
    for (const Expr& f : ctx.s.test_functions) {
        for (int i = 0; i < k; ++i) {
            VectorField X = VectorField::coordinate(VarKind::Base, k, i);
            for (const auto& lam : ctx.s.lambda_grid) {
                double rhs = derivation_formula_rhs(ctx.s.chart, g, S, f, X,
                                                    rule, lam);
                double fd = fiber_integral_directional_fd(ctx.s.chart, g, S, f,
                                                          X, rule, lam);
                if (!have_first) {
                    first_value = rhs;
                    have_first = true;
                }
                worst = std::max(worst, std::abs(rhs - fd));
                if (!ctx.tol_fixed)
                    tol_eff = std::max(tol_eff, 1e-4 * std::abs(rhs));
            }
        }
    }
    CheckReport rep = CheckReport::residual(
        "derivation_formula",
        "base derivative of a fiber integral equals its integral form", worst,
        tol_eff);
    rep.oracle = {first_value};
    rep.ms = now_ms() - t0;
    ctx.out->push_back(std::move(rep));
}

void region_checks(RunCtx& ctx) {
    if (!ctx.s.region_chart) return;
    double t0 = now_ms();
    Expr f = ctx.s.region_function ? *ctx.s.region_function : Expr(1.0);
    CoareaResult r =
        coarea_both_sides(ctx.s.chart, *ctx.s.region_chart, ctx.g, ctx.S, f,
                          ctx.s.base_box, ctx.order);
    double scale = ctx.tol_fixed ? 1.0 : 1.0 + std::abs(r.direct);
    CheckReport rep = CheckReport::make(
        "region_consistency",
        "level-set slicing reproduces the full-region integral", r.direct,
        r.nested, ctx.tol("region_consistency", 1e-6) * scale);
    rep.ms = now_ms() - t0;
    ctx.out->push_back(std::move(rep));
    if (ctx.s.region_oracle) {
        double t1 = now_ms();
        double oracle = *ctx.s.region_oracle;
        CheckReport rep2 = CheckReport::make(
            "region_oracle", "full-region integral matches its closed form",
            r.direct, oracle,
            ctx.tol("region_oracle", 1e-6) *
                (ctx.tol_fixed ? 1.0 : 1.0 + std::abs(oracle)));
        rep2.ms = now_ms() - t1;
        ctx.out->push_back(std::move(rep2));
    }
}

double section_residual_at(const Section& a, const Section& b,
                           std::span<const std::vector<double>> pts) {
    double worst = 0.0;
    for (const auto& p : pts) {
        Evaluator ev(Point{p, {}, {}});
        for (int i = 0; i < a.rank(); ++i) {
            const ComplexExpr& ca = a.components[static_cast<std::size_t>(i)];
            const ComplexExpr& cb = b.components[static_cast<std::size_t>(i)];
            worst = std::max(worst,
                             std::hypot(ev.eval(ca.re) - ev.eval(cb.re),
                                        ev.eval(ca.im) - ev.eval(cb.im)));
        }
    }
    return worst;
}

void bundle_checks(RunCtx& ctx) {
    if (!ctx.s.bundle || ctx.s.sections.empty()) return;
    const HermitianBundle& B = *ctx.s.bundle;
    const Submersion& S = ctx.S;
    const Metric& g = ctx.g;
    const int k = S.base_dim();
    std::span<const std::vector<double>> pts = ctx.ambient_pts;
    const Section& phi = ctx.s.sections.front();
    const Section& psi = ctx.s.sections.size() > 1 ? ctx.s.sections[1]
                                                   : ctx.s.sections.front();

    {
        double t0 = now_ms();
        double worst = 0.0;
        for (const auto& p : pts)
            worst = std::max(worst, B.anti_hermitian_residual(p));
        add_residual(ctx, "connection_anti_hermitian",
                     "coefficient matrices are skew-adjoint", worst, 1e-12, t0);
    }

    VectorField X = VectorField::coordinate(VarKind::Base, k, 0);

    {
        // Module rule over base functions.
        double t0 = now_ms();
        Expr a = Expr(0.5) + Expr(0.3) * l(0) + Expr(0.1) * l(0) * l(0);
        Expr a_rho = S.compose_with_rho(a);
        Section scaled;
        for (const ComplexExpr& c : phi.components)
            scaled.components.push_back(a_rho * c);
        Section lhs = nabla(B, S, X, scaled);
        Section rhs = nabla(B, S, X, phi);
        Expr xa_rho = S.compose_with_rho(apply_field(X, a));
        for (int i = 0; i < B.rank(); ++i)
            rhs.components[static_cast<std::size_t>(i)] =
                a_rho * rhs.components[static_cast<std::size_t>(i)] +
                xa_rho * phi.components[static_cast<std::size_t>(i)];
        add_residual(ctx, "connection_module_rule",
                     "derivative obeys the product rule over base functions",
                     section_residual_at(lhs, rhs, pts), 1e-10, t0);
    }

    {
        // Additivity and base-function linearity in the direction.
        double t0 = now_ms();
        VectorField X2{VarKind::Base, {}};
        for (int j = 0; j < k; ++j)
            X2.components.push_back(Expr(0.4) + Expr(0.2) * l(j));
        VectorField sum{VarKind::Base, {}};
        for (int j = 0; j < k; ++j)
            sum.components.push_back(X.components[static_cast<std::size_t>(j)] +
                                     X2.components[static_cast<std::size_t>(j)]);
        Section lhs = nabla(B, S, sum, phi);
        Section rhs = nabla(B, S, X, phi);
        {
            Section tsec = nabla(B, S, X2, phi);
            for (int i = 0; i < B.rank(); ++i)
                rhs.components[static_cast<std::size_t>(i)] =
                    rhs.components[static_cast<std::size_t>(i)] +
                    tsec.components[static_cast<std::size_t>(i)];
        }
        double res = section_residual_at(lhs, rhs, pts);

        Expr a = Expr(0.6) + Expr(0.3) * l(0);
        VectorField aX{VarKind::Base, {}};
        for (int j = 0; j < k; ++j)
            aX.components.push_back(a * X2.components[static_cast<std::size_t>(j)]);
        Section lhs2 = nabla(B, S, aX, phi);
        Section rhs2 = nabla(B, S, X2, phi);
        Expr a_rho = S.compose_with_rho(a);
        for (int i = 0; i < B.rank(); ++i)
            rhs2.components[static_cast<std::size_t>(i)] =
                a_rho * rhs2.components[static_cast<std::size_t>(i)];
        res = std::max(res, section_residual_at(lhs2, rhs2, pts));
        add_residual(ctx, "connection_linearity",
                     "derivative is linear over base functions in the direction",
                     res, 1e-10, t0);
    }

    {
        QuadratureRule rule = ctx.s.chart.rule(ctx.order);
        CheckReport rep = metric_compat_check(
            B, ctx.s.chart, g, S, phi, psi, X, rule, ctx.s.lambda_grid.front(),
            ctx.tol("metric_compatibility", 1e-5));
        ctx.out->push_back(std::move(rep));
    }

    {
        VectorField Y{VarKind::Base, {}};
        if (k >= 2) {
            Y.components.assign(static_cast<std::size_t>(k), Expr(0.0));
            Y.components[1] = Expr(1.0) + l(0);
        } else {
            Y.components.push_back(l(0));
        }
        CheckReport rep = curvature_check(B, S, X, Y, phi, pts,
                                          ctx.tol("curvature_identity", 1e-9));
        ctx.out->push_back(std::move(rep));
    }
}

void trivialization_checks(RunCtx& ctx) {
    if (!ctx.s.trivialization || ctx.s.sections.empty()) return;
    const BundleTrivialization& triv = *ctx.s.trivialization;
    const Submersion& S = ctx.S;
    const Metric& g = ctx.g;
    QuadratureRule rule = triv.chart.rule(ctx.order);

    {
        double t0 = now_ms();
        double worst = 0.0;
        for (const Section& u : ctx.s.sections)
            for (const auto& lam : ctx.s.lambda_grid) {
                CheckReport one =
                    unitarity_check(triv, g, S, u, rule, lam, 1.0);
                worst = std::max(worst, one.abs_err);
            }
        add_residual(ctx, "unitarity",
                     "fiber-to-reference transport preserves norms", worst,
                     1e-8, t0);
    }

    if (ctx.s.bundle) {
        double t0 = now_ms();
        VectorField X = VectorField::coordinate(VarKind::Base, S.base_dim(), 0);
        double worst = 0.0;
        for (const Section& phi : ctx.s.sections)
            for (const auto& lam : ctx.s.lambda_grid) {
                CheckReport one = intertwine_check(triv, *ctx.s.bundle, g, S,
                                                   phi, X, rule, lam, 1.0);
                worst = std::max(worst, one.abs_err);
            }
        add_residual(ctx, "intertwining",
                     "transported derivative matches the multiplier form",
                     worst, 1e-5, t0);
    }

    if (ctx.s.bundle && ctx.s.bundle->is_flat()) {
        double t0 = now_ms();
        int r = ctx.s.bundle->rank();
        std::vector<ComplexExpr> u0(static_cast<std::size_t>(r));
        std::vector<ComplexExpr> v0(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) {
            u0[static_cast<std::size_t>(i)] = ComplexExpr(Expr(1.0));
            v0[static_cast<std::size_t>(i)] =
                ComplexExpr(Expr(1.0), Expr(0.2 * (i + 1)));
        }
        CheckReport rep = horizontal_constancy_check(
            triv, g, S, u0, v0, rule, ctx.s.lambda_grid,
            ctx.tol("horizontal_constancy", 1e-8));
        rep.ms = now_ms() - t0;
        ctx.out->push_back(std::move(rep));
    }
}

void operator_field_checks(RunCtx& ctx) {
    const int k = ctx.s.base_dim;
    // Deterministic polynomial data over the base coordinates.
    auto entry = [&](int i, int j, int dir) {
        return Expr(0.2 + 0.1 * i - 0.05 * j) +
               Expr(0.15 + 0.05 * dir) * l((i + j + dir) % k);
    };
    auto connection = [&](int shift) {
        std::vector<ComplexMat> gamma;
        for (int dir = 0; dir < k; ++dir) {
            ComplexMat m(3, 3);
            for (int i = 0; i < 3; ++i) {
                m(i, i) = ComplexExpr(Expr(0.0), entry(i, i, dir + shift));
                for (int j = i + 1; j < 3; ++j) {
                    Expr re = entry(i, j, dir + shift);
                    Expr im = entry(j, i, dir + 2 * shift);
                    m(i, j) = ComplexExpr(re, im);
                    m(j, i) = ComplexExpr(-re, im);
                }
            }
            gamma.push_back(std::move(m));
        }
        return MatrixConnection(std::move(gamma));
    };
    MatrixConnection cin = connection(1);
    MatrixConnection cout = connection(2);
    ComplexMat am(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            am(i, j) = ComplexExpr(entry(i, j, 3), entry(j, i, 4));
    OperatorField A{std::move(am)};
    VectorField X{VarKind::Base, {}};
    VectorField Y{VarKind::Base, {}};
    for (int j = 0; j < k; ++j) {
        X.components.push_back(Expr(0.8) + Expr(0.3) * l(j));
        Y.components.push_back(Expr(-0.5) + Expr(0.2) * l((j + 1) % k));
    }
    Expr f = Expr(0.4) + Expr(0.7) * l(0);
    std::span<const std::vector<double>> lam_pts = ctx.s.lambda_grid;

    double t0 = now_ms();
    auto reports = prop_con_checks(A, cin, cout, X, Y, f, lam_pts,
                                   ctx.tol("operator_field_calculus", 1e-11));
    double worst = 0.0;
    for (const CheckReport& r : reports) worst = std::max(worst, r.abs_err);
    add_residual(ctx, "operator_field_calculus",
                 "induced operator derivative satisfies its defining rules",
                 worst, 1e-11, t0);

    {
        double t1 = now_ms();
        ComplexMat bm(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                bm(i, j) = ComplexExpr(entry(i, j, 5), entry(j, i, 6));
        OperatorField Bf{std::move(bm)};
        MatrixConnection cmid = connection(3);
        CheckReport rep = leibniz_check(A, Bf, cin, cmid, cout, X, lam_pts,
                                        ctx.tol("operator_field_leibniz", 1e-11));
        rep.ms = now_ms() - t1;
        ctx.out->push_back(std::move(rep));
    }

    {
        double t1 = now_ms();
        ComplexMat tm(2, 2);
        tm(0, 0) = ComplexExpr(cos(l(0)), sin(l(0)));
        tm(1, 1) = ComplexExpr(cos(Expr(2.0) * l(0)), sin(Expr(2.0) * l(0)));
        OperatorField tau{std::move(tm)};
        ComplexMat aim(2, 2);
        aim(0, 0) = ComplexExpr(Expr(0.0), Expr(0.3) + Expr(0.2) * l(0));
        aim(0, 1) = ComplexExpr(Expr(0.1), Expr(0.2) * l(0));
        aim(1, 0) = ComplexExpr(Expr(-0.1), Expr(0.2) * l(0));
        aim(1, 1) = ComplexExpr(Expr(0.0), Expr(-0.4) * l(0));
        OperatorField a_i{std::move(aim)};
        VectorField X1 = VectorField::coordinate(VarKind::Base, k, 0);
        OperatorField a_j =
            (tau * a_i - field_derivative(tau, X1)) * tau.adjoint();
        CheckReport rep = transition_relation_check(
            tau, a_i, a_j, X1, lam_pts,
            ctx.tol("transition_relation", 1e-11));
        rep.ms = now_ms() - t1;
        ctx.out->push_back(std::move(rep));
    }
}

} // namespace

ScenarioReport run_scenario(const Scenario& s, const ScenarioOptions& opt) {
    ScenarioReport report;
    report.scenario = s.name;
    auto tol = [&](const char* name, double def) -> double {
        if (opt.tol > 0.0) return opt.tol;
        auto it = s.tolerances.find(name);
        return it != s.tolerances.end() ? it->second : def;
    };
    try {
        Metric g(s.metric_entries);
        Metric base = Metric::euclidean(s.base_dim, VarKind::Base);
        Submersion S(s.rho, g, base);

        RunCtx ctx{s, g, base, S,
                   opt.quad_order > 0 ? opt.quad_order : s.quad_order,
                   opt.tol > 0.0,
                   {}, tol, &report.checks};

        // Ambient sample points: coarse chart nodes over the base grid.
        QuadratureRule probe = s.chart.rule(4);
        for (const auto& lam : s.lambda_grid)
            for (std::size_t n = 0; n < probe.node_count(); ++n) {
                Evaluator ev(Point{{}, lam, probe.node(n)});
                std::vector<double> p;
                p.reserve(s.chart.map.size());
                for (const Expr& c : s.chart.map) p.push_back(ev.eval(c));
                ctx.ambient_pts.push_back(std::move(p));
            }

        geometry_checks(ctx);

        // Abort the expensive checks if the rank precondition failed.
        bool rank_ok = true;
        for (const CheckReport& c : report.checks)
            if (c.name == "rank_condition" && !c.pass) rank_ok = false;
        if (rank_ok) {
            derivation_checks(ctx);
            region_checks(ctx);
            bundle_checks(ctx);
            trivialization_checks(ctx);
            operator_field_checks(ctx);
        }
    } catch (const std::exception& e) {
        CheckReport rep = CheckReport::residual(
            "scenario_setup", std::string("failed: ") + e.what(), 1.0, 0.0);
        report.checks.push_back(std::move(rep));
    }
    return report;
}

std::vector<ScenarioReport> run_scenarios(const std::vector<Scenario>& list,
                                          const ScenarioOptions& opt) {
    std::vector<ScenarioReport> out(list.size());
    int jobs = std::max(1, opt.jobs);
    if (jobs == 1 || list.size() <= 1) {
        for (std::size_t i = 0; i < list.size(); ++i)
            out[i] = run_scenario(list[i], opt);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= list.size()) return;
            out[i] = run_scenario(list[i], opt);
        }
    };
    std::vector<std::thread> threads;
    std::size_t nthreads =
        std::min(static_cast<std::size_t>(jobs), list.size());
    for (std::size_t j = 0; j < nthreads; ++j) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    return out;
}

// ---------------------------------------------------------------------------
// Configuration ingestion
// ---------------------------------------------------------------------------

namespace {

Expr parse_at(const std::string& src, const std::string& path) {
    try {
        return parse(src);
    } catch (const ParseError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing");
    return j.at(key);
}

} // namespace

Scenario load_scenario_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid document: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("top level: expected an object");

    Scenario s;
    s.name = need(j, "name", "$").get<std::string>();
    s.ambient_dim = need(j, "ambient_dim", "$").get<int>();
    s.base_dim = need(j, "base_dim", "$").get<int>();
    if (s.ambient_dim <= 0 || s.base_dim <= 0 || s.base_dim >= s.ambient_dim)
        throw ConfigError("$.ambient_dim/base_dim: need 0 < base_dim < ambient_dim");

    const json& metric = need(j, "metric", "$");
    if (metric.is_string()) {
        if (metric.get<std::string>() != "euclidean")
            throw ConfigError("$.metric: unknown preset '" +
                              metric.get<std::string>() + "'");
        s.metric_entries = ExprMat::identity(s.ambient_dim);
    } else if (metric.is_array()) {
        if (static_cast<int>(metric.size()) != s.ambient_dim)
            throw ConfigError("$.metric: expected " +
                              std::to_string(s.ambient_dim) + " rows");
        ExprMat m(s.ambient_dim, s.ambient_dim);
        for (int i = 0; i < s.ambient_dim; ++i) {
            const json& row = metric.at(static_cast<std::size_t>(i));
            if (!row.is_array() ||
                static_cast<int>(row.size()) != s.ambient_dim)
                throw ConfigError("$.metric[" + std::to_string(i) +
                                  "]: expected " +
                                  std::to_string(s.ambient_dim) + " entries");
            for (int c = 0; c < s.ambient_dim; ++c)
                m(i, c) = parse_at(row.at(static_cast<std::size_t>(c))
                                       .get<std::string>(),
                                   "$.metric[" + std::to_string(i) + "][" +
                                       std::to_string(c) + "]");
        }
        s.metric_entries = std::move(m);
    } else {
        throw ConfigError("$.metric: expected \"euclidean\" or a matrix");
    }

    const json& rho = need(j, "rho", "$");
    if (!rho.is_array() || static_cast<int>(rho.size()) != s.base_dim)
        throw ConfigError("$.rho: expected " + std::to_string(s.base_dim) +
                          " expressions");
    for (std::size_t i = 0; i < rho.size(); ++i)
        s.rho.push_back(parse_at(rho.at(i).get<std::string>(),
                                 "$.rho[" + std::to_string(i) + "]"));

    const json& chart = need(j, "fiber_chart", "$");
    const json& cmap = need(chart, "map", "$.fiber_chart");
    if (!cmap.is_array() || static_cast<int>(cmap.size()) != s.ambient_dim)
        throw ConfigError("$.fiber_chart.map: expected " +
                          std::to_string(s.ambient_dim) + " expressions");
    s.chart.ambient_dim = s.ambient_dim;
    for (std::size_t i = 0; i < cmap.size(); ++i)
        s.chart.map.push_back(
            parse_at(cmap.at(i).get<std::string>(),
                     "$.fiber_chart.map[" + std::to_string(i) + "]"));
    const json& domain = need(chart, "domain", "$.fiber_chart");
    if (!domain.is_array() ||
        static_cast<int>(domain.size()) != s.ambient_dim - s.base_dim)
        throw ConfigError("$.fiber_chart.domain: expected " +
                          std::to_string(s.ambient_dim - s.base_dim) +
                          " axes");
    for (std::size_t i = 0; i < domain.size(); ++i) {
        const json& ax = domain.at(i);
        std::string path = "$.fiber_chart.domain[" + std::to_string(i) + "]";
        if (ax.contains("interval")) {
            const json& iv = ax.at("interval");
            if (!iv.is_array() || iv.size() != 2)
                throw ConfigError(path + ".interval: expected [a, b]");
            s.chart.domain.push_back(ChartAxis::interval(
                iv.at(0).get<double>(), iv.at(1).get<double>()));
        } else if (ax.contains("periodic")) {
            s.chart.domain.push_back(ChartAxis::periodic());
        } else {
            throw ConfigError(path + ": expected interval or periodic");
        }
    }

    if (j.contains("bundle")) {
        const json& b = j.at("bundle");
        int rank = need(b, "rank", "$.bundle").get<int>();
        if (rank <= 0) throw ConfigError("$.bundle.rank: must be positive");
        const json& conn = need(b, "connection", "$.bundle");
        if (!conn.is_array() ||
            static_cast<int>(conn.size()) != s.ambient_dim)
            throw ConfigError("$.bundle.connection: expected " +
                              std::to_string(s.ambient_dim) + " matrices");
        std::vector<ComplexMat> coeffs;
        for (std::size_t d = 0; d < conn.size(); ++d) {
            const json& mat = conn.at(d);
            std::string mpath = "$.bundle.connection[" + std::to_string(d) + "]";
            if (!mat.is_array() || static_cast<int>(mat.size()) != rank)
                throw ConfigError(mpath + ": expected " +
                                  std::to_string(rank) + " rows");
            ComplexMat m(rank, rank);
            for (int r = 0; r < rank; ++r) {
                const json& row = mat.at(static_cast<std::size_t>(r));
                if (!row.is_array() || static_cast<int>(row.size()) != rank)
                    throw ConfigError(mpath + "[" + std::to_string(r) +
                                      "]: expected " + std::to_string(rank) +
                                      " entries");
                for (int c = 0; c < rank; ++c) {
                    const json& ent = row.at(static_cast<std::size_t>(c));
                    std::string epath = mpath + "[" + std::to_string(r) + "][" +
                                        std::to_string(c) + "]";
                    m(r, c) = ComplexExpr(
                        parse_at(need(ent, "re", epath).get<std::string>(),
                                 epath + ".re"),
                        parse_at(need(ent, "im", epath).get<std::string>(),
                                 epath + ".im"));
                }
            }
            coeffs.push_back(std::move(m));
        }
        s.bundle = HermitianBundle(rank, std::move(coeffs));
    }

    if (j.contains("trivialization")) {
        const json& tv = j.at("trivialization");
        const json& pmap = need(tv, "phi_inverse", "$.trivialization");
        if (!pmap.is_array() ||
            static_cast<int>(pmap.size()) != s.ambient_dim)
            throw ConfigError("$.trivialization.phi_inverse: expected " +
                              std::to_string(s.ambient_dim) + " expressions");
        FiberChart tchart;
        tchart.ambient_dim = s.ambient_dim;
        for (std::size_t i = 0; i < pmap.size(); ++i)
            tchart.map.push_back(
                parse_at(pmap.at(i).get<std::string>(),
                         "$.trivialization.phi_inverse[" + std::to_string(i) +
                             "]"));
        tchart.domain = s.chart.domain;
        Expr kv = parse_at(
            need(tv, "k_volume", "$.trivialization").get<std::string>(),
            "$.trivialization.k_volume");
        s.trivialization = BundleTrivialization{std::move(tchart), std::move(kv)};
    }

    if (j.contains("sections")) {
        const json& secs = j.at("sections");
        if (!secs.is_array()) throw ConfigError("$.sections: expected an array");
        for (std::size_t si = 0; si < secs.size(); ++si) {
            const json& sec = secs.at(si);
            std::string spath = "$.sections[" + std::to_string(si) + "]";
            if (!sec.is_array()) throw ConfigError(spath + ": expected an array");
            Section out;
            for (std::size_t c = 0; c < sec.size(); ++c) {
                const json& ent = sec.at(c);
                std::string epath = spath + "[" + std::to_string(c) + "]";
                out.components.push_back(ComplexExpr(
                    parse_at(need(ent, "re", epath).get<std::string>(),
                             epath + ".re"),
                    parse_at(need(ent, "im", epath).get<std::string>(),
                             epath + ".im")));
            }
            s.sections.push_back(std::move(out));
        }
    }

    if (j.contains("test_functions")) {
        const json& fns = j.at("test_functions");
        if (!fns.is_array())
            throw ConfigError("$.test_functions: expected an array");
        for (std::size_t i = 0; i < fns.size(); ++i)
            s.test_functions.push_back(
                parse_at(fns.at(i).get<std::string>(),
                         "$.test_functions[" + std::to_string(i) + "]"));
    }
    if (s.test_functions.empty()) s.test_functions.push_back(Expr(1.0));

    if (j.contains("lambda_grid")) {
        const json& grid = j.at("lambda_grid");
        if (!grid.is_array() || grid.empty())
            throw ConfigError("$.lambda_grid: expected a non-empty array");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const json& pt = grid.at(i);
            std::string ppath = "$.lambda_grid[" + std::to_string(i) + "]";
            std::vector<double> lam;
            if (pt.is_number()) {
                lam.push_back(pt.get<double>());
            } else if (pt.is_array()) {
                for (const json& v : pt) lam.push_back(v.get<double>());
            } else {
                throw ConfigError(ppath + ": expected a number or an array");
            }
            if (static_cast<int>(lam.size()) != s.base_dim)
                throw ConfigError(ppath + ": expected " +
                                  std::to_string(s.base_dim) + " coordinates");
            s.lambda_grid.push_back(std::move(lam));
        }
    } else {
        s.lambda_grid.push_back(
            std::vector<double>(static_cast<std::size_t>(s.base_dim), 1.0));
    }

    if (j.contains("quad_order")) {
        s.quad_order = j.at("quad_order").get<int>();
        if (s.quad_order < 2) throw ConfigError("$.quad_order: must be >= 2");
    }
    if (j.contains("tolerances")) {
        const json& tols = j.at("tolerances");
        if (!tols.is_object())
            throw ConfigError("$.tolerances: expected an object");
        for (auto it = tols.begin(); it != tols.end(); ++it)
            s.tolerances[it.key()] = it.value().get<double>();
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario_text(ss.str());
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

namespace {

ordered_json values_json(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    if (v.size() == 1) return v.front();
    ordered_json arr = ordered_json::array();
    for (double d : v) arr.push_back(d);
    return arr;
}

ordered_json report_json(const ScenarioReport& rep) {
    ordered_json out;
    out["scenario"] = rep.scenario;
    ordered_json checks = ordered_json::array();
    for (const CheckReport& c : rep.checks) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["paper_ref"] = c.paper_ref;
        jc["value"] = values_json(c.value);
        jc["oracle"] = values_json(c.oracle);
        jc["abs_err"] = c.abs_err;
        jc["tol"] = c.tol;
        jc["pass"] = c.pass;
        jc["ms"] = c.ms;
        checks.push_back(std::move(jc));
    }
    out["checks"] = std::move(checks);
    return out;
}

} // namespace

std::string reports_to_json(std::span<const ScenarioReport> reports) {
    if (reports.size() == 1) return report_json(reports.front()).dump(2) + "\n";
    ordered_json arr = ordered_json::array();
    for (const ScenarioReport& r : reports) arr.push_back(report_json(r));
    return arr.dump(2) + "\n";
}

std::string reports_to_markdown(std::span<const ScenarioReport> reports) {
    std::ostringstream out;
    for (const ScenarioReport& rep : reports) {
        out << "## " << rep.scenario << "\n\n";
        out << "| check | value | oracle | abs_err | tol | pass | ms |\n";
        out << "|---|---|---|---|---|---|---|\n";
        for (const CheckReport& c : rep.checks) {
            auto fmt = [](const std::vector<double>& v) {
                std::ostringstream s;
                s.precision(9);
                for (std::size_t i = 0; i < v.size(); ++i)
                    s << (i ? " / " : "") << v[i];
                if (v.empty()) s << "0";
                return s.str();
            };
            std::ostringstream err;
            err.precision(3);
            err << std::scientific << c.abs_err;
            std::ostringstream tol;
            tol.precision(3);
            tol << std::scientific << c.tol;
            out << "| " << c.name << " | " << fmt(c.value) << " | "
                << fmt(c.oracle) << " | " << err.str() << " | " << tol.str()
                << " | " << (c.pass ? "yes" : "NO") << " | "
                << static_cast<long long>(c.ms + 0.5) << " |\n";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace rdi
