// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failed criteria. Runs the full built-in suite once and then performs the
// targeted spot checks (closed forms, negative control, random data).

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "rdi/scenario.hpp"
#include "test_util.hpp"

using namespace rdi;
using rdi::testing::ExprGen;

namespace {

constexpr double kPi = 3.14159265358979323846;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

const CheckReport* find_check(const std::vector<ScenarioReport>& reports,
                              const std::string& scenario,
                              const std::string& name) {
    for (const ScenarioReport& r : reports) {
        if (r.scenario != scenario) continue;
        for (const CheckReport& c : r.checks)
            if (c.name == name) return &c;
    }
    return nullptr;
}

struct Gate {
    int failures = 0;

    void report(int idx, const char* title, bool ok, const std::string& detail) {
        std::cout << "criterion " << idx << " (" << title << "): "
                  << (ok ? "PASS" : "FAIL") << " — " << detail << "\n";
        if (!ok) ++failures;
    }
};

Submersion make_submersion(const Scenario& s, Metric& g_out) {
    g_out = Metric(s.metric_entries);
    return Submersion(s.rho, g_out, Metric::euclidean(s.base_dim, VarKind::Base));
}

std::vector<std::vector<double>> random_points(int m, int n, std::uint64_t seed) {
    ExprGen gen(seed, m);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < n; ++i) pts.push_back(gen.point(m, -1.0, 1.0));
    return pts;
}

} // namespace

int main() {
    Gate gate;

    // Single full single-threaded pass over the built-in suite; timed for the
    // runtime criterion and mined for the per-scenario residuals below.
    std::vector<Scenario> all;
    for (const std::string& name : builtin_scenario_names())
        all.push_back(builtin_scenario(name));
    auto t_all = std::chrono::steady_clock::now();
    std::vector<ScenarioReport> reports = run_scenarios(all, ScenarioOptions{});
    double run_all_s = seconds_since(t_all);

    // 1. Fiber-derivative identity on the 2-sphere family: closed form pi at
    //    the unit level, agreement with the finite difference, under 1 s.
    {
        Scenario s3 = builtin_scenario("sphere3");
        Metric g = Metric::euclidean(1);
        Submersion S = make_submersion(s3, g);
        VectorField X = VectorField::coordinate(VarKind::Base, 1, 0);
        QuadratureRule rule = s3.chart.rule(16);
        std::vector<double> lam{1.0};
        auto t0 = std::chrono::steady_clock::now();
        double rhs = derivation_formula_rhs(s3.chart, g, S, Expr(1.0), X, rule,
                                            lam);
        double fd = fiber_integral_directional_fd(s3.chart, g, S, Expr(1.0), X,
                                                  rule, lam);
        double dt = seconds_since(t0);
        std::ostringstream d;
        d << "value " << rhs << " vs pi (|diff| " << std::abs(rhs - kPi)
          << "), fd gap " << std::abs(rhs - fd) << ", " << dt << " s";
        gate.report(1, "fiber-derivative identity",
                    std::abs(rhs - kPi) <= 1e-6 && std::abs(rhs - fd) <= 1e-6 &&
                        dt < 1.0,
                    d.str());
    }

    // 2. Slicing identity closed forms: 30*pi for the spherical shell, 1/4
    //    for the product region.
    {
        const CheckReport* shell =
            find_check(reports, "sphere3", "region_oracle");
        const CheckReport* square =
            find_check(reports, "linear_projection", "region_oracle");
        bool ok = shell && square &&
                  std::abs(shell->value.at(0) - 30.0 * kPi) <=
                      1e-6 * 30.0 * kPi &&
                  std::abs(square->value.at(0) - 0.25) <= 1e-10;
        std::ostringstream d;
        if (shell && square)
            d << "shell " << shell->value.at(0) << " vs " << 30.0 * kPi
              << ", square " << square->value.at(0) << " vs 0.25";
        else
            d << "missing region checks";
        gate.report(2, "region slicing closed forms", ok, d.str());
    }

    // 3. Connection axioms on every scenario, plus the negative control that
    //    drops the volume-variation correction.
    {
        bool ok = true;
        double worst_sym = 0.0, worst_compat = 0.0;
        for (const ScenarioReport& r : reports) {
            for (const char* name :
                 {"connection_module_rule", "connection_linearity"}) {
                const CheckReport* c = find_check(reports, r.scenario, name);
                if (!c) { ok = false; continue; }
                worst_sym = std::max(worst_sym, c->abs_err);
                if (c->abs_err > 1e-10) ok = false;
            }
            const CheckReport* c =
                find_check(reports, r.scenario, "metric_compatibility");
            if (!c) { ok = false; continue; }
            worst_compat = std::max(worst_compat, c->abs_err);
            if (c->abs_err > 1e-5) ok = false;
        }
        // Negative control: without the correction the product rule for the
        // fiber pairing must fail by a visible margin on sphere3.
        Scenario s3 = builtin_scenario("sphere3");
        Metric g = Metric::euclidean(1);
        Submersion S = make_submersion(s3, g);
        VectorField X = VectorField::coordinate(VarKind::Base, 1, 0);
        QuadratureRule rule = s3.chart.rule(16);
        Section one{{ComplexExpr(Expr(1.0))}};
        double h = 1e-3;
        std::vector<double> up{1.0 + h}, dn{1.0 - h}, mid{1.0};
        double lhs = (inner_product(s3.chart, g, S, one, one, rule, up).real() -
                      inner_product(s3.chart, g, S, one, one, rule, dn).real()) /
                     (2.0 * h);
        Section broken = nabla_E(*s3.bundle, S.lift(X), one);  // no correction
        double rhs = 2.0 * inner_product(s3.chart, g, S, broken, one, rule, mid)
                               .real();
        double gap = std::abs(lhs - rhs);
        if (gap < 1e-2) ok = false;
        std::ostringstream d;
        d << "worst symbolic " << worst_sym << ", worst compat " << worst_compat
          << ", negative-control gap " << gap;
        gate.report(3, "connection axioms + negative control", ok, d.str());
    }

    // 4. Commutator defect equals the bundle curvature, pointwise at 60
    //    random points, on both non-flat bundle scenarios.
    {
        bool ok = true;
        std::ostringstream d;
        {
            Scenario s = builtin_scenario("rank2_bundle");
            Metric g = Metric::euclidean(1);
            Submersion S = make_submersion(s, g);
            VectorField X = VectorField::coordinate(VarKind::Base, 1, 0);
            VectorField Y{VarKind::Base, {Expr::base(0)}};
            auto pts = random_points(2, 60, 12345);
            CheckReport rep =
                curvature_check(*s.bundle, S, X, Y, s.sections.front(), pts,
                                1e-9);
            ok = ok && rep.pass;
            d << "rank2 " << rep.abs_err;
        }
        {
            Scenario s = builtin_scenario("two_component");
            Metric g = Metric::euclidean(1);
            Submersion S = make_submersion(s, g);
            VectorField X = VectorField::coordinate(VarKind::Base, 2, 0);
            VectorField Y{VarKind::Base, {Expr(0.0), Expr(1.0) + Expr::base(0)}};
            auto pts = random_points(3, 60, 54321);
            CheckReport rep =
                curvature_check(*s.bundle, S, X, Y, s.sections.front(), pts,
                                1e-9);
            ok = ok && rep.pass;
            d << ", two_component " << rep.abs_err << " at 60 points each";
        }
        gate.report(4, "curvature identity", ok, d.str());
    }

    // 5. Trivialization: unitary on 10 random sections x 3 levels; the
    //    transported derivative matches the multiplier form for a flat and a
    //    non-flat bundle.
    {
        Scenario s3 = builtin_scenario("sphere3");
        Metric g = Metric::euclidean(1);
        Submersion S = make_submersion(s3, g);
        QuadratureRule rule = s3.chart.rule(16);
        ExprGen gen(777, 3);
        double worst_unitary = 0.0;
        for (int i = 0; i < 10; ++i) {
            Section u{{ComplexExpr(gen.gen(2), gen.gen(2))}};
            for (double lv : {0.5, 1.0, 2.0}) {
                std::vector<double> lam{lv};
                CheckReport rep = unitarity_check(*s3.trivialization, g, S, u,
                                                  rule, lam, 1e-8);
                worst_unitary = std::max(worst_unitary, rep.abs_err);
            }
        }
        VectorField X = VectorField::coordinate(VarKind::Base, 1, 0);
        std::vector<double> lam1{1.0};
        CheckReport flat_tw =
            intertwine_check(*s3.trivialization, *s3.bundle, g, S,
                             s3.sections.at(1), X, rule, lam1, 1e-5);
        Scenario r2 = builtin_scenario("rank2_bundle");
        Metric g2 = Metric::euclidean(1);
        Submersion S2 = make_submersion(r2, g2);
        QuadratureRule rule2 = r2.chart.rule(16);
        std::vector<double> lam0{0.3};
        CheckReport gen_tw =
            intertwine_check(*r2.trivialization, *r2.bundle, g2, S2,
                             r2.sections.at(1), X, rule2, lam0, 1e-5);
        bool ok = worst_unitary <= 1e-8 && flat_tw.pass && gen_tw.pass;
        std::ostringstream d;
        d << "unitarity " << worst_unitary << ", flat intertwining "
          << flat_tw.abs_err << ", general intertwining " << gen_tw.abs_err;
        gate.report(5, "trivialization", ok, d.str());
    }

    // 6. Inner products of horizontal sections are constant across the grid.
    {
        bool ok = false;
        double worst = 0.0;
        int seen = 0;
        for (const ScenarioReport& r : reports)
            for (const CheckReport& c : r.checks)
                if (c.name == "horizontal_constancy") {
                    ++seen;
                    worst = std::max(worst, c.abs_err);
                }
        ok = seen > 0 && worst <= 1e-8;
        std::ostringstream d;
        d << seen << " flat scenarios, worst spread " << worst;
        gate.report(6, "horizontal constancy", ok, d.str());
    }

    // 7. Operator-field calculus on random 3x3 fields for one- and
    //    two-dimensional bases; corrected transition identity vanishes while
    //    the uncorrected index variant does not (flagged only).
    {
        bool ok = true;
        double worst = 0.0;
        ExprGen gen(2024, 0);
        auto poly = [&](int k) {
            Expr e(gen.uniform(-1.0, 1.0));
            for (int j = 0; j < k; ++j)
                e += Expr(gen.uniform(-0.5, 0.5)) * Expr::base(j);
            return e;
        };
        auto rand_field = [&](int d, int k) {
            ComplexMat m(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    m(i, j) = ComplexExpr(poly(k), poly(k));
            return OperatorField{std::move(m)};
        };
        auto rand_conn = [&](int d, int k) {
            std::vector<ComplexMat> gamma;
            for (int dir = 0; dir < k; ++dir) {
                ComplexMat m(d, d);
                for (int i = 0; i < d; ++i) {
                    m(i, i) = ComplexExpr(Expr(0.0), poly(k));
                    for (int j = i + 1; j < d; ++j) {
                        Expr re = poly(k);
                        Expr im = poly(k);
                        m(i, j) = ComplexExpr(re, im);
                        m(j, i) = ComplexExpr(-re, im);
                    }
                }
                gamma.push_back(std::move(m));
            }
            return MatrixConnection(std::move(gamma));
        };
        for (int k : {1, 2}) {
            std::vector<std::vector<double>> pts;
            for (int i = 0; i < 6; ++i) pts.push_back(gen.point(k, -1.0, 1.0));
            MatrixConnection cin = rand_conn(3, k);
            MatrixConnection cmid = rand_conn(3, k);
            MatrixConnection cout = rand_conn(3, k);
            OperatorField A = rand_field(3, k);
            OperatorField B = rand_field(3, k);
            VectorField X{VarKind::Base, {}};
            VectorField Y{VarKind::Base, {}};
            for (int j = 0; j < k; ++j) {
                X.components.push_back(Expr(0.8) + Expr(0.3) * Expr::base(j));
                Y.components.push_back(Expr(-0.5) +
                                       Expr(0.2) * Expr::base((j + 1) % k));
            }
            Expr f = Expr(0.4) + Expr(0.7) * Expr::base(0);
            for (const CheckReport& r :
                 prop_con_checks(A, cin, cout, X, Y, f, pts, 1e-11)) {
                worst = std::max(worst, r.abs_err);
                ok = ok && r.pass;
            }
            CheckReport lz = leibniz_check(A, B, cin, cmid, cout, X, pts, 1e-11);
            worst = std::max(worst, lz.abs_err);
            ok = ok && lz.pass;
        }
        // Transition identity: solve for the consistent second multiplier.
        ComplexMat tm(2, 2);
        tm(0, 0) = ComplexExpr(cos(Expr::base(0)), sin(Expr::base(0)));
        tm(1, 1) = ComplexExpr(cos(Expr(3.0) * Expr::base(0)),
                               sin(Expr(3.0) * Expr::base(0)));
        OperatorField tau{std::move(tm)};
        OperatorField a_i = rand_field(2, 1);
        VectorField X1 = VectorField::coordinate(VarKind::Base, 1, 0);
        OperatorField a_j =
            (tau * a_i - field_derivative(tau, X1)) * tau.adjoint();
        std::vector<std::vector<double>> pts1;
        for (int i = 0; i < 6; ++i) pts1.push_back(gen.point(1, -1.0, 1.0));
        CheckReport tr = transition_relation_check(tau, a_i, a_j, X1, pts1, 1e-11);
        ok = ok && tr.pass;
        bool flagged = tr.oracle.at(0) > 1e-3;  // informational only
        std::ostringstream d;
        d << "worst calculus residual " << worst << ", corrected transition "
          << tr.abs_err << ", uncorrected variant residual " << tr.oracle.at(0)
          << (flagged ? " (nonzero as expected, flagged)" : " (unexpectedly small)");
        gate.report(7, "operator-field calculus", ok, d.str());
    }

    // 8. Lift/density/divergence identity suite, pointwise on every scenario.
    {
        bool ok = true;
        double worst = 0.0;
        for (const ScenarioReport& r : reports) {
            for (const CheckReport& c : r.checks) {
                bool pointwise =
                    c.name == "lift_agreement" || c.name == "lift_pushforward" ||
                    c.name == "lift_orthogonality" ||
                    c.name == "density_gradient_norm" ||
                    c.name == "density_factorization" ||
                    c.name == "weighted_divergence_identity" ||
                    c.name == "bracket_divergence";
                if (pointwise) {
                    worst = std::max(worst, c.abs_err);
                    if (c.abs_err > 1e-10) ok = false;
                }
                if (c.name == "tangent_divergence_integral" && !c.pass)
                    ok = false;
            }
        }
        std::ostringstream d;
        d << "worst pointwise residual " << worst << " across "
          << reports.size() << " scenarios";
        gate.report(8, "lift and divergence identity suite", ok, d.str());
    }

    // 9. The full single-threaded suite finishes in budget with every check
    //    green.
    {
        bool all_pass = true;
        int checks = 0;
        for (const ScenarioReport& r : reports) {
            checks += static_cast<int>(r.checks.size());
            if (!r.passed()) {
                all_pass = false;
                for (const CheckReport& c : r.checks)
                    if (!c.pass)
                        std::cout << "  failing: " << r.scenario << "/"
                                  << c.name << " abs_err " << c.abs_err
                                  << " tol " << c.tol << "\n";
            }
        }
        std::ostringstream d;
        d << checks << " checks over " << reports.size() << " scenarios in "
          << run_all_s << " s";
        gate.report(9, "full suite runtime and status",
                    all_pass && run_all_s < 60.0, d.str());
    }

    std::cout << (gate.failures == 0 ? "ALL CRITERIA PASSED"
                                     : "SOME CRITERIA FAILED")
              << "\n";
    return gate.failures;
}
