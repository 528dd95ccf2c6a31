#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rdi/submersion.hpp"
#include "test_util.hpp"

using namespace rdi;
using rdi::testing::ExprGen;

namespace {

Expr norm_sq(int dim) {
    Expr s(0.0);
    for (int i = 0; i < dim; ++i) s += pow(Expr::ambient(i), 2.0);
    return s;
}

Submersion sphere3() {
    return Submersion({norm_sq(3)}, Metric::euclidean(3),
                      Metric::euclidean(1, VarKind::Base));
}

// Random point away from the origin so the sphere-level-set map keeps rank.
std::vector<double> off_origin(ExprGen& gen, int dim) {
    for (;;) {
        auto p = gen.point(dim);
        double r2 = 0.0;
        for (double x : p) r2 += x * x;
        if (r2 > 0.25) return p;
    }
}

} // namespace

TEST_CASE("lift: closed forms") {
    VectorField d1 = VectorField::coordinate(VarKind::Base, 1, 0);

    SUBCASE("level sets of the squared radius") {
        Submersion S = sphere3();
        VectorField lifted = S.lift(d1);
        std::vector<double> p{1.0, 0.0, 0.0};
        CHECK(eval(lifted.components[0], p) == doctest::Approx(0.5));
        CHECK(eval(lifted.components[1], p) == doctest::Approx(0.0));
        CHECK(eval(lifted.components[2], p) == doctest::Approx(0.0));
    }
    SUBCASE("linear projection") {
        Submersion S({Expr::ambient(0)}, Metric::euclidean(2),
                     Metric::euclidean(1, VarKind::Base));
        VectorField lifted = S.lift(d1);
        ExprGen gen(7, 2);
        for (int i = 0; i < 5; ++i) {
            auto p = gen.point(2);
            CHECK(eval(lifted.components[0], p) == doctest::Approx(1.0));
            CHECK(eval(lifted.components[1], p) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("lift: pushforward reproduces the base field at 100 random points") {
    ExprGen gen(555, 3);
    std::vector<Submersion> subs;
    subs.push_back(sphere3());
    subs.emplace_back(std::vector<Expr>{Expr::ambient(0),
                                        Expr::ambient(1) +
                                            Expr(0.2) * pow(Expr::ambient(2), 3.0)},
                      Metric::euclidean(3), Metric::euclidean(2, VarKind::Base));
    Expr u = Expr(0.1) * (pow(Expr::ambient(0), 2.0) - pow(Expr::ambient(1), 2.0));
    subs.emplace_back(std::vector<Expr>{norm_sq(3)}, Metric::conformal(u, 3),
                      Metric::euclidean(1, VarKind::Base));

    for (const Submersion& S : subs) {
        const int k = S.base_dim();
        VectorField X{VarKind::Base, {}};
        for (int a = 0; a < k; ++a)
            X.components.push_back(Expr(gen.uniform(-1.0, 1.0)) +
                                   Expr(gen.uniform(-1.0, 1.0)) * Expr::base(a));
        VectorField lifted = S.lift(X);
        std::vector<Expr> push = S.pushforward(lifted);
        for (int pt = 0; pt < 34; ++pt) {
            auto p = off_origin(gen, 3);
            Evaluator ev(Point{p, {}, {}});
            for (int a = 0; a < k; ++a) {
                double lhs = ev.eval(push[static_cast<std::size_t>(a)]);
                double rhs = ev.eval(S.compose_with_rho(
                    X.components[static_cast<std::size_t>(a)]));
                CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
            }
        }
    }
}

TEST_CASE("lift is orthogonal to the fiber directions") {
    Submersion S = sphere3();
    VectorField lifted = S.lift(VectorField::coordinate(VarKind::Base, 1, 0));
    // Fiber tangents of the squared radius: rotations.
    std::vector<VectorField> tangents{
        {VarKind::Ambient, {-Expr::ambient(1), Expr::ambient(0), Expr(0.0)}},
        {VarKind::Ambient, {Expr(0.0), -Expr::ambient(2), Expr::ambient(1)}},
        {VarKind::Ambient, {-Expr::ambient(2), Expr(0.0), Expr::ambient(0)}}};
    ExprGen gen(808, 3);
    for (const VectorField& v : tangents) {
        Expr pair = metric_pairing(S.ambient_metric(), lifted, v);
        for (int pt = 0; pt < 10; ++pt) {
            auto p = off_origin(gen, 3);
            CHECK(std::abs(eval(pair, p)) <= 1e-10);
        }
    }
}

TEST_CASE("j_density closed forms") {
    SUBCASE("gradient norm for scalar maps") {
        Submersion S = sphere3();
        std::vector<double> p{1.0, 0.0, 0.0};
        CHECK(eval(S.j_density(), p) == doctest::Approx(2.0));
        // k=1 Euclidean: density equals the gradient norm everywhere sampled.
        Expr grad_norm = sqrt(metric_pairing(
            S.ambient_metric(), gradient(S.components()[0], S.ambient_metric()),
            gradient(S.components()[0], S.ambient_metric())));
        ExprGen gen(13, 3);
        for (int pt = 0; pt < 20; ++pt) {
            auto q = off_origin(gen, 3);
            double a = eval(S.j_density(), q), b = eval(grad_norm, q);
            CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
            CHECK(a > 0.0);
        }
    }
    SUBCASE("linear maps have unit density") {
        Submersion S1({Expr::ambient(0)}, Metric::euclidean(2),
                      Metric::euclidean(1, VarKind::Base));
        CHECK(eval(S1.j_density(), std::vector<double>{0.3, 0.8}) ==
              doctest::Approx(1.0));
        Submersion S2({Expr::ambient(0), Expr::ambient(1)}, Metric::euclidean(3),
                      Metric::euclidean(2, VarKind::Base));
        CHECK(eval(S2.j_density(), std::vector<double>{0.1, -0.5, 2.0}) ==
              doctest::Approx(1.0));
    }
    SUBCASE("conformal metric scales the density") {
        // For rho = x1 on (R^2, e^{2u} delta): |grad rho|_g = e^{-u}.
        Expr u = Expr(0.3) * Expr::ambient(0);
        Submersion S({Expr::ambient(0)}, Metric::conformal(u, 2),
                     Metric::euclidean(1, VarKind::Base));
        std::vector<double> p{0.7, -0.1};
        CHECK(eval(S.j_density(), p) == doctest::Approx(std::exp(-0.3 * 0.7)));
    }
}

TEST_CASE("coordinate-projection lift agrees with the Gram-solve lift") {
    SUBCASE("scalar map") {
        Submersion S = sphere3();
        VectorField a = S.lift_coordinate_projection(0);
        VectorField b = S.lift(VectorField::coordinate(VarKind::Base, 1, 0));
        std::vector<double> p{1.0, 0.0, 0.0};
        CHECK(eval(a.components[0], p) == doctest::Approx(0.5));
        ExprGen gen(21, 3);
        for (int pt = 0; pt < 10; ++pt) {
            auto q = off_origin(gen, 3);
            for (int i = 0; i < 3; ++i)
                CHECK(std::abs(eval(a.components[static_cast<std::size_t>(i)], q) -
                               eval(b.components[static_cast<std::size_t>(i)], q)) <=
                      1e-10);
        }
    }
    SUBCASE("two linear components") {
        Submersion S({Expr::ambient(0), Expr::ambient(1)}, Metric::euclidean(3),
                     Metric::euclidean(2, VarKind::Base));
        VectorField a = S.lift_coordinate_projection(0);
        std::vector<double> p{0.4, 1.0, -0.3};
        CHECK(eval(a.components[0], p) == doctest::Approx(1.0));
        CHECK(eval(a.components[1], p) == doctest::Approx(0.0));
        CHECK(eval(a.components[2], p) == doctest::Approx(0.0));
    }
    SUBCASE("random two-component polynomial maps") {
        ExprGen gen(3111, 3);
        for (int iter = 0; iter < 8; ++iter) {
            // Dominant linear part keeps the Gram matrix well conditioned.
            Expr r1 = Expr::ambient(0);
            Expr r2 = Expr::ambient(1);
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    Expr q = Expr::ambient(i) * Expr::ambient(j);
                    r1 += Expr(gen.uniform(-0.1, 0.1)) * q;
                    r2 += Expr(gen.uniform(-0.1, 0.1)) * q;
                }
            Submersion S({r1, r2}, Metric::euclidean(3),
                         Metric::euclidean(2, VarKind::Base));
            for (int idx = 0; idx < 2; ++idx) {
                VectorField a = S.lift_coordinate_projection(idx);
                VectorField b =
                    S.lift(VectorField::coordinate(VarKind::Base, 2, idx));
                for (int pt = 0; pt < 5; ++pt) {
                    auto p = gen.point(3, -1.0, 1.0);
                    for (int i = 0; i < 3; ++i) {
                        double av = eval(a.components[static_cast<std::size_t>(i)], p);
                        double bv = eval(b.components[static_cast<std::size_t>(i)], p);
                        CHECK(std::abs(av - bv) <= 1e-10 * (1.0 + std::abs(av)));
                    }
                }
            }
        }
    }
}

TEST_CASE("density factorization through one projected component") {
    // For a two-component map, J equals the single-component density of the
    // other component times the length of the projected gradient.
    ExprGen gen(515, 3);
    for (int iter = 0; iter < 6; ++iter) {
        Expr r1 = Expr::ambient(0);
        Expr r2 = Expr::ambient(1);
        for (int i = 0; i < 3; ++i) {
            r1 += Expr(gen.uniform(-0.2, 0.2)) * pow(Expr::ambient(i), 2.0);
            r2 += Expr(gen.uniform(-0.2, 0.2)) * pow(Expr::ambient(i), 2.0);
        }
        Metric g = Metric::euclidean(3);
        Submersion S({r1, r2}, g, Metric::euclidean(2, VarKind::Base));
        Submersion S2({r2}, g, Metric::euclidean(1, VarKind::Base));
        VectorField lift1 = S.lift_coordinate_projection(0);
        // lift1 = pi(grad r1)/|pi(grad r1)|^2, so |pi(grad r1)| = 1/|lift1|.
        Expr lift_norm = sqrt(metric_pairing(g, lift1, lift1));
        for (int pt = 0; pt < 5; ++pt) {
            auto p = gen.point(3, -1.0, 1.0);
            double J = eval(S.j_density(), p);
            double J2 = eval(S2.j_density(), p);
            double proj_len = 1.0 / eval(lift_norm, p);
            CHECK(std::abs(J - J2 * proj_len) <= 1e-10 * (1.0 + std::abs(J)));
        }
    }
}

TEST_CASE("div_nu") {
    Submersion S = sphere3();
    VectorField X = VectorField::coordinate(VarKind::Base, 1, 0);
    VectorField lifted = S.lift(X);
    ExprGen gen(99, 3);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(off_origin(gen, 3));

    SUBCASE("normal lift of the unit base field") {
        Expr d = S.div_nu(lifted, X, pts);
        for (const auto& p : pts) {
            double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            CHECK(eval(d, p) == doctest::Approx(1.0 / (2.0 * r2)));
        }
    }
    SUBCASE("fiber-tangent field reduces to the plain divergence") {
        VectorField rot{VarKind::Ambient,
                        {-Expr::ambient(1), Expr::ambient(0), Expr(0.0)}};
        Expr d = S.div_nu(rot, VectorField::zero(VarKind::Base, 1), pts);
        Expr plain = divergence(rot, S.ambient_metric());
        for (const auto& p : pts)
            CHECK(eval(d, p) == doctest::Approx(eval(plain, p)));
    }
    SUBCASE("zero field") {
        Expr d = S.div_nu(VectorField::zero(VarKind::Ambient, 3),
                          VectorField::zero(VarKind::Base, 1), pts);
        for (const auto& p : pts) CHECK(eval(d, p) == doctest::Approx(0.0));
    }
    SUBCASE("non-projectable pushforward is rejected") {
        VectorField bad{VarKind::Ambient, {Expr(1.0), Expr(0.0), Expr(0.0)}};
        CHECK_THROWS_AS(S.div_nu(bad, VectorField::zero(VarKind::Base, 1), pts),
                        EvalError);
    }
}

TEST_CASE("rank diagnostics") {
    Submersion S = sphere3();
    CHECK(S.gram_min_eigenvalue(std::vector<double>{1.0, 0.0, 0.0}) > 1e-8);
    // The squared radius loses rank at the origin.
    CHECK(S.gram_min_eigenvalue(std::vector<double>{0.0, 0.0, 0.0}) < 1e-8);

    Submersion S2({Expr::ambient(0), Expr::ambient(1)}, Metric::euclidean(3),
                  Metric::euclidean(2, VarKind::Base));
    CHECK(S2.gram_min_eigenvalue(std::vector<double>{0.0, 0.0, 0.0}) ==
          doctest::Approx(1.0));

    CHECK_THROWS_AS(Submersion({Expr::ambient(0), Expr::ambient(1)},
                               Metric::euclidean(2),
                               Metric::euclidean(2, VarKind::Base)),
                    DimensionError);
}
