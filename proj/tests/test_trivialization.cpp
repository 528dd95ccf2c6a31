#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rdi/trivialization.hpp"
#include "test_util.hpp"

using namespace rdi;
using rdi::testing::ExprGen;

namespace {

constexpr double kPi = std::numbers::pi;

Expr norm_sq3() {
    return pow(Expr::ambient(0), 2.0) + pow(Expr::ambient(1), 2.0) +
           pow(Expr::ambient(2), 2.0);
}

Submersion sphere3() {
    return Submersion({norm_sq3()}, Metric::euclidean(3),
                      Metric::euclidean(1, VarKind::Base));
}

BundleTrivialization sphere_triv() {
    Expr r = sqrt(Expr::base(0));
    FiberChart chart{3,
                     {r * sin(Expr::param(0)) * cos(Expr::param(1)),
                      r * sin(Expr::param(0)) * sin(Expr::param(1)),
                      r * cos(Expr::param(0))},
                     {ChartAxis::interval(0.0, kPi), ChartAxis::periodic()}};
    return BundleTrivialization{std::move(chart), sin(Expr::param(0))};
}

Section random_section(ExprGen& gen, int rank) {
    Section s;
    for (int a = 0; a < rank; ++a) {
        Expr re(gen.uniform(-1.0, 1.0));
        Expr im(gen.uniform(-1.0, 1.0));
        for (int i = 0; i < 3; ++i) {
            re += Expr(gen.uniform(-0.5, 0.5)) * Expr::ambient(i);
            im += Expr(gen.uniform(-0.5, 0.5)) * Expr::ambient(i);
        }
        s.components.push_back(ComplexExpr(re, im));
    }
    return s;
}

} // namespace

TEST_CASE("fiber density and the transported constant section") {
    Metric g = Metric::euclidean(3);
    Submersion S = sphere3();
    BundleTrivialization triv = sphere_triv();
    Expr w = fiber_density(triv, g, S);
    // Round-fiber density relative to the angular volume: sqrt(lambda)/2.
    for (double l0 : {0.5, 1.0, 2.0}) {
        std::vector<double> lam{l0};
        std::vector<double> t{1.1, 0.7};
        CHECK(eval(w, Point{{}, lam, t}) ==
              doctest::Approx(std::sqrt(l0) / 2.0));
    }
    Section one{{ComplexExpr(Expr(1.0))}};
    std::vector<ComplexExpr> tu = apply_T(triv, g, S, one);
    std::vector<double> lam{1.0};
    std::vector<double> t{0.8, 2.0};
    auto v = eval_complex(tu[0], Point{{}, lam, t});
    CHECK(v.real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(v.imag() == doctest::Approx(0.0));

    std::vector<ComplexExpr> zero =
        apply_T(triv, g, S, Section::zero(1));
    CHECK(eval_complex(zero[0], Point{{}, lam, t}).real() ==
          doctest::Approx(0.0));
}

TEST_CASE("unitarity for random sections across the base") {
    Metric g = Metric::euclidean(3);
    Submersion S = sphere3();
    BundleTrivialization triv = sphere_triv();
    QuadratureRule rule = triv.chart.rule(16);
    ExprGen gen(9001, 3);
    for (int i = 0; i < 10; ++i) {
        Section u = random_section(gen, 1);
        for (double l0 : {0.5, 1.0, 2.0}) {
            std::vector<double> lam{l0};
            CheckReport rep = unitarity_check(triv, g, S, u, rule, lam, 1e-8);
            CHECK(rep.pass);
        }
    }
}

TEST_CASE("transport followed by its inverse is the identity on the chart") {
    Metric g = Metric::euclidean(3);
    Submersion S = sphere3();
    BundleTrivialization triv = sphere_triv();
    ExprGen gen(140, 3);
    Section u = random_section(gen, 2);
    std::vector<ComplexExpr> tu = apply_T(triv, g, S, u);
    std::vector<ComplexExpr> back = apply_T_inverse_on_chart(triv, g, S, tu);
    QuadratureRule rule = triv.chart.rule(8);
    std::vector<double> lam{1.3};
    for (std::size_t n = 0; n < rule.node_count(); n += 7) {
        Point p{{}, lam, rule.node(n)};
        for (int c = 0; c < 2; ++c) {
            auto direct = eval_complex(
                ComplexExpr(
                    triv.chart.pullback(u.components[static_cast<std::size_t>(c)].re),
                    triv.chart.pullback(u.components[static_cast<std::size_t>(c)].im)),
                p);
            auto round = eval_complex(back[static_cast<std::size_t>(c)], p);
            CHECK(std::abs(direct - round) <= 1e-10);
        }
    }
}

TEST_CASE("intertwining of the base derivative with the transport") {
    Metric g = Metric::euclidean(3);
    Submersion S = sphere3();
    BundleTrivialization triv = sphere_triv();
    QuadratureRule rule = triv.chart.rule(10);
    VectorField X = VectorField::coordinate(VarKind::Base, 1, 0);
    std::vector<double> lam{1.0};

    SUBCASE("flat line bundle") {
        HermitianBundle B = HermitianBundle::flat(1, 3);
        ExprGen gen(77, 3);
        Section phi = random_section(gen, 1);
        CheckReport rep =
            intertwine_check(triv, B, g, S, phi, X, rule, lam, 1e-5);
        CHECK(rep.pass);
    }
    SUBCASE("twisted rank-2 bundle") {
        std::vector<ComplexMat> coeffs;
        for (int i = 0; i < 3; ++i) {
            ComplexMat m(2, 2);
            m(0, 0) = ComplexExpr(Expr(0.0), Expr(0.3) * Expr::ambient(i));
            m(0, 1) = ComplexExpr(Expr(0.2) * Expr::ambient((i + 1) % 3),
                                  Expr(0.1));
            m(1, 0) = ComplexExpr(-m(0, 1).re, m(0, 1).im);
            m(1, 1) = ComplexExpr(Expr(0.0), Expr(-0.2) * Expr::ambient(i));
            coeffs.push_back(std::move(m));
        }
        HermitianBundle B(2, std::move(coeffs));
        ExprGen gen(78, 3);
        Section phi = random_section(gen, 2);
        CheckReport rep =
            intertwine_check(triv, B, g, S, phi, X, rule, lam, 1e-5);
        CHECK(rep.pass);
    }
    SUBCASE("zero section is exact") {
        HermitianBundle B = HermitianBundle::flat(1, 3);
        CheckReport rep = intertwine_check(triv, B, g, S, Section::zero(1), X,
                                           rule, lam, 1e-14);
        CHECK(rep.pass);
    }
}

TEST_CASE("horizontal sections have base-independent inner products") {
    Metric g = Metric::euclidean(3);
    Submersion S = sphere3();
    BundleTrivialization triv = sphere_triv();
    QuadratureRule rule = triv.chart.rule(16);
    std::vector<std::vector<double>> grid{{0.5}, {1.0}, {2.0}};

    SUBCASE("constant images: the reference volume mass") {
        std::vector<ComplexExpr> one{ComplexExpr(Expr(1.0))};
        CheckReport rep = horizontal_constancy_check(triv, g, S, one, one, rule,
                                                     grid, 1e-8);
        CHECK(rep.pass);
        CHECK(rep.value[0] == doctest::Approx(4.0 * kPi).epsilon(1e-8));
    }
    SUBCASE("orthogonal images stay orthogonal") {
        std::vector<ComplexExpr> u0{ComplexExpr(cos(Expr::param(0)))};
        std::vector<ComplexExpr> one{ComplexExpr(Expr(1.0))};
        CheckReport rep = horizontal_constancy_check(triv, g, S, u0, one, rule,
                                                     grid, 1e-8);
        CHECK(rep.pass);
        CHECK(std::abs(rep.value[0]) <= 1e-10);
    }
    SUBCASE("zero image") {
        std::vector<ComplexExpr> z{ComplexExpr(Expr(0.0))};
        std::vector<ComplexExpr> one{ComplexExpr(Expr(1.0))};
        CheckReport rep = horizontal_constancy_check(triv, g, S, z, one, rule,
                                                     grid, 1e-12);
        CHECK(rep.pass);
        CHECK(rep.value[0] == doctest::Approx(0.0));
    }
}
