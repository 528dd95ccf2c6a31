#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rdi/expr.hpp"
#include "test_util.hpp"

using namespace rdi;
using rdi::testing::ExprGen;
using rdi::testing::central_fd;

TEST_CASE("parse: arithmetic reading") {
    std::vector<double> p{3.0, 4.0};
    CHECK(eval(parse("x1^2 + x2^2"), p) == doctest::Approx(25.0));
    CHECK(eval(parse("sin(x1)"), std::vector<double>{0.0}) == doctest::Approx(0.0));
    std::vector<double> amb{5.0};
    std::vector<double> base{2.0};
    CHECK(eval(parse("l1 * x1"), amb, base) == doctest::Approx(10.0));
    CHECK(eval(parse("2*3 - 4/2"), std::vector<double>{}) == doctest::Approx(4.0));
    CHECK(eval(parse("-x1^2"), std::vector<double>{3.0}) == doctest::Approx(9.0));
    CHECK(eval(parse("1.5e2"), std::vector<double>{}) == doctest::Approx(150.0));
}

TEST_CASE("parse: errors carry offsets") {
    CHECK_THROWS_AS(parse("x1 +"), ParseError);
    try {
        parse("x1 +");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(parse("foo(x1)"), ParseError);
    CHECK_THROWS_AS(parse("sin x1"), ParseError);
    CHECK_THROWS_AS(parse("x1 x2"), ParseError);
    CHECK_THROWS_AS(parse("x"), ParseError);
}

TEST_CASE("print/parse round trip is evaluation-equivalent") {
    ExprGen gen(12345, 3, 2);
    for (int iter = 0; iter < 50; ++iter) {
        Expr e = gen.gen(4);
        Expr back = parse(e.str());
        for (int pt = 0; pt < 5; ++pt) {
            auto amb = gen.point(3);
            auto base = gen.point(2);
            double a = eval(e, amb, base);
            double b = eval(back, amb, base);
            CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("diff: exact cases") {
    Expr x1 = Expr::ambient(0), x2 = Expr::ambient(1);
    SUBCASE("product rule") {
        Expr d = diff(x1 * x2, VarKind::Ambient, 0);
        std::vector<double> p{7.0, 11.0};
        CHECK(eval(d, p) == doctest::Approx(11.0));
    }
    SUBCASE("cos(0)") {
        Expr d = diff(sin(x1), VarKind::Ambient, 0);
        CHECK(eval(d, std::vector<double>{0.0}) == doctest::Approx(1.0));
    }
    SUBCASE("independent variable") {
        Expr d = diff(pow(x2, 3.0), VarKind::Ambient, 0);
        CHECK(d.is_zero());
    }
    SUBCASE("derivative of constant is the zero node") {
        CHECK(diff(Expr(42.0), VarKind::Ambient, 0).is_zero());
    }
}

TEST_CASE("eval: domain behaviour") {
    CHECK(eval(sqrt(Expr::ambient(0)), std::vector<double>{4.0}) ==
          doctest::Approx(2.0));
    CHECK(eval(exp(Expr(0.0) * Expr::ambient(0)), std::vector<double>{123.0}) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(eval(log(Expr::ambient(0)), std::vector<double>{-1.0}),
                    EvalError);
    CHECK_THROWS_AS(eval(sqrt(Expr::ambient(0)), std::vector<double>{-1.0}),
                    EvalError);
    CHECK_THROWS_AS(
        eval(Expr(1.0) / Expr::ambient(0), std::vector<double>{0.0}), EvalError);
}

TEST_CASE("property: diff matches central finite differences") {
    ExprGen gen(777, 3, 2);
    int checked = 0;
    for (int iter = 0; iter < 80; ++iter) {
        Expr e = gen.gen(gen.pick_int(1, 6));
        for (int pt = 0; pt < 3; ++pt) {
            auto amb = gen.point(3, -1.5, 1.5);
            auto base = gen.point(2, -1.5, 1.5);
            for (int v = 0; v < 3; ++v) {
                Expr d = diff(e, VarKind::Ambient, v);
                double sym = eval(d, amb, base);
                if (std::abs(sym) > 1e6) continue;  // steep region, FD unusable
                double fd = central_fd(e, VarKind::Ambient, v, amb, base);
                CHECK(std::abs(sym - fd) <= 1e-6 * (1.0 + std::abs(sym)));
                ++checked;
            }
        }
    }
    CHECK(checked > 200);
}

TEST_CASE("property: mixed partials commute") {
    ExprGen gen(424242, 2, 2);
    for (int iter = 0; iter < 40; ++iter) {
        Expr e = gen.gen(4);
        Expr d12 = diff(diff(e, VarKind::Ambient, 0), VarKind::Ambient, 1);
        Expr d21 = diff(diff(e, VarKind::Ambient, 1), VarKind::Ambient, 0);
        for (int pt = 0; pt < 4; ++pt) {
            auto amb = gen.point(2);
            auto base = gen.point(2);
            double a = eval(d12, amb, base);
            double b = eval(d21, amb, base);
            CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("property: simplify preserves evaluation") {
    ExprGen gen(5150, 3, 1);
    for (int iter = 0; iter < 60; ++iter) {
        Expr e = gen.gen(5);
        Expr s = simplify(e);
        for (int pt = 0; pt < 4; ++pt) {
            auto amb = gen.point(3);
            auto base = gen.point(1);
            double a = eval(e, amb, base);
            double b = eval(s, amb, base);
            CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("substitute composes expressions") {
    Expr e = parse("l1^2 + x1");
    Substitution s;
    s.base = {parse("x1*x2")};
    Expr composed = substitute(e, s);
    std::vector<double> p{2.0, 3.0};
    CHECK(eval(composed, p) == doctest::Approx(38.0));
}
