#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "crlab/expr.hpp"

using namespace crlab;
using grid::GridSpec;

namespace {

// Random well-formed expression over x, y, t.
std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 2);
    switch (pick(rng)) {
    case 0: return std::to_string(std::uniform_int_distribution<int>(0, 9)(rng));
    case 1: return std::vector<std::string>{"x", "y", "t"}[std::uniform_int_distribution<int>(0, 2)(rng)];
    case 2: return "pi";
    case 3: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
    case 4: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 5: return "-" + random_expr(rng, depth - 1);
    case 6: return "sin(" + random_expr(rng, depth - 1) + ")";
    default: return "cos(" + random_expr(rng, depth - 1) + ")^2";
    }
}

} // namespace

TEST_CASE("examples") {
    const GridSpec g3 = GridSpec::uniform(3, 8);
    CHECK(expr::eval(expr::parse("0"), g3).max_abs() == 0.0);
    const GridSpec line = GridSpec::uniform(1, 8);
    const auto s = expr::eval(expr::parse("sin(2*pi*x)"), line);
    CHECK(std::abs(s[0].real()) < 1e-15);
    CHECK(s[1].real() == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(s[2].real() == doctest::Approx(1.0));
    CHECK_THROWS_AS(expr::eval(expr::parse("x/0"), g3), DivisionByZero);
    CHECK_THROWS_AS(expr::eval(expr::parse("0^-1"), g3), DivisionByZero);
}

TEST_CASE("precedence and unary minus") {
    const std::vector<double> p{0.5, 2.0, 3.0};
    CHECK(expr::eval_at(expr::parse("1+2*3"), p) == 7.0);
    CHECK(expr::eval_at(expr::parse("-2^2"), p) == -4.0);
    CHECK(expr::eval_at(expr::parse("(1+2)*3"), p) == 9.0);
    CHECK(expr::eval_at(expr::parse("y/2/2"), p) == 0.5);
    CHECK(expr::eval_at(expr::parse("exp(0) + x*t"), p) == 2.5);
    CHECK(expr::eval_at(expr::parse("x - y - t"), p) == -4.5);
}

TEST_CASE("variables depend on the grid rank") {
    CHECK_THROWS_AS(expr::eval(expr::parse("t"), GridSpec::uniform(2, 8)), UnknownVariable);
    CHECK_THROWS_AS(expr::eval(expr::parse("z"), GridSpec::uniform(3, 8)), UnknownVariable);
    CHECK_NOTHROW(expr::eval(expr::parse("x1 + y2 + t"), GridSpec::uniform(5, 8)));
    CHECK_NOTHROW(expr::eval(expr::parse("x1 + y1"), GridSpec::uniform(3, 8)));
    CHECK(expr::variables(expr::parse("sin(x) + y*x")) == std::set<std::string>{"x", "y"});
}

TEST_CASE("parse errors report offset and expectations") {
    try {
        expr::parse("1 + * 2");
        FAIL("no error");
    } catch (const expr::ParseError& e) {
        CHECK(e.offset() == 4);
        CHECK(!e.expected().empty());
    }
    CHECK_THROWS_AS(expr::parse("sin(x"), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("x^1.5"), expr::ParseError);
    CHECK_THROWS_AS(expr::parse(""), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("tan(x)"), expr::ParseError);
}

TEST_CASE("print then parse is the identity on the tree") {
    std::mt19937_64 rng(42);
    for (int k = 0; k < 200; ++k) {
        const auto a = expr::parse(random_expr(rng, 4));
        const auto b = expr::parse(expr::print(a));
        CHECK(*a == *b);
        CHECK(expr::print(b) == expr::print(a));
    }
}

TEST_CASE("evaluation is additive") {
    std::mt19937_64 rng(43);
    const GridSpec g = GridSpec::uniform(3, 8);
    for (int k = 0; k < 50; ++k) {
        const std::string a = random_expr(rng, 3), b = random_expr(rng, 3);
        const auto sum = expr::eval(expr::parse("(" + a + ")+(" + b + ")"), g);
        const auto parts = expr::eval(expr::parse(a), g) + expr::eval(expr::parse(b), g);
        CHECK((sum - parts).max_abs() <= 1e-12 * (1 + parts.max_abs()));
    }
}
