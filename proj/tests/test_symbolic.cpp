#include <cmath>
#include <fstream>

#include "doctest.h"
#include "singmech/errors.hpp"
#include "singmech/evaluate.hpp"
#include "singmech/expr.hpp"
#include "singmech/parse.hpp"
#include "singmech/zero_test.hpp"
#include "support.hpp"

using namespace singmech;
using singmech::testing::central_difference;
using singmech::testing::ExprGenerator;

namespace {

SymbolTable two_coordinates() {
    SymbolTable ctx;
    ctx.add_coordinate("q1");
    ctx.add_coordinate("q2");
    ctx.add_coordinate("q3");
    ctx.add({"t", SymbolKind::time});
    ctx.add({"p1", SymbolKind::parameter});
    return ctx;
}

Expr P(const char* text) { return simplify(parse(text, two_coordinates())); }

int count_symbol_leaves(const Expr& e) {
    if (e.is_symbol()) return 1;
    int n = 0;
    for (const Expr& c : e.children()) n += count_symbol_leaves(c);
    return n;
}

}  // namespace

TEST_CASE("Number keeps decimal literals exact") {
    CHECK(Number::from_literal("0.5")->to_string() == "1/2");
    CHECK(Number::from_literal("0.37")->to_string() == "37/100");
    CHECK(Number::from_literal("1e-6")->to_string() == "1/1000000");
    CHECK(Number::from_literal("12")->to_string() == "12");
    CHECK_FALSE(Number::from_literal("1.2.3").has_value());
    CHECK(Number::from_double(0.1) == Number::rational(1, 10));
    CHECK(Number::from_double(1.5) == Number::rational(3, 2));
    CHECK_FALSE(Number::from_double(M_PI).is_exact());
    // overflow falls back to a double
    Number big = Number(std::int64_t{1} << 62) * Number(8);
    CHECK_FALSE(big.is_exact());
    CHECK(big.to_double() == doctest::Approx(std::ldexp(1.0, 65)));
}

TEST_CASE("parse: grammar and precedence") {
    auto ctx = two_coordinates();
    Expr e = parse("q1_dot*q2 - 0.5*(q1^2 + q2^2)", ctx);
    CHECK(e.kind() == NodeKind::add);
    CHECK(count_symbol_leaves(e) == 4);

    Binding b{{"q1", 0.3}, {"q2", -1.2}, {"q3", 2.0}};
    CHECK(evaluate(parse("-q1^2", ctx), b) == doctest::Approx(-0.09));
    CHECK(evaluate(parse("2^3^2", ctx), b) == doctest::Approx(512.0));
    CHECK(evaluate(parse("q2^-2*q3", ctx), b) == doctest::Approx(2.0 / 1.44));
    CHECK(evaluate(parse("q3/q2*q1", ctx), b) == doctest::Approx(2.0 / -1.2 * 0.3));
    CHECK(evaluate(parse("q3 - q2 - q1", ctx), b) == doctest::Approx(2.0 + 1.2 - 0.3));
    CHECK(evaluate(parse("-q3*-q2", ctx), b) == doctest::Approx(-2.4));
}

TEST_CASE("parse: errors carry positions and names") {
    auto ctx = two_coordinates();
    try {
        (void)parse("q1 +", ctx);
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position() == 5);
    }
    CHECK_THROWS_AS((void)parse("q1^(1/2)", ctx), SyntaxError);
    CHECK_THROWS_AS((void)parse("(q1 + q2", ctx), SyntaxError);
    CHECK_THROWS_AS((void)parse("q1 $ q2", ctx), SyntaxError);
    CHECK_THROWS_AS((void)parse("tan(q1)", ctx), SyntaxError);
    try {
        (void)parse("q1 + q9", ctx);
        FAIL("expected UnknownSymbol");
    } catch (const UnknownSymbol& e) {
        CHECK(e.name() == "q9");
    }
}

TEST_CASE("parse: trig identity evaluates to one") {
    Expr e = parse("sin(q1)^2 + cos(q1)^2", two_coordinates());
    // Oracle: evaluate both terms with <cmath> and sum.
    const double x = 0.37;
    const double expected = std::sin(x) * std::sin(x) + std::cos(x) * std::cos(x);
    CHECK(std::fabs(evaluate(e, {{"q1", x}}) - expected) < 1e-12);
    CHECK(std::fabs(evaluate(e, {{"q1", x}}) - 1.0) < 1e-12);
}

TEST_CASE("differentiate: rules") {
    CHECK(differentiate(P("q1^2"), "q1").str() == "2*q1");
    CHECK(differentiate(P("q1*q2"), "q2").str() == "q1");
    CHECK(differentiate(P("7"), "q1").is_zero());
    CHECK(differentiate(P("q2"), "q1").is_zero());

    Expr e = P("sin(q1)*exp(q2)");
    Binding at{{"q1", 0.3}, {"q2", -0.7}};
    double exact = evaluate(differentiate(e, "q1"), at);
    double fd = central_difference(e, "q1", at);
    CHECK(std::fabs(exact - fd) / std::fabs(fd) < 1e-6);
    // also against the closed form cos(q1)exp(q2)
    CHECK(exact == doctest::Approx(std::cos(0.3) * std::exp(-0.7)).epsilon(1e-14));
}

TEST_CASE("substitute: simultaneous replacement") {
    auto ctx = two_coordinates();
    Expr e = substitute(P("p1*q1_dot"), {{"q1_dot", P("p1 + q2")}});
    CHECK(structurally_equal(e, P("p1^2 + p1*q2")));
    CHECK(substitute(P("q1"), {}).str() == "q1");
    CHECK(substitute(P("q1_dot^2"), {{"q1_dot", Expr(2)}}).str() == "4");
    // simultaneous: swap
    Expr swapped = substitute(P("q1 - 2*q2"), {{"q1", P("q2")}, {"q2", P("q1")}});
    CHECK(structurally_equal(swapped, P("q2 - 2*q1")));
}

TEST_CASE("evaluate: values and errors") {
    CHECK(evaluate(P("q1^2+q2"), {{"q1", 2.0}, {"q2", 1.0}}) == 5.0);
    CHECK_THROWS_AS((void)evaluate(parse("1/q1", two_coordinates()), {{"q1", 0.0}}), DomainError);
    CHECK_THROWS_AS((void)evaluate(P("1/q1"), {{"q1", 0.0}}), DomainError);
    CHECK_THROWS_AS((void)evaluate(P("log(q1)"), {{"q1", -1.0}}), DomainError);
    CHECK_THROWS_AS((void)evaluate(P("q1 + q2"), {{"q1", 1.0}}), UnboundSymbol);
    CHECK(std::fabs(evaluate(P("exp(log(q1))"), {{"q1", 3.5}}) - 3.5) < 1e-12);
    CHECK_THROWS_AS((void)evaluate(P("1/0"), {}), DomainError);
}

TEST_CASE("is_zero verdicts") {
    auto trig = is_zero(P("sin(q1)^2+cos(q1)^2-1"));
    CHECK(trig.verdict == ZeroVerdict::numeric_zero);
    CHECK(trig.max_abs < 1e-10);
    CHECK(is_zero(P("q1-q1")).verdict == ZeroVerdict::symbolic_zero);
    auto nz = is_zero(P("q1*q2"));
    REQUIRE(nz.verdict == ZeroVerdict::nonzero);
    CHECK(nz.witness.at("q1") == 1.0);
    CHECK(nz.witness.at("q2") == 1.0);
    CHECK(is_zero(P("(q1+q2)^2 - q1^2 - 2*q1*q2 - q2^2")).verdict == ZeroVerdict::symbolic_zero);
}

TEST_CASE("simplifier normal form") {
    CHECK(P("q1*q2 - q2*q1").is_zero());
    CHECK(P("0*q1 + 1*q2").str() == "q2");
    CHECK(P("q1*q1*q1").str() == "q1^3");
    CHECK(P("q1/q1").str() == "1");
    CHECK(structurally_equal(P("(q1*q2)^2/q2"), P("q1^2*q2")));
    CHECK(structurally_equal(P("q1_dot*q2 - 0.5*(q1^2 + q2^2)"), P("-(1/2)*q2^2 + q2*q1_dot - q1^2/2")));
    CHECK(P("sin(0) + cos(0) + exp(0) + log(1)").str() == "2");
}

TEST_CASE("property: derivative matches central difference") {
    ExprGenerator gen({"q1", "q2", "q3"}, 7);
    Sampler sampler({.seed = 11});
    for (int k = 0; k < 60; ++k) {
        Expr e = gen(3);
        auto syms = free_symbols(e);
        for (const auto& s : syms) {
            Expr d = differentiate(e, s);
            for (int i = 0; i < 100; ++i) {
                Binding b = sampler.draw({"q1", "q2", "q3"});
                double exact = evaluate(d, b);
                double fd = central_difference(e, s, b);
                INFO(e.str(), " d/d", s);
                REQUIRE(std::fabs(exact - fd) / (1.0 + std::fabs(fd)) < 1e-6);
            }
        }
    }
}

TEST_CASE("property: mixed partials commute") {
    ExprGenerator gen({"q1", "q2"}, 19);
    for (int k = 0; k < 40; ++k) {
        Expr e = gen(3);
        Expr a = differentiate(differentiate(e, "q1"), "q2");
        Expr b = differentiate(differentiate(e, "q2"), "q1");
        INFO(e.str());
        CHECK(is_zero(a - b, {}, 1e-8).zero());
    }
}

TEST_CASE("property: substitution commutes with evaluation") {
    ExprGenerator gen({"q1", "q2"}, 23);
    Sampler sampler({.seed = 5});
    for (int k = 0; k < 40; ++k) {
        Expr e = gen(3);
        std::map<std::string, Expr> m{{"q1", gen(2)}, {"q2", gen(1)}};
        Expr s = substitute(e, m);
        for (int i = 0; i < 20; ++i) {
            Binding b = sampler.draw({"q1", "q2"});
            Binding extended{{"q1", evaluate(m.at("q1"), b)}, {"q2", evaluate(m.at("q2"), b)}};
            double lhs = evaluate(s, b);
            double rhs = evaluate(e, extended);
            INFO(e.str());
            REQUIRE(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(rhs)));
        }
    }
}

TEST_CASE("property: simplify preserves value, is idempotent, and renders parseably") {
    ExprGenerator gen({"q1", "q2", "q3"}, 31);
    Sampler sampler({.seed = 3});
    auto ctx = two_coordinates();
    for (int k = 0; k < 80; ++k) {
        Expr raw = gen(4);
        Expr s = simplify(raw);
        INFO(raw.str(), "  ->  ", s.str());
        REQUIRE(structurally_equal(simplify(s), s));
        Expr reparsed = simplify(parse(s.str(), ctx));
        REQUIRE(structurally_equal(reparsed, s));
        for (int i = 0; i < 20; ++i) {
            Binding b = sampler.draw({"q1", "q2", "q3"});
            double x = evaluate(raw, b);
            double y = evaluate(s, b);
            REQUIRE(std::fabs(x - y) <= 1e-12 * (1.0 + std::fabs(x)));
        }
    }
}

TEST_CASE("compiled evaluation agrees with the tree walker") {
    ExprGenerator gen({"q1", "q2"}, 41);
    Sampler sampler({.seed = 8});
    for (int k = 0; k < 30; ++k) {
        Expr e = gen(4);
        CompiledExpr c(e, {"q1", "q2"});
        for (int i = 0; i < 10; ++i) {
            Binding b = sampler.draw({"q1", "q2"});
            std::vector<double> v{b.at("q1"), b.at("q2")};
            CHECK(c(v) == doctest::Approx(evaluate(e, b)).epsilon(1e-14));
        }
    }
}

TEST_CASE("property: the expression corpus renders and reparses") {
    SymbolTable ctx = two_coordinates();
    std::ifstream in(singmech::testing::fixture("expressions/corpus.txt"));
    REQUIRE(in);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        INFO(line);
        ++count;
        Expr e = simplify(parse(line, ctx));
        Expr back = simplify(parse(e.str(), ctx));
        CHECK(is_zero(e - back).zero());
    }
    CHECK(count >= 50);
}
