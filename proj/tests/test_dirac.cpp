#include "doctest.h"
#include "singmech/analysis.hpp"
#include "singmech/dirac.hpp"
#include "singmech/errors.hpp"
#include "support.hpp"

using namespace singmech;
using singmech::testing::ExprGenerator;
using singmech::testing::model_fixture;

namespace {

bool same(const Expr& a, const LagrangianModel& m, const std::string& text) {
    return is_zero(a - m.expression(text)).verdict == ZeroVerdict::symbolic_zero;
}

std::vector<std::string> reduced_symbols(const PartialHamiltonianSystem& s) {
    std::vector<std::string> out = s.q;
    out.insert(out.end(), s.p.begin(), s.p.end());
    out.insert(out.end(), s.qn.begin(), s.qn.end());
    return out;
}

const char* const kFixtures[] = {"R", "S1", "S2", "G1", "G2", "gauge_lambda", "schur", "pendulum"};

}  // namespace

TEST_CASE("full Poisson bracket examples") {
    auto S1m = model_fixture("S1");
    auto S1 = analyze(S1m);
    CHECK(poisson_full(S1m.expression("q2"), S1m.expression("p_q2"), S1.system).is_one());
    CHECK(poisson_full(S1m.expression("p_q1"), S1m.expression("p_q2"), S1.system).is_zero());
    CHECK(same(poisson_full(S1m.expression("p_q1 - q2"), S1m.expression("p_q2"), S1.system), S1m, "-1"));
}

TEST_CASE("constraint sets") {
    auto S1m = model_fixture("S1");
    auto cs = build_constraints(analyze(S1m).system);
    REQUIRE(cs.size() == 2);
    CHECK(same(cs.Phi[0], S1m, "p_q1 - q2"));
    CHECK(same(cs.Phi[1], S1m, "p_q2"));
    CHECK(cs.momenta == std::vector<std::string>{"p_q1", "p_q2"});

    auto G1m = model_fixture("G1");
    cs = build_constraints(analyze(G1m).system);
    REQUIRE(cs.size() == 1);
    CHECK(same(cs.Phi[0], G1m, "p_q2"));

    CHECK(build_constraints(analyze(model_fixture("R")).system).size() == 0);

    for (const char* name : kFixtures) {
        auto a = analyze(model_fixture(name));
        cs = build_constraints(a.system);
        CHECK(cs.size() == a.system.n() - a.rank.report.r_W);
        for (const Expr& phi : cs.Phi) {
            for (const auto& v : a.system.model.velocities()) CHECK_FALSE(depends_on(phi, v));
        }
        // H_total on the surface is H0.
        auto th = total_hamiltonian(a.system, cs);
        CHECK(is_zero(on_surface(th.expr, a.system) - a.system.H0).verdict == ZeroVerdict::symbolic_zero);
    }
}

TEST_CASE("correspondence examples") {
    auto S1m = model_fixture("S1");
    auto S1 = analyze(S1m);
    auto rep = verify_correspondence(S1.system, S1.fg, S1.classification);
    CHECK(rep.brackets_pass());
    CHECK(rep.hamiltonian_pass());
    CHECK(rep.solutions_match);
    CHECK(rep.passed());
    CHECK_NOTHROW(rep.require());
    CHECK(same(rep.multipliers.at("q1_dot"), S1m, "q2"));
    CHECK(same(rep.multipliers.at("q2_dot"), S1m, "-q1"));

    auto G1 = analyze(model_fixture("G1"));
    rep = verify_correspondence(G1.system, G1.fg, G1.classification);
    CHECK(rep.passed());
    CHECK(rep.multiplier_system.F[0][0].is_zero());
    CHECK(rep.multiplier_system.G[0].is_zero());
    CHECK(rep.multiplier_classification.verdict == Verdict::gauge);
    CHECK(rep.multiplier_classification.alpha2 == std::vector<std::size_t>{0});

    auto G2m = model_fixture("G2");
    auto G2 = analyze(G2m);
    rep = verify_correspondence(G2.system, G2.fg, G2.classification);
    CHECK(rep.brackets_pass());
    CHECK(rep.hamiltonian_pass());
    CHECK(rep.multiplier_classification.verdict == Verdict::inconsistent);
    CHECK(same(rep.multiplier_system.G[0], G2m, "p_q1"));
    CHECK(rep.solutions_match);
    CHECK(rep.multipliers.empty());
}

TEST_CASE("the literal orientation of the Hamiltonian identity fails on S1") {
    auto S1m = model_fixture("S1");
    auto S1 = analyze(S1m);
    auto cs = build_constraints(S1.system);
    Expr literal = S1.fg.G[0] - poisson_full(cs.Phi[0], S1.system.H0, S1.system);
    CHECK(same(literal, S1m, "2*q1"));
    CHECK_FALSE(is_zero(literal).zero());
}

TEST_CASE("explicit time dependence of H_alpha shows up in the Hamiltonian identity") {
    LagrangianModel td("td", {"q1", "q2"}, "q1_dot*q2*t - 0.5*q1^2");
    auto a = analyze(td);
    auto rep = verify_correspondence(a.system, a.fg, a.classification);
    CHECK(rep.brackets_pass());
    REQUIRE_FALSE(rep.hamiltonian_pass());
    // residual is -dH_q1/dt
    CHECK(same(rep.hamiltonian[0].residual, td, "q2"));
    CHECK_THROWS_AS(rep.require(), CorrespondenceFailure);
}

TEST_CASE("a tampered F is caught with a witness") {
    auto S1 = analyze(model_fixture("S1"));
    FGSystem broken = S1.fg;
    broken.F[0][1] = broken.F[0][1] + Expr::symbol("q1");
    broken.F[1][0] = broken.F[1][0] - Expr::symbol("q1");
    auto rep = verify_correspondence(S1.system, broken, S1.classification);
    CHECK_FALSE(rep.brackets_pass());
    bool found = false;
    for (const auto& c : rep.brackets) {
        if (!c.pass) {
            found = true;
            CHECK(c.witness.count("q1") == 1);
        }
    }
    CHECK(found);
    try {
        rep.require();
        FAIL("expected CorrespondenceFailure");
    } catch (const CorrespondenceFailure& e) {
        CHECK(std::string(e.what()).find("q1=") != std::string::npos);
    }
}

TEST_CASE("property: correspondence identities on every fixture") {
    for (const char* name : kFixtures) {
        INFO(name);
        auto a = analyze(model_fixture(name));
        auto rep = verify_correspondence(a.system, a.fg, a.classification);
        CHECK(rep.brackets_pass());
        CHECK(rep.hamiltonian_pass());
        CHECK(rep.solutions_match);
    }
}

TEST_CASE("Dirac bracket examples") {
    auto S1m = model_fixture("S1");
    auto S1 = analyze(S1m);
    CHECK(same(dirac_bracket(S1m.expression("q1"), S1m.expression("q2"), S1.system), S1m, "1"));
    DiracBracket db(S1.system);
    for (const Expr& phi : db.constraints().Phi) {
        CHECK(db(S1m.expression("q1"), phi).is_zero());
        CHECK(db(S1m.expression("q1*q2 + p_q2"), phi).is_zero());
    }

    CHECK_THROWS_AS(DiracBracket(analyze(model_fixture("G1")).system), SecondClassRequired);
    CHECK_THROWS_AS(DiracBracket(analyze(model_fixture("S2")).system), SecondClassRequired);
    CHECK_THROWS_AS((void)dirac_bracket(Expr(1), Expr(1), analyze(model_fixture("G2")).system), SecondClassRequired);
}

TEST_CASE("property: Dirac bracket equals the reduced bracket") {
    for (const char* name : {"S1", "R", "pendulum"}) {
        auto a = analyze(model_fixture(name));
        DiracBracket db(a.system);
        ExprGenerator gen(reduced_symbols(a.system), 77);
        for (int k = 0; k < 20; ++k) {
            Expr A = gen.quadratic(), B = gen.quadratic();
            INFO(name, ": ", A.str(), " | ", B.str());
            CHECK(is_zero(db(A, B) - bracket(A, B, a.system, a.classification)).zero());
        }
    }
}

TEST_CASE("property: total Hamiltonian evolution matches the reduced bracket on the surface") {
    for (const char* name : {"R", "S1", "S2", "G1", "gauge_lambda", "schur"}) {
        auto a = analyze(model_fixture(name));
        auto rep = verify_correspondence(a.system, a.fg, a.classification);
        ExprGenerator gen(reduced_symbols(a.system), 99);
        for (int k = 0; k < 10; ++k) {
            Expr A = gen.quadratic();
            INFO(name, ": ", A.str());
            Expr reduced = differentiate(A, kTimeName) + bracket(A, a.system.H0, a.system, a.classification);
            CHECK(is_zero(total_evolution(A, a.system, rep.multipliers) - reduced).zero());
        }
    }
}
