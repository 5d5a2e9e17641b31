#include <cmath>

#include "doctest.h"
#include "singmech/analysis.hpp"
#include "singmech/errors.hpp"
#include "singmech/lagrangian.hpp"
#include "singmech/model_file.hpp"
#include "singmech/partial_hamiltonian.hpp"
#include "support.hpp"

using namespace singmech;
using singmech::testing::ExprGenerator;
using singmech::testing::model_fixture;

namespace {

bool same(const Expr& a, const LagrangianModel& m, const std::string& text) {
    return is_zero(a - m.expression(text)).verdict == ZeroVerdict::symbolic_zero;
}

std::vector<std::string> names(const LagrangianModel& m, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (std::size_t i : idx) out.push_back(m.coordinates()[i]);
    return out;
}

using Names = std::vector<std::string>;

}  // namespace

TEST_CASE("model construction validates names and symbols") {
    CHECK_THROWS_AS(LagrangianModel("x", {"q1", "q1"}, "q1_dot^2"), ValidationError);
    CHECK_THROWS_AS(LagrangianModel("x", {}, "1"), ValidationError);
    CHECK_THROWS_AS(LagrangianModel("x", {"sin"}, "1"), ValidationError);
    CHECK_THROWS_AS(LagrangianModel("x", {"q1", "q1_dot"}, "1"), ValidationError);
    try {
        LagrangianModel("x", {"q1", "q2"}, "q3_dot*q1");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("q3_dot") != std::string::npos);
    }
    CHECK_THROWS_AS(LagrangianModel("x", {"q1"}, "p_q1*q1_dot"), ValidationError);
    CHECK_THROWS_AS(LagrangianModel("x", {"q1"}, "q1_dot +"), SyntaxError);

    LagrangianModel pend = model_fixture("pendulum");
    CHECK(pend.n() == 1);
    // m l^2 = 1.5 * 0.64 = 0.96, folded exactly
    CHECK(same(hessian(pend)[0][0], pend, "0.96"));
}

TEST_CASE("hessian examples") {
    auto R = model_fixture("R");
    auto W = hessian(R);
    CHECK(W[0][0].is_one());
    CHECK(W[1][1].is_one());
    CHECK(W[0][1].is_zero());

    auto S1 = model_fixture("S1");
    for (const auto& row : hessian(S1)) {
        for (const auto& x : row) CHECK(x.is_zero());
    }

    auto G2 = model_fixture("G2");
    W = hessian(G2);
    CHECK(W[0][0].is_one());
    CHECK(W[0][1].is_zero());
    CHECK(W[1][0].is_zero());
    CHECK(W[1][1].is_zero());

    CHECK_THROWS_AS((void)hessian(LagrangianModel("quartic", {"q1"}, "q1_dot^4")), UnsupportedLagrangian);
    CHECK_THROWS_AS((void)hessian(LagrangianModel("trig", {"q1"}, "cos(q1_dot)")), UnsupportedLagrangian);
}

TEST_CASE("rank and partition examples") {
    auto r = rank_and_partition(model_fixture("R"));
    CHECK(r.report.r_W == 2);
    CHECK(names(model_fixture("R"), r.partition.canonical) == Names{"q1", "q2"});
    CHECK(r.partition.noncanonical.empty());
    CHECK(r.report.samples_used == 16);
    CHECK(r.report.seed == kDefaultSeed);

    r = rank_and_partition(model_fixture("S1"));
    CHECK(r.report.r_W == 0);
    CHECK(r.partition.canonical.empty());
    CHECK(r.partition.noncanonical == std::vector<std::size_t>{0, 1});

    auto G2 = model_fixture("G2");
    r = rank_and_partition(G2);
    CHECK(r.report.r_W == 1);
    CHECK(names(G2, r.partition.canonical) == Names{"q1"});
    CHECK(names(G2, r.partition.noncanonical) == Names{"q2"});

    // Canonical set follows the pivot, not the declaration order.
    LagrangianModel late("late", {"a", "b"}, "0.5*b_dot^2 + a*b");
    r = rank_and_partition(late);
    CHECK(names(late, r.partition.canonical) == Names{"b"});
    CHECK(r.report.permutation == std::vector<std::size_t>{1, 0});
}

TEST_CASE("rank that changes across samples is rejected") {
    // The second pivot crosses the relative threshold inside the sample box.
    LagrangianModel m("drop", {"q1", "q2"}, "0.5*q1_dot^2 + 0.5*0.000000001*q1^2*q2_dot^2");
    CHECK_THROWS_AS((void)rank_and_partition(m), NonConstantRank);
}

TEST_CASE("make_partition override") {
    auto p = make_partition(3, {2, 0});
    CHECK(p.canonical == std::vector<std::size_t>{0, 2});
    CHECK(p.noncanonical == std::vector<std::size_t>{1});
    CHECK_THROWS_AS((void)make_partition(2, {0, 0}), ValidationError);
    CHECK_THROWS_AS((void)make_partition(2, {2}), ValidationError);
}

TEST_CASE("momenta and canonical velocities") {
    auto R = model_fixture("R");
    auto sys = build_partial_hamiltonian(R, rank_and_partition(R).partition);
    CHECK(same(sys.momenta_defs[0], R, "q1_dot"));
    CHECK(same(sys.momenta_defs[1], R, "q2_dot"));
    CHECK(same(sys.solved_velocities[0], R, "p_q1"));
    CHECK(same(sys.solved_velocities[1], R, "p_q2"));

    auto G2 = model_fixture("G2");
    sys = build_partial_hamiltonian(G2, rank_and_partition(G2).partition);
    REQUIRE(sys.momenta_defs.size() == 1);
    CHECK(same(sys.momenta_defs[0], G2, "q1_dot - q2"));
    CHECK(same(sys.solved_velocities[0], G2, "p_q1 + q2"));

    auto S1 = model_fixture("S1");
    CHECK(momenta(S1, rank_and_partition(S1).partition).empty());

    LagrangianModel quartic("quartic", {"q1"}, "q1_dot^4");
    CHECK_THROWS_AS((void)build_partial_hamiltonian(quartic, make_partition(1, {0})), UnsupportedLagrangian);
}

TEST_CASE("H0 and H_alpha examples") {
    auto R = model_fixture("R");
    auto sys = build_partial_hamiltonian(R, rank_and_partition(R).partition);
    CHECK(same(sys.H0, R, "0.5*(p_q1^2 + p_q2^2) + 0.5*(q1^2 + q2^2)"));
    CHECK(sys.H_alpha.empty());
    CHECK_FALSE(sys.time_dependent);

    auto S1 = model_fixture("S1");
    sys = build_partial_hamiltonian(S1, rank_and_partition(S1).partition);
    CHECK(same(sys.H0, S1, "0.5*(q1^2 + q2^2)"));
    REQUIRE(sys.H_alpha.size() == 2);
    CHECK(same(sys.H_alpha[0], S1, "-q2"));
    CHECK(sys.H_alpha[1].is_zero());
    CHECK(sys.block_degenerate);

    auto G2 = model_fixture("G2");
    sys = build_partial_hamiltonian(G2, rank_and_partition(G2).partition);
    CHECK(same(sys.H0, G2, "0.5*p_q1^2 + p_q1*q2"));

    auto G1 = model_fixture("G1");
    sys = build_partial_hamiltonian(G1, rank_and_partition(G1).partition);
    REQUIRE(sys.H_alpha.size() == 1);
    CHECK(sys.H_alpha[0].is_zero());

    auto schur = model_fixture("schur");
    sys = build_partial_hamiltonian(schur, rank_and_partition(schur).partition);
    REQUIRE(sys.H_alpha.size() == 1);
    CHECK(same(sys.H_alpha[0], schur, "-p_q1"));
    CHECK_FALSE(sys.block_degenerate);
    CHECK(same(sys.solved_velocities[0], schur, "p_q1 - q2_dot"));

    LagrangianModel driven("driven", {"q1"}, "0.5*q1_dot^2 + q1*sin(t)");
    CHECK(build_partial_hamiltonian(driven, make_partition(1, {0})).time_dependent);
}

TEST_CASE("forcing n_p below r_W violates the nondynamical condition") {
    auto R = model_fixture("R");
    try {
        (void)build_partial_hamiltonian(R, make_partition(2, {0}));
        FAIL("expected NondynamicalViolation");
    } catch (const NondynamicalViolation& e) {
        CHECK(e.offending() == "dH0/dq2_dot");
    }
}

namespace {

// Random Lagrangian 1/2 v^T K^T K v + b(q).v - V(q) with an integer r x n
// matrix K, so the Hessian K^T K has rank <= r and is constant.
LagrangianModel random_lagrangian(std::uint64_t seed, std::size_t n, std::size_t r) {
    ExprGenerator gen({"q1", "q2", "q3", "q4"}, seed);
    std::vector<std::string> coords;
    for (std::size_t a = 0; a < n; ++a) coords.push_back("q" + std::to_string(a + 1));
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < r; ++k) {
        std::vector<Expr> row;
        for (std::size_t a = 0; a < n; ++a) {
            auto c = static_cast<std::int64_t>(gen.pick(5)) - 2;
            row.push_back(Expr(c) * Expr::symbol(velocity_name(coords[a])));
        }
        terms.push_back(Expr(Number::rational(1, 2)) * Expr::pow(Expr::add(row), 2));
    }
    // Linear terms only on q1, q2 keep H_alpha polynomial.
    for (std::size_t a = 0; a < n; ++a) {
        Expr coeff = Expr(static_cast<std::int64_t>(gen.pick(3)) - 1) * Expr::symbol(coords[gen.pick(n)]);
        terms.push_back(coeff * Expr::symbol(velocity_name(coords[a])));
    }
    for (std::size_t a = 0; a < n; ++a) terms.push_back(-Expr(Number::rational(1, 2)) * Expr::pow(Expr::symbol(coords[a]), 2));
    return LagrangianModel("random", coords, simplify(Expr::add(terms)).str());
}

}  // namespace

TEST_CASE("property: Hessian symmetry, rank minors, and nondynamical Hamiltonians") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const std::size_t n = 2 + seed % 3;
        const std::size_t r = 1 + seed % n;
        LagrangianModel m = random_lagrangian(seed, n, std::min(r, n - 1));
        INFO("L = ", m.lagrangian().str());
        RankConfig cfg;
        auto ra = rank_and_partition(m, cfg);
        const auto& W = ra.report.W;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) CHECK(is_zero(W[a][b] - W[b][a]).zero());
        }
        // Leading minor nonsingular; every bordered minor singular.
        Matrix Wv = evaluate(W, {});
        const auto& C = ra.partition.canonical;
        const double cut = cfg.threshold * Wv.max_abs();
        CHECK(full_pivot_rank(Wv.submatrix(C, C), 0.0).rank == C.size());
        for (std::size_t extra : ra.partition.noncanonical) {
            auto B = C;
            B.push_back(extra);
            Matrix bordered = Wv.submatrix(B, B);
            CHECK(full_pivot_rank(bordered, cut / std::max(bordered.max_abs(), 1e-300)).rank <= C.size());
        }

        PartialHamiltonianSystem sys = build_partial_hamiltonian(m, ra.partition);
        // Momenta round trip.
        std::map<std::string, Expr> solved;
        for (std::size_t i = 0; i < sys.r(); ++i) solved.emplace(sys.v[i], sys.solved_velocities[i]);
        for (std::size_t i = 0; i < sys.r(); ++i) {
            CHECK(is_zero(substitute(sys.momenta_defs[i], solved) - Expr::symbol(sys.p[i])).zero());
        }
        // H0 + H_b v^b + L - p_i v^i vanishes once canonical velocities are eliminated.
        std::vector<Expr> t{sys.H0, m.lagrangian()};
        for (std::size_t a = 0; a < sys.m(); ++a) t.push_back(sys.H_alpha[a] * Expr::symbol(sys.vn[a]));
        for (std::size_t i = 0; i < sys.r(); ++i) t.push_back(-(Expr::symbol(sys.p[i]) * Expr::symbol(sys.v[i])));
        CHECK(is_zero(substitute(Expr::add(t), solved)).zero());
    }
}

TEST_CASE("property: regular H0 is the full Legendre transform") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        LagrangianModel m = random_lagrangian(seed, 2, 2);
        auto ra = rank_and_partition(m);
        if (ra.report.r_W != 2) continue;
        auto sys = build_partial_hamiltonian(m, ra.partition);
        // p.v - L with v obtained from a numeric solve of p = W v + a.
        Sampler s({.seed = seed});
        for (int k = 0; k < 10; ++k) {
            Binding b = s.draw({"q1", "q2", "p_q1", "p_q2", "t"});
            Matrix W = evaluate(ra.report.W, b);
            Binding rest = b;
            rest["q1_dot"] = 0.0;
            rest["q2_dot"] = 0.0;
            std::vector<double> rhs{b["p_q1"] - evaluate(sys.momenta_defs[0], rest),
                                    b["p_q2"] - evaluate(sys.momenta_defs[1], rest)};
            auto v = solve(W, rhs);
            Binding full = b;
            full["q1_dot"] = v[0];
            full["q2_dot"] = v[1];
            double legendre = b["p_q1"] * v[0] + b["p_q2"] * v[1] - evaluate(m.lagrangian(), full);
            CHECK(evaluate(sys.H0, b) == doctest::Approx(legendre).epsilon(1e-10));
        }
    }
}

TEST_CASE("analyze pipeline wiring") {
    auto a = analyze(model_fixture("S1"), AnalysisConfig::with_seed(7));
    CHECK(a.rank.report.seed == 7);
    CHECK(a.system.sampling.seed == 7);
    CHECK(a.classification.verdict == Verdict::nongauge);
}
