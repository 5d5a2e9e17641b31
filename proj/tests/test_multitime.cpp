#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "singmech/dynamics.hpp"
#include "singmech/errors.hpp"
#include "singmech/multitime.hpp"
#include "support.hpp"

using namespace singmech;
using singmech::testing::fixture;
using singmech::testing::model_fixture;

namespace {

MultiTimeSystem mt_fixture(const std::string& name) {
    return from_hamiltonians(load_hamiltonian_file(fixture("multitime/" + name + ".toml")));
}

double distance(const CanonicalState& a, const CanonicalState& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.q.size(); ++i) d = std::max({d, std::fabs(a.q[i] - b.q[i]), std::fabs(a.p[i] - b.p[i])});
    return d;
}

const char* const kFixtures[] = {"R", "S1", "S2", "G1", "G2", "gauge_lambda", "schur", "pendulum"};

}  // namespace

TEST_CASE("from_partial examples") {
    auto G1m = model_fixture("G1");
    auto G1 = from_partial(analyze(G1m));
    CHECK(G1.n_mu() == 2);
    CHECK(G1.tau == std::vector<std::string>{"t", "q2"});
    CHECK(is_zero(G1.H[0] - G1m.expression("0.5*p_q1^2")).verdict == ZeroVerdict::symbolic_zero);
    CHECK(G1.H[1].is_zero());
    REQUIRE(G1.provenance);
    CHECK(G1.provenance->n_mu + G1.provenance->n_p == 3);

    auto R = from_partial(analyze(model_fixture("R")));
    CHECK(R.n_mu() == 1);
    CHECK(R.pairs.size() == 2);

    auto S1 = from_partial(analyze(model_fixture("S1")));
    CHECK(S1.n_mu() == 3);
    CHECK(S1.provenance->n_p == 0);
    CHECK(S1.pairs.empty());
}

TEST_CASE("property: counting rules on every fixture") {
    for (const char* name : kFixtures) {
        INFO(name);
        auto mts = from_partial(analyze(model_fixture(name)));
        REQUIRE(mts.provenance);
        CHECK(mts.provenance->times_momenta());
        CHECK(mts.provenance->times_rank());
        CHECK(mts.provenance->n_mu == mts.n_mu());
    }
}

TEST_CASE("integrability residual examples") {
    auto good = mt_fixture("mt_integrable");
    auto rep = integrability_residual(good);
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries[0].value.is_zero());
    CHECK(rep.integrable());

    auto bad = mt_fixture("mt_nonintegrable");
    rep = integrability_residual(bad);
    REQUIRE(rep.entries.size() == 1);
    CHECK(is_zero(rep.R[0][1] + Expr::symbol("p_q")).verdict == ZeroVerdict::symbolic_zero);
    CHECK(is_zero(rep.R[1][0] - Expr::symbol("p_q")).verdict == ZeroVerdict::symbolic_zero);
    CHECK_FALSE(rep.integrable());

    auto single = integrability_residual(from_partial(analyze(model_fixture("R"))));
    CHECK(single.entries.empty());
    CHECK(single.integrable());

    // explicit tau dependence
    HamiltonianFile f{"td", {"q"}, {"t", "s"}, {"s*p_q", "t*q"}};
    rep = integrability_residual(from_hamiltonians(f));
    // d(s p)/ds - d(t q)/dt + {s p, t q} = p - q - s t
    CHECK(is_zero(rep.R[0][1] - parse("p_q - q - s*t", [] {
                      SymbolTable t;
                      t.add_coordinate("q");
                      t.add(Symbol{"s", SymbolKind::time});
                      t.add(Symbol{"t", SymbolKind::time});
                      return t;
                  }())).verdict == ZeroVerdict::symbolic_zero);
}

TEST_CASE("property: residual on the noncanonical block is F") {
    for (const char* name : kFixtures) {
        INFO(name);
        auto a = analyze(model_fixture(name));
        auto rep = integrability_residual(from_partial(a));
        for (std::size_t x = 0; x < a.system.m(); ++x) {
            for (std::size_t y = 0; y < a.system.m(); ++y) {
                CHECK(is_zero(rep.R[x + 1][y + 1] - a.fg.F[x][y]).zero());
            }
            // and the time row is G
            CHECK(is_zero(rep.R[0][x + 1] - a.fg.G[x]).zero());
        }
    }
}

TEST_CASE("path integration examples") {
    TimePath time_first{{{0, 0}, {1, 0}, {1, 1}}};
    TimePath shift_first{{{0, 0}, {0, 1}, {1, 1}}};
    CanonicalState init{{0.0}, {1.0}};

    auto good = mt_fixture("mt_integrable");
    auto a = integrate_path(good, time_first, init);
    auto b = integrate_path(good, shift_first, init);
    CHECK(a.q[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a.p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(distance(a, b) < 1e-8);

    auto bad = mt_fixture("mt_nonintegrable");
    a = integrate_path(bad, time_first, init);
    b = integrate_path(bad, shift_first, init);
    CHECK(a.q[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(a.p[0]) < 1e-12);
    CHECK(std::fabs(b.q[0]) < 1e-12);
    CHECK(std::fabs(b.p[0]) < 1e-12);
    CHECK(distance(a, b) > 1e-3);

    CHECK_THROWS_AS((void)integrate_path(good, TimePath{{{0, 0}}}, init), PreconditionError);
    CHECK_THROWS_AS((void)integrate_path(good, TimePath{{{0}, {1}}}, init), PreconditionError);
    CHECK_THROWS_AS((void)integrate_path(good, time_first, CanonicalState{{0.0, 1.0}, {1.0}}), PreconditionError);
}

TEST_CASE("path files") {
    auto p = load_path(fixture("paths/time_first.csv"));
    CHECK(p.waypoints == std::vector<std::vector<double>>{{0, 0}, {1, 0}, {1, 1}});
    CHECK(load_path(fixture("paths/single.csv")).waypoints.size() == 1);

    std::istringstream ok("# header\n0, 0\n\n0.5,1e-1\n");
    CHECK(read_path(ok, "x").waypoints == std::vector<std::vector<double>>{{0, 0}, {0.5, 0.1}});
    std::istringstream ragged("0,0\n1\n");
    CHECK_THROWS_AS((void)read_path(ragged, "x"), ParseError);
    std::istringstream junk("0,zero\n");
    CHECK_THROWS_AS((void)read_path(junk, "x"), ParseError);
    CHECK_THROWS_AS((void)load_path("/nonexistent/path.csv"), ParseError);
}

TEST_CASE("direct Hamiltonian validation") {
    CHECK_THROWS_AS((void)from_hamiltonians(HamiltonianFile{"v", {"q"}, {"t"}, {"q_dot*p_q"}}), ValidationError);
    CHECK_THROWS_AS((void)from_hamiltonians(HamiltonianFile{"u", {"q"}, {"t"}, {"r*p_q"}}), UnknownSymbol);
    CHECK_THROWS_AS((void)from_hamiltonians(HamiltonianFile{"d", {"q"}, {"t", "t"}, {"p_q", "q"}}), ValidationError);
    CHECK_THROWS_AS((void)from_hamiltonians(HamiltonianFile{"c", {"q"}, {"q"}, {"p_q"}}), ValidationError);
}

TEST_CASE("random staircases") {
    std::vector<double> from{0.0, 0.0, 0.0}, to{1.0, -0.5, 2.0};
    auto p = random_staircase(from, to, 3);
    CHECK(p.waypoints.front() == from);
    CHECK(p.waypoints.back() == to);
    for (std::size_t k = 1; k < p.waypoints.size(); ++k) {
        int moved = 0;
        for (std::size_t i = 0; i < 3; ++i) moved += p.waypoints[k][i] != p.waypoints[k - 1][i];
        CHECK(moved == 1);
    }
    CHECK(random_staircase(from, to, 3).waypoints == p.waypoints);
}

TEST_CASE("property: path independence iff integrable") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    auto good = mt_fixture("mt_integrable");
    for (int k = 0; k < 5; ++k) {
        std::vector<double> to{U(rng), U(rng)};
        CanonicalState init{{U(rng)}, {U(rng)}};
        auto a = integrate_path(good, random_staircase({0, 0}, to, 100 + k), init);
        auto b = integrate_path(good, random_staircase({0, 0}, to, 200 + k), init);
        CHECK(distance(a, b) < 1e-8);
    }

    // G1 built from a Lagrangian: R vanishes identically.
    auto g1 = from_partial(analyze(model_fixture("G1")));
    REQUIRE(integrability_residual(g1).integrable());
    for (int k = 0; k < 5; ++k) {
        std::vector<double> to{U(rng), U(rng)};
        CanonicalState init{{U(rng)}, {U(rng)}};
        CHECK(distance(integrate_path(g1, random_staircase({0, 0}, to, 300 + k), init),
                       integrate_path(g1, random_staircase({0, 0}, to, 400 + k), init)) < 1e-8);
    }

    auto bad = mt_fixture("mt_nonintegrable");
    REQUIRE_FALSE(integrability_residual(bad).integrable());
    CanonicalState init{{0.0}, {1.0}};
    CHECK(distance(integrate_path(bad, load_path(fixture("paths/time_first.csv")), init),
                   integrate_path(bad, load_path(fixture("paths/shift_first.csv")), init)) > 1e-3);
}

TEST_CASE("property: a path along tau^0 alone is single-time dynamics") {
    auto R = analyze(model_fixture("R"));
    State s0 = initial_state(R.system, 0.0, {{"q1", 1.0}, {"q2", 0.5}, {"q1_dot", -0.2}, {"q2_dot", 0.7}});
    auto traj = integrate(R, s0, IntegratorConfig{.dt = 1e-3, .t_end = 1.0});
    auto end = integrate_path(from_partial(R), TimePath{{{0.0}, {1.0}}}, CanonicalState{s0.q, s0.p});
    const State& last = traj.states.back();
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::fabs(end.q[i] - last.q[i]) < 1e-10);
        CHECK(std::fabs(end.p[i] - last.p[i]) < 1e-10);
    }

    auto pend = analyze(model_fixture("pendulum"));
    s0 = initial_state(pend.system, 0.0, {{"theta", 0.9}, {"theta_dot", 0.1}});
    traj = integrate(pend, s0, IntegratorConfig{.dt = 2e-3, .t_end = 2.0});
    end = integrate_path(from_partial(pend), TimePath{{{0.0}, {2.0}}}, CanonicalState{s0.q, s0.p});
    CHECK(std::fabs(end.q[0] - traj.states.back().q[0]) < 1e-10);
    CHECK(std::fabs(end.p[0] - traj.states.back().p[0]) < 1e-10);

    auto G1 = analyze(model_fixture("G1"));
    s0 = initial_state(G1.system, 0.0, {{"q1", 0.3}, {"q1_dot", 0.4}, {"q2", -1.0}});
    traj = integrate(G1, s0, IntegratorConfig{.dt = 3e-3, .t_end = 3.0});
    end = integrate_path(from_partial(G1), TimePath{{{0.0, -1.0}, {3.0, -1.0}}}, CanonicalState{s0.q, s0.p});
    CHECK(std::fabs(end.q[0] - traj.states.back().q[0]) < 1e-10);
}
