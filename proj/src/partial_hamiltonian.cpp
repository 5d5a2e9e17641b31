#include "singmech/partial_hamiltonian.hpp"

#include "singmech/errors.hpp"

namespace singmech {

std::vector<std::pair<std::string, std::string>> PartialHamiltonianSystem::canonical_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < q.size(); ++i) out.emplace_back(q[i], p[i]);
    return out;
}

std::vector<Expr> momenta(const LagrangianModel& model, const CoordinatePartition& partition) {
    std::vector<Expr> out;
    for (std::size_t i : partition.canonical) out.push_back(differentiate(model.lagrangian(), model.velocity(i)));
    return out;
}

std::vector<Expr> solve_canonical_velocities(const LagrangianModel& model, const CoordinatePartition& partition,
                                             const std::vector<Expr>& momenta, const SamplerConfig& sampling) {
    const ExprMatrix W = hessian(model);
    const auto& C = partition.canonical;
    const ExprMatrix W_inv = inverse(submatrix(W, C, C), sampling);

    std::map<std::string, Expr> at_rest;
    for (const auto& name : model.velocities()) at_rest.emplace(name, Expr(0));

    std::vector<Expr> rhs;
    for (std::size_t j = 0; j < C.size(); ++j) {
        const Expr a = substitute(momenta[j], at_rest);
        Expr affine = a;
        for (std::size_t b = 0; b < model.n(); ++b) affine = affine + W[C[j]][b] * Expr::symbol(model.velocity(b));
        auto check = is_zero(momenta[j] - affine, sampling);
        if (!check.zero()) {
            throw UnsupportedLagrangian("momentum " + model.momentum(C[j]) + " is not affine in the velocities");
        }
        Expr r = Expr::symbol(model.momentum(C[j])) - a;
        for (std::size_t alpha : partition.noncanonical) r = r - W[C[j]][alpha] * Expr::symbol(model.velocity(alpha));
        rhs.push_back(simplify(r));
    }

    std::vector<Expr> out;
    for (std::size_t i = 0; i < C.size(); ++i) {
        std::vector<Expr> terms;
        for (std::size_t j = 0; j < C.size(); ++j) terms.push_back(W_inv[i][j] * rhs[j]);
        out.push_back(simplify(Expr::add(std::move(terms))));
    }
    return out;
}

NondynamicalReport verify_nondynamical(const PartialHamiltonianSystem& system, double tol) {
    NondynamicalReport report;
    auto check = [&](const Expr& h, const std::string& label) {
        for (const auto& vel : system.vn) {
            Expr d = differentiate(h, vel);
            ZeroResult z = is_zero(d, system.sampling, tol);
            report.max_abs = std::max(report.max_abs, z.max_abs);
            if (!z.zero()) {
                throw NondynamicalViolation("d" + label + "/d" + vel + " = " + d.str() + " does not vanish",
                                            "d" + label + "/d" + vel);
            }
        }
    };
    check(system.H0, "H0");
    for (std::size_t a = 0; a < system.m(); ++a) check(system.H_alpha[a], "H_" + system.qn[a]);

    const ExprMatrix W = hessian(system.model);
    for (std::size_t a : system.partition.noncanonical) {
        for (std::size_t b : system.partition.noncanonical) {
            if (!is_zero(W[a][b], system.sampling).zero()) report.block_degenerate = false;
        }
    }
    return report;
}

PartialHamiltonianSystem build_partial_hamiltonian(const LagrangianModel& model, const CoordinatePartition& partition,
                                                   const SamplerConfig& sampling) {
    PartialHamiltonianSystem s{.model = model, .partition = partition, .sampling = sampling};
    for (std::size_t i : partition.canonical) {
        s.q.push_back(model.coordinates()[i]);
        s.p.push_back(model.momentum(i));
        s.v.push_back(model.velocity(i));
    }
    for (std::size_t a : partition.noncanonical) {
        s.qn.push_back(model.coordinates()[a]);
        s.vn.push_back(model.velocity(a));
    }
    s.momenta_defs = momenta(model, partition);
    s.solved_velocities = solve_canonical_velocities(model, partition, s.momenta_defs, sampling);

    std::map<std::string, Expr> solved;
    for (std::size_t i = 0; i < s.r(); ++i) solved.emplace(s.v[i], s.solved_velocities[i]);

    const Expr& L = model.lagrangian();
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < s.r(); ++i) terms.push_back(Expr::symbol(s.p[i]) * Expr::symbol(s.v[i]));
    for (const auto& vel : s.vn) terms.push_back(differentiate(L, vel) * Expr::symbol(vel));
    terms.push_back(-L);
    s.H0 = substitute(Expr::add(std::move(terms)), solved);
    for (const auto& vel : s.vn) s.H_alpha.push_back(substitute(-differentiate(L, vel), solved));

    s.block_degenerate = verify_nondynamical(s).block_degenerate;

    // Verified independent of the noncanonical velocities: drop any symbolic
    // remnant (e.g. terms that only cancel numerically).
    std::map<std::string, Expr> zero_velocities;
    for (const auto& vel : s.vn) zero_velocities.emplace(vel, Expr(0));
    s.H0 = substitute(s.H0, zero_velocities);
    for (auto& h : s.H_alpha) h = substitute(h, zero_velocities);

    s.time_dependent = !is_zero(differentiate(s.H0, kTimeName), sampling).zero();
    for (const auto& h : s.H_alpha) {
        s.time_dependent = s.time_dependent || !is_zero(differentiate(h, kTimeName), sampling).zero();
    }
    return s;
}

}  // namespace singmech
