#include "singmech/dirac.hpp"

#include <cstdio>

#include "singmech/errors.hpp"

namespace singmech {

CanonicalPairs full_pairs(const PartialHamiltonianSystem& system) {
    CanonicalPairs pairs;
    for (const auto& x : system.model.coordinates()) pairs.emplace_back(x, momentum_name(x));
    return pairs;
}

Expr poisson_full(const Expr& A, const Expr& B, const PartialHamiltonianSystem& system) {
    return poisson(A, B, full_pairs(system));
}

ConstraintSet build_constraints(const PartialHamiltonianSystem& system) {
    ConstraintSet cs;
    for (std::size_t a = 0; a < system.m(); ++a) {
        cs.momenta.push_back(momentum_name(system.qn[a]));
        cs.Phi.push_back(simplify(Expr::symbol(cs.momenta.back()) + system.H_alpha[a]));
    }
    return cs;
}

TotalHamiltonian total_hamiltonian(const PartialHamiltonianSystem& system, const ConstraintSet& constraints) {
    TotalHamiltonian th;
    std::vector<Expr> terms{system.H0};
    for (std::size_t a = 0; a < constraints.size(); ++a) {
        th.multipliers.push_back(system.vn[a]);
        terms.push_back(Expr::symbol(system.vn[a]) * constraints.Phi[a]);
    }
    th.expr = simplify(Expr::add(std::move(terms)));
    return th;
}

Expr on_surface(const Expr& A, const PartialHamiltonianSystem& system) {
    std::map<std::string, Expr> sub;
    for (std::size_t a = 0; a < system.m(); ++a) sub.emplace(momentum_name(system.qn[a]), -system.H_alpha[a]);
    return simplify(substitute(A, sub));
}

namespace {

ExprMatrix constraint_brackets(const ConstraintSet& cs, const PartialHamiltonianSystem& system) {
    const std::size_t m = cs.size();
    ExprMatrix C(m, std::vector<Expr>(m, Expr(0)));
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            C[a][b] = poisson_full(cs.Phi[a], cs.Phi[b], system);
            C[b][a] = simplify(-C[a][b]);
        }
    }
    return C;
}

IdentityCheck check_identity(std::string label, const Expr& residual, const SamplerConfig& sampling) {
    IdentityCheck ck;
    ck.label = std::move(label);
    ck.residual = simplify(residual);
    ZeroResult z = is_zero(ck.residual, sampling);
    ck.pass = z.zero();
    ck.witness = z.witness;
    return ck;
}

std::string witness_text(const Binding& b) {
    std::string out;
    char buf[64];
    for (const auto& [name, value] : b) {
        std::snprintf(buf, sizeof buf, "%s%s=%.17g", out.empty() ? "" : ", ", name.c_str(), value);
        out += buf;
    }
    return out;
}

// Does every row of M x = rhs vanish for x given by `sol` (velocity name -> Expr)?
bool solves(const FGSystem& sys, const std::map<std::string, Expr>& sol, const PartialHamiltonianSystem& system,
            std::string& failed) {
    for (std::size_t r = 0; r < sys.F.size(); ++r) {
        std::vector<Expr> terms{-sys.G[r]};
        for (std::size_t b = 0; b < sys.F.size(); ++b) terms.push_back(sys.F[r][b] * sol.at(system.vn[b]));
        if (!is_zero(simplify(Expr::add(std::move(terms))), system.sampling).zero()) {
            failed = system.qn[r];
            return false;
        }
    }
    return true;
}

}  // namespace

bool CorrespondenceReport::brackets_pass() const noexcept {
    for (const auto& c : brackets) {
        if (!c.pass) return false;
    }
    return true;
}

bool CorrespondenceReport::hamiltonian_pass() const noexcept {
    for (const auto& c : hamiltonian) {
        if (!c.pass) return false;
    }
    return true;
}

void CorrespondenceReport::require() const {
    for (const auto* group : {&brackets, &hamiltonian}) {
        for (const auto& c : *group) {
            if (!c.pass) {
                throw CorrespondenceFailure(c.label + " = " + c.residual.str() + " is nonzero at " +
                                            witness_text(c.witness));
            }
        }
    }
    if (!solutions_match) throw CorrespondenceFailure("multiplier system differs: " + solutions_detail);
}

CorrespondenceReport verify_correspondence(const PartialHamiltonianSystem& system, const FGSystem& fg,
                                           const Classification& c, const RankConfig& rank) {
    CorrespondenceReport rep;
    const std::size_t m = system.m();
    ConstraintSet cs = build_constraints(system);
    ExprMatrix C = constraint_brackets(cs, system);

    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a; b < m; ++b) {
            rep.brackets.push_back(check_identity("F[" + system.qn[a] + "," + system.qn[b] + "] - {Phi,Phi}",
                                                  fg.F[a][b] - C[a][b], system.sampling));
        }
    }
    std::vector<Expr> K;
    for (std::size_t a = 0; a < m; ++a) {
        Expr phi_h0 = poisson_full(cs.Phi[a], system.H0, system);
        rep.hamiltonian.push_back(
            check_identity("D[" + system.qn[a] + "]H0 + {Phi,H0}", fg.G[a] + phi_h0, system.sampling));
        K.push_back(simplify(-phi_h0));
    }

    rep.multiplier_system = FGSystem{C, K};
    rep.multiplier_classification = classify(rep.multiplier_system, system, rank);
    const Classification& mc = rep.multiplier_classification;
    const bool f_ok = c.verdict != Verdict::inconsistent;
    const bool c_ok = mc.verdict != Verdict::inconsistent;
    if (f_ok != c_ok) {
        rep.solutions_match = false;
        rep.solutions_detail = f_ok ? "multiplier system is inconsistent" : "multiplier system is consistent";
        return rep;
    }
    if (mc.r_F != c.r_F) {
        rep.solutions_match = false;
        rep.solutions_detail = "rank of C differs from rank of F";
        return rep;
    }
    if (!f_ok) {
        rep.solutions_detail = "both inconsistent";
        return rep;
    }

    // Null vectors of F: e_k on alpha2, -Fbar F(alpha1, alpha2_k) on alpha1.
    const std::size_t r = c.alpha1.size();
    for (std::size_t k = 0; k < c.alpha2.size(); ++k) {
        std::vector<Expr> v(m, Expr(0));
        v[c.alpha2[k]] = Expr(1);
        for (std::size_t a = 0; a < r; ++a) {
            std::vector<Expr> terms;
            for (std::size_t b = 0; b < r; ++b) terms.push_back(-(c.F_bar[a][b] * fg.F[c.alpha1[b]][c.alpha2[k]]));
            v[c.alpha1[a]] = simplify(Expr::add(std::move(terms)));
        }
        for (std::size_t row = 0; row < m; ++row) {
            std::vector<Expr> terms;
            for (std::size_t b = 0; b < m; ++b) terms.push_back(C[row][b] * v[b]);
            if (!is_zero(simplify(Expr::add(std::move(terms))), system.sampling).zero()) {
                rep.solutions_match = false;
                rep.solutions_detail = "null direction " + system.qn[c.alpha2[k]] + " of F is not a null direction of C";
                return rep;
            }
        }
    }

    auto q_dot = solve_noncanonical_velocities(fg, c, system);
    rep.multipliers = solve_noncanonical_velocities(rep.multiplier_system, mc, system);
    std::string failed;
    if (!solves(rep.multiplier_system, q_dot, system, failed)) {
        rep.solutions_match = false;
        rep.solutions_detail = "velocities violate the multiplier equation of " + failed;
    } else if (!solves(fg, rep.multipliers, system, failed)) {
        rep.solutions_match = false;
        rep.solutions_detail = "multipliers violate F q_dot = G at " + failed;
    } else {
        rep.solutions_detail = "equal solution sets";
    }
    return rep;
}

DiracBracket::DiracBracket(const PartialHamiltonianSystem& system, const RankConfig& rank)
    : system_(&system), constraints_(build_constraints(system)), C_(constraint_brackets(constraints_, system)) {
    if (C_.empty()) return;
    SampledRank sr = sampled_rank(C_, rank);
    if (sr.rank < C_.size()) {
        throw SecondClassRequired("constraint bracket matrix has rank " + std::to_string(sr.rank) + " < " +
                                  std::to_string(C_.size()));
    }
    C_bar_ = inverse(C_, system.sampling);
}

Expr DiracBracket::operator()(const Expr& A, const Expr& B) const {
    const std::size_t m = constraints_.size();
    std::vector<Expr> a_phi, phi_b;
    for (std::size_t k = 0; k < m; ++k) {
        a_phi.push_back(poisson_full(A, constraints_.Phi[k], *system_));
        phi_b.push_back(poisson_full(constraints_.Phi[k], B, *system_));
    }
    std::vector<Expr> terms{poisson_full(A, B, *system_)};
    for (std::size_t a = 0; a < m; ++a) {
        if (a_phi[a].is_zero()) continue;
        for (std::size_t b = 0; b < m; ++b) terms.push_back(-(a_phi[a] * C_bar_[a][b] * phi_b[b]));
    }
    return simplify(Expr::add(std::move(terms)));
}

Expr dirac_bracket(const Expr& A, const Expr& B, const PartialHamiltonianSystem& system) {
    return DiracBracket(system)(A, B);
}

Expr total_evolution(const Expr& A, const PartialHamiltonianSystem& system,
                     const std::map<std::string, Expr>& multipliers) {
    TotalHamiltonian th = total_hamiltonian(system, build_constraints(system));
    Expr H = substitute(th.expr, multipliers);
    return on_surface(differentiate(A, kTimeName) + poisson_full(A, H, system), system);
}

}  // namespace singmech
