#include "singmech/bracket.hpp"

#include <algorithm>

#include "singmech/errors.hpp"

namespace singmech {

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::regular: return "regular";
        case Verdict::nongauge: return "nongauge";
        case Verdict::gauge: return "gauge";
        case Verdict::inconsistent: return "inconsistent";
    }
    return "?";
}

Expr poisson(const Expr& A, const Expr& B, const CanonicalPairs& pairs) {
    std::vector<Expr> terms;
    for (const auto& [q, p] : pairs) {
        terms.push_back(differentiate(A, q) * differentiate(B, p));
        terms.push_back(-(differentiate(B, q) * differentiate(A, p)));
    }
    return simplify(Expr::add(std::move(terms)));
}

Expr poisson_reduced(const Expr& A, const Expr& B, const PartialHamiltonianSystem& system) {
    return poisson(A, B, system.canonical_pairs());
}

Expr D_op(const Expr& A, std::size_t alpha, const PartialHamiltonianSystem& system) {
    const Expr& H = system.H_alpha.at(alpha);
    return simplify(differentiate(A, system.qn[alpha]) - differentiate(H, kTimeName) + poisson_reduced(A, H, system));
}

FGSystem build_FG(const PartialHamiltonianSystem& system) {
    const std::size_t m = system.m();
    FGSystem fg;
    fg.F.assign(m, std::vector<Expr>(m));
    for (std::size_t a = 0; a < m; ++a) {
        fg.F[a][a] = Expr(0);
        for (std::size_t b = a + 1; b < m; ++b) {
            const Expr& Ha = system.H_alpha[a];
            const Expr& Hb = system.H_alpha[b];
            Expr f = simplify(differentiate(Ha, system.qn[b]) - differentiate(Hb, system.qn[a]) +
                              poisson_reduced(Ha, Hb, system));
            fg.F[a][b] = f;
            fg.F[b][a] = simplify(-f);
        }
        fg.G.push_back(D_op(system.H0, a, system));
    }
    return fg;
}

Classification classify(const FGSystem& fg, const PartialHamiltonianSystem& system, const RankConfig& rank) {
    Classification c;
    const std::size_t m = system.m();
    if (m == 0) return c;

    SampledRank sr = sampled_rank(fg.F, rank);
    c.r_F = sr.rank;
    c.alpha1 = sr.pivots;
    for (std::size_t a = 0; a < m; ++a) {
        if (!std::binary_search(c.alpha1.begin(), c.alpha1.end(), a)) c.alpha2.push_back(a);
    }
    c.F_bar = inverse(submatrix(fg.F, c.alpha1, c.alpha1), system.sampling);
    if (c.alpha2.empty()) {
        c.verdict = Verdict::nongauge;
        return c;
    }

    // lambda^{a1}_{a2} from F(a2, b1) = lambda^{a1}_{a2} F(a1, b1), i.e.
    // Lambda = F21 * inverse(F11) with Lambda indexed [a2][a1].
    const std::size_t r = c.alpha1.size();
    c.lambda.assign(r, std::vector<Expr>(c.alpha2.size(), Expr(0)));
    for (std::size_t k = 0; k < c.alpha2.size(); ++k) {
        for (std::size_t a = 0; a < r; ++a) {
            std::vector<Expr> terms;
            for (std::size_t b = 0; b < r; ++b) terms.push_back(fg.F[c.alpha2[k]][c.alpha1[b]] * c.F_bar[b][a]);
            c.lambda[a][k] = simplify(Expr::add(std::move(terms)));
        }
    }

    c.verdict = Verdict::gauge;
    for (std::size_t k = 0; k < c.alpha2.size(); ++k) {
        Expr residual = fg.G[c.alpha2[k]];
        for (std::size_t a = 0; a < r; ++a) residual = residual - c.lambda[a][k] * fg.G[c.alpha1[a]];
        residual = simplify(residual);
        ZeroResult z = is_zero(residual, system.sampling);
        if (!z.zero()) {
            c.verdict = Verdict::inconsistent;
            c.residual = residual;
            c.residual_label = "G_" + system.qn[c.alpha2[k]];
            c.witness = z.witness;
            break;
        }
    }
    return c;
}

std::map<std::string, Expr> general_noncanonical_velocities(const FGSystem& fg, const Classification& c,
                                                            const PartialHamiltonianSystem& system,
                                                            const std::map<std::string, Expr>& gauge) {
    if (c.verdict == Verdict::inconsistent) {
        throw InconsistentSystem("F q_dot = G has no solution: " + c.residual_label + " = " + c.residual.str());
    }
    std::map<std::string, Expr> out;
    std::vector<Expr> free_part;
    for (std::size_t k : c.alpha2) {
        const std::string& vel = system.vn[k];
        auto it = gauge.find(vel);
        Expr u = it == gauge.end() ? Expr::symbol(vel) : simplify(it->second);
        out.emplace(vel, u);
        free_part.push_back(u);
    }
    // q_dot^{a1} = Fbar (G_{a1} - F(a1, a2) q_dot^{a2})
    const std::size_t r = c.alpha1.size();
    std::vector<Expr> rhs;
    for (std::size_t a = 0; a < r; ++a) {
        Expr x = fg.G[c.alpha1[a]];
        for (std::size_t k = 0; k < c.alpha2.size(); ++k) x = x - fg.F[c.alpha1[a]][c.alpha2[k]] * free_part[k];
        rhs.push_back(x);
    }
    for (std::size_t a = 0; a < r; ++a) {
        std::vector<Expr> terms;
        for (std::size_t b = 0; b < r; ++b) terms.push_back(c.F_bar[a][b] * rhs[b]);
        out.emplace(system.vn[c.alpha1[a]], simplify(Expr::add(std::move(terms))));
    }
    return out;
}

std::map<std::string, Expr> solve_noncanonical_velocities(const FGSystem& fg, const Classification& c,
                                                          const PartialHamiltonianSystem& system) {
    std::map<std::string, Expr> gauge;
    for (std::size_t k : c.alpha2) gauge.emplace(system.vn[k], Expr(0));
    return general_noncanonical_velocities(fg, c, system, gauge);
}

Expr bracket(const Expr& A, const Expr& B, const PartialHamiltonianSystem& system, const Classification& c) {
    if (c.verdict == Verdict::inconsistent) throw InconsistentSystem("bracket undefined for an inconsistent system");
    std::vector<Expr> terms{poisson_reduced(A, B, system)};
    const std::size_t r = c.alpha1.size();
    std::vector<Expr> DA, DB;
    for (std::size_t a : c.alpha1) {
        DA.push_back(D_op(A, a, system));
        DB.push_back(D_op(B, a, system));
    }
    for (std::size_t a = 0; a < r; ++a) {
        if (DA[a].is_zero()) continue;
        for (std::size_t b = 0; b < r; ++b) terms.push_back(DA[a] * c.F_bar[a][b] * DB[b]);
    }
    return simplify(Expr::add(std::move(terms)));
}

}  // namespace singmech
