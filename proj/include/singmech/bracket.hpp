#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "singmech/linalg.hpp"
#include "singmech/partial_hamiltonian.hpp"

namespace singmech {

using CanonicalPairs = std::vector<std::pair<std::string, std::string>>;

/// sum over pairs (q, p) of dA/dq dB/dp - dB/dq dA/dp.
[[nodiscard]] Expr poisson(const Expr& A, const Expr& B, const CanonicalPairs& pairs);

/// Poisson bracket over the canonical sector only; zero when r_W = 0.
[[nodiscard]] Expr poisson_reduced(const Expr& A, const Expr& B, const PartialHamiltonianSystem& system);

/// D_alpha A = dA/dq^alpha - dH_alpha/dt + {A, H_alpha}. `alpha` indexes the
/// noncanonical coordinates.
[[nodiscard]] Expr D_op(const Expr& A, std::size_t alpha, const PartialHamiltonianSystem& system);

struct FGSystem {
    ExprMatrix F;
    std::vector<Expr> G;
};

/// F_ab = dH_a/dq^b - dH_b/dq^a + {H_a, H_b},  G_a = D_a H0.
[[nodiscard]] FGSystem build_FG(const PartialHamiltonianSystem& system);

enum class Verdict { regular, nongauge, gauge, inconsistent };

[[nodiscard]] const char* to_string(Verdict v) noexcept;

struct Classification {
    Verdict verdict = Verdict::regular;
    std::size_t r_F = 0;
    /// Positions within the noncanonical list: the nonsingular block of F,
    /// and the rest (gauge directions).
    std::vector<std::size_t> alpha1;
    std::vector<std::size_t> alpha2;
    /// lambda[a1][a2] solves F(alpha2_k, beta1) = lambda[a][k] F(alpha1_a, beta1).
    ExprMatrix lambda;
    /// Inverse of the block F(alpha1, alpha1).
    ExprMatrix F_bar;
    /// Inconsistent only: the first G_alpha2 - lambda G_alpha1 that failed,
    /// and a point where it is nonzero.
    Expr residual;
    std::string residual_label;
    Binding witness;
};

[[nodiscard]] Classification classify(const FGSystem& fg, const PartialHamiltonianSystem& system,
                                      const RankConfig& rank = {});

/// Noncanonical velocity name -> expression over (t, q, p, q^alpha).
/// Gauge directions are fixed to zero. Throws InconsistentSystem.
[[nodiscard]] std::map<std::string, Expr> solve_noncanonical_velocities(const FGSystem& fg,
                                                                        const Classification& c,
                                                                        const PartialHamiltonianSystem& system);

/// General solution: `gauge` assigns the alpha2 velocities (missing ones are
/// left as their velocity symbols). Throws InconsistentSystem.
[[nodiscard]] std::map<std::string, Expr> general_noncanonical_velocities(
    const FGSystem& fg, const Classification& c, const PartialHamiltonianSystem& system,
    const std::map<std::string, Expr>& gauge = {});

/// The reduced bracket: Poisson over the canonical sector plus
/// D_a A Fbar^{ab} D_b B over the nonsingular block. Throws InconsistentSystem.
[[nodiscard]] Expr bracket(const Expr& A, const Expr& B, const PartialHamiltonianSystem& system,
                           const Classification& c);

}  // namespace singmech
