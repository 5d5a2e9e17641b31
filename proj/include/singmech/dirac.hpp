#pragma once

#include <map>
#include <string>
#include <vector>

#include "singmech/bracket.hpp"

namespace singmech {

/// Every coordinate paired with its momentum, declared order.
[[nodiscard]] CanonicalPairs full_pairs(const PartialHamiltonianSystem& system);

/// Poisson bracket over all n pairs, extra momenta p_alpha included.
[[nodiscard]] Expr poisson_full(const Expr& A, const Expr& B, const PartialHamiltonianSystem& system);

/// Primary constraints Phi_alpha = p_alpha + H_alpha.
struct ConstraintSet {
    std::vector<std::string> momenta;  // p_alpha
    std::vector<Expr> Phi;

    [[nodiscard]] std::size_t size() const noexcept { return Phi.size(); }
};

[[nodiscard]] ConstraintSet build_constraints(const PartialHamiltonianSystem& system);

/// H0 + u^alpha Phi_alpha. The multiplier u^alpha is the velocity symbol of
/// q^alpha, so solved multipliers read directly as noncanonical velocities.
struct TotalHamiltonian {
    Expr expr;
    std::vector<std::string> multipliers;
};

[[nodiscard]] TotalHamiltonian total_hamiltonian(const PartialHamiltonianSystem& system,
                                                 const ConstraintSet& constraints);

/// Restricts to the constraint surface: p_alpha -> -H_alpha.
[[nodiscard]] Expr on_surface(const Expr& A, const PartialHamiltonianSystem& system);

struct IdentityCheck {
    std::string label;
    bool pass = true;
    Expr residual;
    Binding witness;
};

struct CorrespondenceReport {
    /// F_ab - {Phi_a, Phi_b}_full, upper triangle including the diagonal.
    std::vector<IdentityCheck> brackets;
    /// D_a H0 + {Phi_a, H0}_full.
    std::vector<IdentityCheck> hamiltonian;
    /// C u = K with C_ab = {Phi_a, Phi_b}_full and K_a = -{Phi_a, H0}_full.
    FGSystem multiplier_system;
    Classification multiplier_classification;
    /// Both systems consistent (or both not), equal ranks, equal null spaces,
    /// and each particular solution solves the other system.
    bool solutions_match = true;
    std::string solutions_detail;
    /// Gauge-fixed multipliers (empty when inconsistent).
    std::map<std::string, Expr> multipliers;

    [[nodiscard]] bool brackets_pass() const noexcept;
    [[nodiscard]] bool hamiltonian_pass() const noexcept;
    [[nodiscard]] bool passed() const noexcept { return brackets_pass() && hamiltonian_pass() && solutions_match; }
    /// Throws CorrespondenceFailure naming the first failed check and its witness.
    void require() const;
};

[[nodiscard]] CorrespondenceReport verify_correspondence(const PartialHamiltonianSystem& system,
                                                         const FGSystem& fg, const Classification& c,
                                                         const RankConfig& rank = {});

/// Dirac bracket for a second-class constraint set (C invertible). Precomputes
/// the inverse of C once.
class DiracBracket {
public:
    /// Throws SecondClassRequired when C is singular.
    DiracBracket(const PartialHamiltonianSystem& system, const RankConfig& rank = {});

    [[nodiscard]] const ConstraintSet& constraints() const noexcept { return constraints_; }
    [[nodiscard]] const ExprMatrix& C() const noexcept { return C_; }
    [[nodiscard]] const ExprMatrix& C_bar() const noexcept { return C_bar_; }

    [[nodiscard]] Expr operator()(const Expr& A, const Expr& B) const;

private:
    const PartialHamiltonianSystem* system_;
    ConstraintSet constraints_;
    ExprMatrix C_;
    ExprMatrix C_bar_;
};

[[nodiscard]] Expr dirac_bracket(const Expr& A, const Expr& B, const PartialHamiltonianSystem& system);

/// dA/dt + {A, H_total}_full with the multipliers substituted, on the
/// constraint surface.
[[nodiscard]] Expr total_evolution(const Expr& A, const PartialHamiltonianSystem& system,
                                   const std::map<std::string, Expr>& multipliers);

}  // namespace singmech
