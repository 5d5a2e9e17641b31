#pragma once

#include <string>
#include <vector>

#include "singmech/lagrangian.hpp"
#include "singmech/model.hpp"
#include "singmech/zero_test.hpp"

namespace singmech {

/// Result of the partial Legendre transform over the canonical coordinates.
///
/// Canonical coordinates q^i carry momenta p_i; the noncanonical q^alpha do
/// not. H0 and H_alpha are functions of (t, q^i, p_i, q^alpha) only.
struct PartialHamiltonianSystem {
    LagrangianModel model;
    CoordinatePartition partition;
    SamplerConfig sampling;

    std::vector<std::string> q{};        // canonical coordinates
    std::vector<std::string> p{};        // their momenta
    std::vector<std::string> v{};        // their velocities
    std::vector<std::string> qn{};       // noncanonical coordinates
    std::vector<std::string> vn{};       // their velocities

    std::vector<Expr> momenta_defs{};       // p_i(t, q, q_dot)
    std::vector<Expr> solved_velocities{};  // q_dot^i(t, q, p, q_dot^alpha)
    Expr H0{};
    std::vector<Expr> H_alpha{};
    bool time_dependent = false;
    /// W_alpha,beta vanishes in the original variables. False means rank
    /// deficiency only shows after substitution (nonzero Schur block).
    bool block_degenerate = true;

    [[nodiscard]] std::size_t n() const noexcept { return model.n(); }
    [[nodiscard]] std::size_t r() const noexcept { return q.size(); }
    [[nodiscard]] std::size_t m() const noexcept { return qn.size(); }
    /// q^i and p_i as (coordinate, momentum) pairs.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> canonical_pairs() const;
};

/// p_i = dL/dq_dot^i for the canonical indices.
[[nodiscard]] std::vector<Expr> momenta(const LagrangianModel& model, const CoordinatePartition& partition);

/// Inverts p_i = W_ij q_dot^j + W_i,alpha q_dot^alpha + a_i for q_dot^i.
/// Throws UnsupportedLagrangian or SingularMinor.
[[nodiscard]] std::vector<Expr> solve_canonical_velocities(const LagrangianModel& model,
                                                           const CoordinatePartition& partition,
                                                           const std::vector<Expr>& momenta,
                                                           const SamplerConfig& sampling = {});

struct NondynamicalReport {
    bool block_degenerate = true;
    /// Largest |value| seen when testing the velocity derivatives.
    double max_abs = 0.0;
};

/// Checks that `system.H0` and every `H_alpha` are free of the noncanonical
/// velocities. Throws NondynamicalViolation naming the offending derivative.
NondynamicalReport verify_nondynamical(const PartialHamiltonianSystem& system, double tol = 1e-10);

/// Full construction: momenta, canonical velocities, H0 and H_alpha, then
/// verify_nondynamical. The returned Hamiltonians are velocity-free.
[[nodiscard]] PartialHamiltonianSystem build_partial_hamiltonian(const LagrangianModel& model,
                                                                 const CoordinatePartition& partition,
                                                                 const SamplerConfig& sampling = {});

}  // namespace singmech
