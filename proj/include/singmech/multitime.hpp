#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "singmech/analysis.hpp"
#include "singmech/bracket.hpp"
#include "singmech/model_file.hpp"

namespace singmech {

/// Sizes of the source partial system and the two counting rules.
struct CountingRules {
    std::size_t n = 0;
    std::size_t n_mu = 0;
    std::size_t n_p = 0;
    std::size_t r_W = 0;

    [[nodiscard]] bool times_momenta() const noexcept { return n_mu + n_p == n + 1; }
    [[nodiscard]] bool times_rank() const noexcept { return n_mu + r_W == n + 1; }
};

/// Hamiltonians H_mu over (tau, q^i, p_i). The H_mu may depend on every tau
/// component, not only their own.
struct MultiTimeSystem {
    std::string name;
    std::vector<std::string> tau;
    std::vector<Expr> H;
    CanonicalPairs pairs;
    /// Set by from_partial.
    std::optional<CountingRules> provenance;

    [[nodiscard]] std::size_t n_mu() const noexcept { return tau.size(); }
};

/// tau^0 = t with H_0 = H0, then one time per noncanonical coordinate with its
/// H_alpha. Throws std::logic_error if a counting rule fails.
[[nodiscard]] MultiTimeSystem from_partial(const Analysis& analysis);

/// Parses the Hamiltonians over the declared canonical pairs and times.
/// Throws SyntaxError, UnknownSymbol, ValidationError.
[[nodiscard]] MultiTimeSystem from_hamiltonians(const HamiltonianFile& file);

struct ResidualEntry {
    std::size_t mu = 0;
    std::size_t nu = 0;
    Expr value;
    ZeroResult zero;
};

struct IntegrabilityReport {
    /// R[mu][nu] = dH_mu/dtau^nu - dH_nu/dtau^mu + {H_mu, H_nu}; antisymmetric.
    ExprMatrix R;
    /// One entry per mu < nu; empty for a single time.
    std::vector<ResidualEntry> entries;

    [[nodiscard]] bool integrable() const noexcept;
};

[[nodiscard]] IntegrabilityReport integrability_residual(const MultiTimeSystem& mts,
                                                         const SamplerConfig& sampling = {});

/// Piecewise-linear path through tau-space.
struct TimePath {
    std::vector<std::vector<double>> waypoints;
};

/// One waypoint per line, comma-separated components. Blank lines and lines
/// starting with '#' are skipped. Throws ParseError.
[[nodiscard]] TimePath read_path(std::istream& in, const std::string& origin);
[[nodiscard]] TimePath load_path(const std::string& path);

/// Axis-parallel path from `from` to `to`: every displacement is split into
/// one to three pieces and the pieces are visited in a shuffled order.
[[nodiscard]] TimePath random_staircase(const std::vector<double>& from, const std::vector<double>& to,
                                        std::uint64_t seed);

struct CanonicalState {
    std::vector<double> q;
    std::vector<double> p;
};

/// RK4 in the path parameter of each segment with `steps_per_segment` steps.
/// Throws PreconditionError (fewer than 2 waypoints, wrong dimension,
/// non-finite waypoint, state size) and StepFailure.
[[nodiscard]] CanonicalState integrate_path(const MultiTimeSystem& mts, const TimePath& path,
                                            const CanonicalState& init, int steps_per_segment = 1000);

}  // namespace singmech
