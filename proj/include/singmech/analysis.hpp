#pragma once

#include "singmech/bracket.hpp"
#include "singmech/lagrangian.hpp"
#include "singmech/partial_hamiltonian.hpp"

namespace singmech {

struct AnalysisConfig {
    RankConfig rank;
    SamplerConfig sampling;

    /// Both samplers share one seed.
    static AnalysisConfig with_seed(std::uint64_t seed) {
        AnalysisConfig c;
        c.rank.seed = seed;
        c.sampling.seed = seed;
        return c;
    }
};

/// Every stage of the reduction, in order.
struct Analysis {
    RankAnalysis rank;
    PartialHamiltonianSystem system;
    FGSystem fg;
    Classification classification;
};

/// Hessian rank, partial Legendre transform, F and G, classification.
/// Propagates UnsupportedLagrangian, NonConstantRank, NondynamicalViolation.
/// An inconsistent system is returned, not thrown.
[[nodiscard]] Analysis analyze(const LagrangianModel& model, const AnalysisConfig& config = {});

}  // namespace singmech
