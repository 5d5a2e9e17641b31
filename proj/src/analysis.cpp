#include "singmech/analysis.hpp"

namespace singmech {

Analysis analyze(const LagrangianModel& model, const AnalysisConfig& config) {
    RankAnalysis rank = rank_and_partition(model, config.rank);
    PartialHamiltonianSystem system = build_partial_hamiltonian(model, rank.partition, config.sampling);
    FGSystem fg = build_FG(system);
    Classification c = classify(fg, system, config.rank);
    return Analysis{std::move(rank), std::move(system), std::move(fg), std::move(c)};
}

}  // namespace singmech
