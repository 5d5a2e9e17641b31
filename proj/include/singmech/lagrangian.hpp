#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "singmech/linalg.hpp"
#include "singmech/model.hpp"

namespace singmech {

struct HessianReport {
    ExprMatrix W;
    std::size_t r_W = 0;
    /// Canonical indices first, then noncanonical, each in declaration order.
    std::vector<std::size_t> permutation;
    int samples_used = 0;
    double pivot_threshold = 0.0;
    std::uint64_t seed = 0;
};

struct CoordinatePartition {
    std::vector<std::size_t> canonical;
    std::vector<std::size_t> noncanonical;
};

/// W_AB = d2L / dq_dot^A dq_dot^B. Throws UnsupportedLagrangian when an entry
/// still depends on a velocity.
[[nodiscard]] ExprMatrix hessian(const LagrangianModel& model);

struct RankAnalysis {
    HessianReport report;
    CoordinatePartition partition;
};

/// Throws NonConstantRank when the rank or the pivot set varies between samples.
[[nodiscard]] RankAnalysis rank_and_partition(const LagrangianModel& model, const RankConfig& config = {});

/// Partition with an arbitrary canonical set (the remaining indices become
/// noncanonical). Meant for tests that force n_p away from r_W.
[[nodiscard]] CoordinatePartition make_partition(std::size_t n, std::vector<std::size_t> canonical);

}  // namespace singmech
