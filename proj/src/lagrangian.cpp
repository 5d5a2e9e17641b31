#include "singmech/lagrangian.hpp"

#include <algorithm>

#include "singmech/errors.hpp"

namespace singmech {

ExprMatrix hessian(const LagrangianModel& model) {
    const std::size_t n = model.n();
    const auto v = model.velocities();
    ExprMatrix W(n, std::vector<Expr>(n));
    for (std::size_t a = 0; a < n; ++a) {
        Expr dL = differentiate(model.lagrangian(), v[a]);
        for (std::size_t b = a; b < n; ++b) {
            Expr w = differentiate(dL, v[b]);
            for (const auto& name : v) {
                if (depends_on(w, name)) {
                    throw UnsupportedLagrangian("Lagrangian is not quadratic in the velocities: W(" +
                                                model.coordinates()[a] + "," + model.coordinates()[b] +
                                                ") = " + w.str());
                }
            }
            W[a][b] = w;
            W[b][a] = w;
        }
    }
    return W;
}

RankAnalysis rank_and_partition(const LagrangianModel& model, const RankConfig& config) {
    RankAnalysis out;
    HessianReport& r = out.report;
    r.W = hessian(model);
    SampledRank sr = sampled_rank(r.W, config);
    r.r_W = sr.rank;
    r.samples_used = sr.samples_used;
    r.pivot_threshold = config.threshold;
    r.seed = config.seed;
    out.partition = make_partition(model.n(), sr.pivots);
    r.permutation = out.partition.canonical;
    r.permutation.insert(r.permutation.end(), out.partition.noncanonical.begin(), out.partition.noncanonical.end());
    return out;
}

CoordinatePartition make_partition(std::size_t n, std::vector<std::size_t> canonical) {
    std::sort(canonical.begin(), canonical.end());
    if (std::adjacent_find(canonical.begin(), canonical.end()) != canonical.end()) {
        throw ValidationError("repeated canonical index");
    }
    if (!canonical.empty() && canonical.back() >= n) throw ValidationError("canonical index out of range");
    CoordinatePartition p;
    p.canonical = canonical;
    for (std::size_t a = 0; a < n; ++a) {
        if (!std::binary_search(canonical.begin(), canonical.end(), a)) p.noncanonical.push_back(a);
    }
    return p;
}

}  // namespace singmech
