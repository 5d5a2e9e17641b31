#include "singmech/multitime.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "singmech/dynamics.hpp"
#include "singmech/errors.hpp"
#include "singmech/parse.hpp"

namespace singmech {

MultiTimeSystem from_partial(const Analysis& analysis) {
    const auto& sys = analysis.system;
    MultiTimeSystem mts;
    mts.name = sys.model.name();
    mts.tau.push_back(kTimeName);
    mts.H.push_back(sys.H0);
    for (std::size_t a = 0; a < sys.m(); ++a) {
        mts.tau.push_back(sys.qn[a]);
        mts.H.push_back(sys.H_alpha[a]);
    }
    mts.pairs = sys.canonical_pairs();
    CountingRules rules{sys.n(), mts.n_mu(), sys.r(), analysis.rank.report.r_W};
    if (!rules.times_momenta()) throw std::logic_error("times-momenta rule violated");
    if (!rules.times_rank()) throw std::logic_error("times-rank rule violated");
    mts.provenance = rules;
    return mts;
}

MultiTimeSystem from_hamiltonians(const HamiltonianFile& file) {
    if (file.times.empty()) throw ValidationError("no times declared");
    if (file.times.size() != file.hamiltonians.size()) throw ValidationError("times and hamiltonians differ in length");
    SymbolTable table;
    MultiTimeSystem mts;
    mts.name = file.name;
    for (const auto& x : file.canonical) {
        if (!is_identifier(x)) throw ValidationError("invalid coordinate name '" + x + "'");
        table.add_coordinate(x);
        mts.pairs.emplace_back(x, momentum_name(x));
    }
    for (const auto& tau : file.times) {
        if (!is_identifier(tau)) throw ValidationError("invalid time name '" + tau + "'");
        table.add(Symbol{tau, SymbolKind::time});
        mts.tau.push_back(tau);
    }
    for (const auto& text : file.hamiltonians) {
        Expr h = simplify(parse(text, table));
        for (const auto& s : free_symbols(h)) {
            if (table.find(s)->kind == SymbolKind::velocity) {
                throw ValidationError("hamiltonian '" + text + "' depends on velocity " + s);
            }
        }
        mts.H.push_back(h);
    }
    return mts;
}

bool IntegrabilityReport::integrable() const noexcept {
    return std::all_of(entries.begin(), entries.end(), [](const ResidualEntry& e) { return e.zero.zero(); });
}

IntegrabilityReport integrability_residual(const MultiTimeSystem& mts, const SamplerConfig& sampling) {
    const std::size_t k = mts.n_mu();
    IntegrabilityReport rep;
    rep.R.assign(k, std::vector<Expr>(k, Expr(0)));
    for (std::size_t mu = 0; mu < k; ++mu) {
        for (std::size_t nu = mu + 1; nu < k; ++nu) {
            Expr r = simplify(differentiate(mts.H[mu], mts.tau[nu]) - differentiate(mts.H[nu], mts.tau[mu]) +
                              poisson(mts.H[mu], mts.H[nu], mts.pairs));
            rep.R[mu][nu] = r;
            rep.R[nu][mu] = simplify(-r);
            rep.entries.push_back(ResidualEntry{mu, nu, r, is_zero(r, sampling)});
        }
    }
    return rep;
}

TimePath read_path(std::istream& in, const std::string& origin) {
    TimePath path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::vector<double> point;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            const char* begin = field.c_str();
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
            if (end == begin || *end != '\0' || !std::isfinite(v)) {
                throw ParseError(origin + ":" + std::to_string(lineno) + ": not a number: '" + field + "'");
            }
            point.push_back(v);
        }
        if (!path.waypoints.empty() && point.size() != path.waypoints.front().size()) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(path.waypoints.front().size()) + " components");
        }
        path.waypoints.push_back(std::move(point));
    }
    return path;
}

TimePath load_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return read_path(in, path);
}

TimePath random_staircase(const std::vector<double>& from, const std::vector<double>& to, std::uint64_t seed) {
    if (from.size() != to.size()) throw PreconditionError("staircase endpoints differ in dimension");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pieces(1, 3);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::vector<std::pair<std::size_t, double>> moves;
    for (std::size_t axis = 0; axis < from.size(); ++axis) {
        const double delta = to[axis] - from[axis];
        if (delta == 0.0) continue;
        const int k = pieces(rng);
        std::vector<double> w(static_cast<std::size_t>(k));
        double total = 0.0;
        for (double& x : w) total += (x = weight(rng));
        for (double x : w) moves.emplace_back(axis, delta * x / total);
    }
    std::shuffle(moves.begin(), moves.end(), rng);
    TimePath path;
    path.waypoints.push_back(from);
    std::vector<double> at = from;
    std::vector<double> remaining(from.size(), 0.0);
    for (const auto& [axis, step] : moves) remaining[axis] += 1.0;
    for (const auto& [axis, step] : moves) {
        // The last piece on an axis lands exactly on the target.
        at[axis] = --remaining[axis] == 0.0 ? to[axis] : at[axis] + step;
        path.waypoints.push_back(at);
    }
    if (path.waypoints.size() == 1) path.waypoints.push_back(to);
    return path;
}

CanonicalState integrate_path(const MultiTimeSystem& mts, const TimePath& path, const CanonicalState& init,
                              int steps_per_segment) {
    const std::size_t k = mts.n_mu();
    const std::size_t r = mts.pairs.size();
    if (path.waypoints.size() < 2) throw PreconditionError("a path needs at least 2 waypoints");
    for (const auto& w : path.waypoints) {
        if (w.size() != k) {
            throw PreconditionError("waypoint has " + std::to_string(w.size()) + " components, expected " +
                                    std::to_string(k));
        }
        for (double x : w) {
            if (!std::isfinite(x)) throw PreconditionError("non-finite waypoint");
        }
    }
    if (init.q.size() != r || init.p.size() != r) throw PreconditionError("initial state does not match the system");
    if (steps_per_segment < 1) throw PreconditionError("steps per segment must be positive");

    // slots: tau..., q..., p...
    std::vector<std::string> slots = mts.tau;
    for (const auto& [q, p] : mts.pairs) slots.push_back(q);
    for (const auto& [q, p] : mts.pairs) slots.push_back(p);
    // flow[mu][j]: dq_j / dtau^mu for j < r, dp_(j-r) / dtau^mu otherwise
    std::vector<std::vector<CompiledExpr>> flow(k);
    for (std::size_t mu = 0; mu < k; ++mu) {
        for (const auto& [q, p] : mts.pairs) flow[mu].emplace_back(simplify(differentiate(mts.H[mu], p)), slots);
        for (const auto& [q, p] : mts.pairs) flow[mu].emplace_back(simplify(-differentiate(mts.H[mu], q)), slots);
    }

    std::vector<double> values(k + 2 * r);
    auto field = [&](const std::vector<double>& tau, const std::vector<double>& dir, const std::vector<double>& y,
                     std::vector<double>& dy) {
        std::copy(tau.begin(), tau.end(), values.begin());
        std::copy(y.begin(), y.end(), values.begin() + static_cast<std::ptrdiff_t>(k));
        std::fill(dy.begin(), dy.end(), 0.0);
        for (std::size_t mu = 0; mu < k; ++mu) {
            if (dir[mu] == 0.0) continue;
            for (std::size_t j = 0; j < 2 * r; ++j) dy[j] += dir[mu] * flow[mu][j](values);
        }
    };
    auto failure_state = [&](const std::vector<double>& tau, const std::vector<double>& y) {
        State s;
        s.t = tau[0];
        s.q.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(r));
        s.p.assign(y.begin() + static_cast<std::ptrdiff_t>(r), y.end());
        s.qn.assign(tau.begin() + 1, tau.end());
        return s;
    };

    std::vector<double> y = init.q;
    y.insert(y.end(), init.p.begin(), init.p.end());
    const std::size_t dim = y.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), tau(k), dir(k);
    const double h = 1.0 / steps_per_segment;
    for (std::size_t seg = 0; seg + 1 < path.waypoints.size(); ++seg) {
        const auto& a = path.waypoints[seg];
        const auto& b = path.waypoints[seg + 1];
        for (std::size_t mu = 0; mu < k; ++mu) dir[mu] = b[mu] - a[mu];
        auto at = [&](double s) {
            for (std::size_t mu = 0; mu < k; ++mu) tau[mu] = a[mu] + s * dir[mu];
            return tau;
        };
        for (int step = 0; step < steps_per_segment; ++step) {
            const double s = step * h;
            try {
                field(at(s), dir, y, k1);
                for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
                field(at(s + 0.5 * h), dir, tmp, k2);
                for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
                field(at(s + 0.5 * h), dir, tmp, k3);
                for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
                field(at(s + h), dir, tmp, k4);
            } catch (const DomainError& e) {
                throw StepFailure(std::string("evaluation failed: ") + e.what(), failure_state(at(s), y));
            }
            std::vector<double> next = y;
            for (std::size_t i = 0; i < dim; ++i) next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::all_of(next.begin(), next.end(), [](double v) { return std::isfinite(v); })) {
                throw StepFailure("non-finite state on path segment " + std::to_string(seg), failure_state(at(s), y));
            }
            y = std::move(next);
        }
    }
    CanonicalState out;
    out.q.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(r));
    out.p.assign(y.begin() + static_cast<std::ptrdiff_t>(r), y.end());
    return out;
}

}  // namespace singmech
