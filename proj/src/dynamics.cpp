#include "singmech/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>

#include "singmech/linalg.hpp"

namespace singmech {

const char* to_string(Method m) noexcept { return m == Method::rk4 ? "rk4" : "euler"; }

std::vector<double> State::flat() const {
    std::vector<double> y = q;
    y.insert(y.end(), p.begin(), p.end());
    y.insert(y.end(), qn.begin(), qn.end());
    return y;
}

Binding State::binding(const PartialHamiltonianSystem& system) const {
    Binding b{{kTimeName, t}};
    for (std::size_t i = 0; i < system.r(); ++i) {
        b[system.q[i]] = q.at(i);
        b[system.p[i]] = p.at(i);
    }
    for (std::size_t a = 0; a < system.m(); ++a) b[system.qn[a]] = qn.at(a);
    return b;
}

namespace {

std::vector<std::string> state_slots(const PartialHamiltonianSystem& s) {
    std::vector<std::string> slots{kTimeName};
    slots.insert(slots.end(), s.q.begin(), s.q.end());
    slots.insert(slots.end(), s.p.begin(), s.p.end());
    slots.insert(slots.end(), s.qn.begin(), s.qn.end());
    return slots;
}

State unflatten(double t, const std::vector<double>& y, std::size_t r, std::size_t m) {
    State s;
    s.t = t;
    s.q.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(r));
    s.p.assign(y.begin() + static_cast<std::ptrdiff_t>(r), y.begin() + static_cast<std::ptrdiff_t>(2 * r));
    s.qn.assign(y.begin() + static_cast<std::ptrdiff_t>(2 * r), y.begin() + static_cast<std::ptrdiff_t>(2 * r + m));
    return s;
}

using Field = std::function<void(double, std::span<const double>, std::span<double>)>;

// Times t0 + k dt up to t_end, plus t_end itself when dt does not divide the
// interval.
std::vector<double> time_grid(double t0, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
    if (!(t_end - t0 >= dt * (1.0 - 1e-12))) throw PreconditionError("dt exceeds the integration interval");
    const double span = t_end - t0;
    auto steps = static_cast<std::int64_t>(std::floor(span / dt + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps) + 2);
    for (std::int64_t k = 0; k <= steps; ++k) grid.push_back(t0 + static_cast<double>(k) * dt);
    if (t_end - grid.back() > 1e-9 * dt) grid.push_back(t_end);
    else grid.back() = t_end;
    return grid;
}

bool all_finite(const std::vector<double>& y) {
    for (double v : y) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

// One explicit step of size h.
void step(const Field& f, Method method, double t, double h, std::vector<double>& y) {
    const std::size_t n = y.size();
    if (method == Method::euler) {
        std::vector<double> k(n);
        f(t, y, k);
        for (std::size_t i = 0; i < n; ++i) y[i] += h * k[i];
        return;
    }
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    f(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    f(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Runs `f` over `grid`, calling `record` with every accepted (t, y).
void run(const Field& f, Method method, const std::vector<double>& grid, std::vector<double> y,
         const std::function<void(double, const std::vector<double>&)>& record,
         const std::function<State(double, const std::vector<double>&)>& as_state) {
    record(grid[0], y);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        std::vector<double> next = y;
        try {
            step(f, method, grid[k - 1], grid[k] - grid[k - 1], next);
        } catch (const DomainError& e) {
            throw StepFailure(std::string("evaluation failed: ") + e.what(), as_state(grid[k - 1], y));
        }
        if (!all_finite(next)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "non-finite state at t = %.17g", grid[k]);
            throw StepFailure(buf, as_state(grid[k - 1], y));
        }
        try {
            record(grid[k], next);
        } catch (const DomainError& e) {
            throw StepFailure(std::string("evaluation failed: ") + e.what(), as_state(grid[k - 1], y));
        }
        y = std::move(next);
    }
}

}  // namespace

ReducedRhs::ReducedRhs(const Analysis& analysis) : slots_(state_slots(analysis.system)) {
    const auto& sys = analysis.system;
    std::map<std::string, Expr> vel;
    if (sys.m() > 0) vel = solve_noncanonical_velocities(analysis.fg, analysis.classification, sys);

    auto flow = [&](const Expr& x) {
        std::vector<Expr> terms{poisson_reduced(x, sys.H0, sys)};
        for (std::size_t b = 0; b < sys.m(); ++b) {
            const Expr& u = vel.at(sys.vn[b]);
            if (u.is_zero()) continue;
            terms.push_back(poisson_reduced(x, sys.H_alpha[b], sys) * u);
        }
        return simplify(Expr::add(std::move(terms)));
    };
    for (const auto& name : sys.q) exprs_.push_back(flow(Expr::symbol(name)));
    for (const auto& name : sys.p) exprs_.push_back(flow(Expr::symbol(name)));
    for (const auto& name : sys.vn) exprs_.push_back(vel.at(name));
    for (const Expr& e : exprs_) compiled_.emplace_back(e, slots_);
    buffer_.resize(slots_.size());
}

void ReducedRhs::operator()(double t, std::span<const double> y, std::span<double> dy) const {
    buffer_[0] = t;
    std::copy(y.begin(), y.end(), buffer_.begin() + 1);
    for (std::size_t i = 0; i < compiled_.size(); ++i) dy[i] = compiled_[i](buffer_);
}

std::vector<double> ReducedRhs::operator()(const State& s) const {
    std::vector<double> y = s.flat();
    std::vector<double> dy(y.size());
    (*this)(s.t, y, dy);
    return dy;
}

std::vector<double> reduced_rhs(const Analysis& analysis, const State& s) { return ReducedRhs(analysis)(s); }

State initial_state(const PartialHamiltonianSystem& system, double t0, const Binding& values) {
    const auto& model = system.model;
    std::vector<std::string> missing;
    Binding b = values;
    b[kTimeName] = t0;
    for (const auto& q : model.coordinates()) {
        if (values.count(q) == 0) missing.push_back(q);
    }
    for (std::size_t i = 0; i < system.r(); ++i) {
        if (values.count(system.p[i]) == 0 && values.count(system.v[i]) == 0) missing.push_back(system.v[i]);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw PreconditionError("missing initial values: " + list);
    }
    for (const auto& v : system.vn) b.emplace(v, 0.0);

    State s;
    s.t = t0;
    for (std::size_t i = 0; i < system.r(); ++i) {
        s.q.push_back(values.at(system.q[i]));
        auto given = values.find(system.p[i]);
        if (given != values.end()) {
            s.p.push_back(given->second);
        } else {
            Binding full = b;
            for (std::size_t j = 0; j < system.r(); ++j) full.emplace(system.v[j], 0.0);
            s.p.push_back(evaluate(system.momenta_defs[i], full));
        }
    }
    for (const auto& q : system.qn) s.qn.push_back(values.at(q));
    return s;
}

Trajectory integrate(const Analysis& analysis, const State& init, const IntegratorConfig& cfg) {
    const auto& sys = analysis.system;
    const ReducedRhs rhs(analysis);
    const std::vector<double> grid = time_grid(init.t, cfg.t_end, cfg.dt);

    Trajectory traj;
    traj.dt = cfg.dt;
    traj.method = cfg.method;
    std::vector<CompiledExpr> obs;
    for (const auto& o : cfg.observables) {
        traj.observable_names.push_back(o.name);
        obs.emplace_back(o.expr, rhs.slots());
    }
    const CompiledExpr h0(sys.H0, rhs.slots());
    traj.states.reserve(grid.size());

    std::vector<double> slot_values(rhs.slots().size());
    double h0_start = 0.0;
    auto record = [&](double t, const std::vector<double>& y) {
        traj.states.push_back(unflatten(t, y, sys.r(), sys.m()));
        slot_values[0] = t;
        std::copy(y.begin(), y.end(), slot_values.begin() + 1);
        std::vector<double> row;
        for (const auto& c : obs) row.push_back(c(slot_values));
        traj.values.push_back(std::move(row));
        double h = h0(slot_values);
        if (traj.h0_drift.empty()) h0_start = h;
        traj.h0_drift.push_back(std::fabs(h - h0_start));
    };
    auto field = [&rhs](double t, std::span<const double> y, std::span<double> dy) { rhs(t, y, dy); };
    auto as_state = [&](double t, const std::vector<double>& y) { return unflatten(t, y, sys.r(), sys.m()); };
    run(field, cfg.method, grid, init.flat(), record, as_state);
    return traj;
}

namespace {

std::vector<double> values_of(const CompiledExpr& f, const Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.states.size());
    std::vector<double> slots;
    for (const State& s : traj.states) {
        slots.assign(1, s.t);
        auto y = s.flat();
        slots.insert(slots.end(), y.begin(), y.end());
        out.push_back(f(slots));
    }
    return out;
}

}  // namespace

ObservableResidual evolve_observable(const Expr& A, const Analysis& analysis, const Trajectory& traj) {
    const auto& sys = analysis.system;
    const auto slots = state_slots(sys);
    const CompiledExpr a(A, slots);
    const Expr rate = simplify(differentiate(A, kTimeName) + bracket(A, sys.H0, sys, analysis.classification));
    const CompiledExpr predicted(rate, slots);
    const auto values = values_of(a, traj);

    ObservableResidual out;
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        const State& s0 = traj.states[k];
        const State& s1 = traj.states[k + 1];
        const double h = s1.t - s0.t;
        std::vector<double> mid{0.5 * (s0.t + s1.t)};
        auto y0 = s0.flat(), y1 = s1.flat();
        for (std::size_t i = 0; i < y0.size(); ++i) mid.push_back(0.5 * (y0[i] + y1[i]));
        const double r = (values[k + 1] - values[k]) / h - predicted(mid);
        out.residuals.push_back(r);
        out.max_abs = std::max(out.max_abs, std::fabs(r));
    }
    return out;
}

double drift(const Expr& A, const Analysis& analysis, const Trajectory& traj) {
    const CompiledExpr a(A, state_slots(analysis.system));
    const auto values = values_of(a, traj);
    double worst = 0.0;
    for (double v : values) worst = std::max(worst, std::fabs(v - values.front()));
    return worst;
}

namespace {

// Closed-form solutions keyed by fixture name. Each entry is used only when
// the model's Lagrangian is the registered one.
struct ClosedForm {
    const char* name;
    std::vector<std::string> coordinates;
    const char* lagrangian;
    // (elapsed time, initial coordinates and velocities) -> coordinates and momenta
    std::function<Binding(double, const Binding&)> solution;
};

double get(const Binding& b, const std::string& k) {
    auto it = b.find(k);
    return it == b.end() ? 0.0 : it->second;
}

const std::vector<ClosedForm>& registry() {
    static const std::vector<ClosedForm> forms{
        {"S1", {"q1", "q2"}, "q1_dot*q2 - 0.5*(q1^2 + q2^2)",
         [](double t, const Binding& i) {
             const double a = get(i, "q1"), b = get(i, "q2");
             return Binding{{"q1", a * std::cos(t) + b * std::sin(t)}, {"q2", b * std::cos(t) - a * std::sin(t)}};
         }},
        {"S2", {"q1", "q2", "q3"}, "q1_dot*q2 - 0.5*(q1^2 + q2^2)",
         [](double t, const Binding& i) {
             const double a = get(i, "q1"), b = get(i, "q2");
             return Binding{{"q1", a * std::cos(t) + b * std::sin(t)},
                            {"q2", b * std::cos(t) - a * std::sin(t)},
                            {"q3", get(i, "q3")}};
         }},
        {"G1", {"q1", "q2"}, "0.5*q1_dot^2",
         [](double t, const Binding& i) {
             const double v = get(i, "q1_dot");
             return Binding{{"q1", get(i, "q1") + v * t}, {"p_q1", v}, {"q2", get(i, "q2")}};
         }},
    };
    return forms;
}

Trajectory closed_form_trajectory(const Analysis& analysis, const ClosedForm& form, double t0, const Binding& init,
                                  const std::vector<double>& grid) {
    const auto& sys = analysis.system;
    Trajectory traj;
    for (double t : grid) {
        Binding b = form.solution(t - t0, init);
        State s;
        s.t = t;
        for (std::size_t i = 0; i < sys.r(); ++i) {
            s.q.push_back(b.at(sys.q[i]));
            s.p.push_back(b.at(sys.p[i]));
        }
        for (const auto& q : sys.qn) s.qn.push_back(b.at(q));
        traj.states.push_back(std::move(s));
    }
    return traj;
}

Trajectory euler_lagrange_trajectory(const Analysis& analysis, const Binding& init,
                                     const std::vector<double>& grid, Method method) {
    const auto& sys = analysis.system;
    const auto& model = sys.model;
    const std::size_t n = model.n();
    const auto coords = model.coordinates();
    const auto vels = model.velocities();

    std::vector<std::string> slots{kTimeName};
    slots.insert(slots.end(), coords.begin(), coords.end());
    slots.insert(slots.end(), vels.begin(), vels.end());

    // W qdd = dL/dq - (d2L/dv dq) v - d2L/dv dt
    const ExprMatrix W = analysis.rank.report.W;
    std::vector<CompiledExpr> w, force;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) w.emplace_back(W[a][b], slots);
        const Expr dLdv = differentiate(model.lagrangian(), vels[a]);
        std::vector<Expr> terms{differentiate(model.lagrangian(), coords[a]), -differentiate(dLdv, kTimeName)};
        for (std::size_t b = 0; b < n; ++b) {
            terms.push_back(-(differentiate(dLdv, coords[b]) * Expr::symbol(vels[b])));
        }
        force.emplace_back(simplify(Expr::add(std::move(terms))), slots);
    }
    std::vector<CompiledExpr> momenta;
    for (const Expr& p : sys.momenta_defs) momenta.emplace_back(p, slots);

    std::vector<double> buf(slots.size());
    auto field = [&](double t, std::span<const double> y, std::span<double> dy) {
        buf[0] = t;
        std::copy(y.begin(), y.end(), buf.begin() + 1);
        Matrix M(n, n);
        std::vector<double> rhs(n);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) M(a, b) = w[a * n + b](buf);
            rhs[a] = force[a](buf);
        }
        auto acc = solve(M, rhs);
        for (std::size_t a = 0; a < n; ++a) {
            dy[a] = y[n + a];
            dy[n + a] = acc[a];
        }
    };

    // Canonical order of the reduced state is the partition order.
    const auto& order = sys.partition.canonical;
    Trajectory traj;
    auto as_state = [&](double t, const std::vector<double>& y) {
        buf[0] = t;
        std::copy(y.begin(), y.end(), buf.begin() + 1);
        State s;
        s.t = t;
        for (std::size_t i = 0; i < order.size(); ++i) {
            s.q.push_back(y[order[i]]);
            s.p.push_back(momenta[i](buf));
        }
        return s;
    };
    auto record = [&](double t, const std::vector<double>& y) { traj.states.push_back(as_state(t, y)); };

    std::vector<double> y0;
    for (const auto& q : coords) {
        auto it = init.find(q);
        if (it == init.end()) throw PreconditionError("missing initial value: " + q);
        y0.push_back(it->second);
    }
    for (const auto& v : vels) y0.push_back(get(init, v));
    run(field, method, grid, y0, record, as_state);
    return traj;
}

}  // namespace

Trajectory oracle_trajectory(const Analysis& analysis, double t0, const Binding& init, const IntegratorConfig& cfg) {
    const std::vector<double> grid = time_grid(t0, cfg.t_end, cfg.dt);
    const auto& model = analysis.system.model;
    Trajectory traj;
    if (analysis.classification.verdict == Verdict::regular) {
        traj = euler_lagrange_trajectory(analysis, init, grid, cfg.method);
    } else {
        const ClosedForm* match = nullptr;
        for (const auto& form : registry()) {
            if (model.name() != form.name || model.coordinates() != form.coordinates) continue;
            if (structurally_equal(model.lagrangian(), model.expression(form.lagrangian))) match = &form;
        }
        if (match == nullptr) throw NoOracle("no reference solution registered for model '" + model.name() + "'");
        traj = closed_form_trajectory(analysis, *match, t0, init, grid);
    }
    traj.dt = cfg.dt;
    traj.method = cfg.method;
    return traj;
}

double max_state_difference(const Trajectory& a, const Trajectory& b) {
    if (a.states.size() != b.states.size()) throw PreconditionError("trajectories have different grids");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        auto x = a.states[k].flat(), y = b.states[k].flat();
        if (x.size() != y.size()) throw PreconditionError("trajectories have different dimensions");
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::fabs(x[i] - y[i]));
    }
    return worst;
}

void write_csv(std::ostream& out, const Trajectory& traj, const PartialHamiltonianSystem& system) {
    const auto& model = system.model;
    out << "t";
    for (const auto& q : model.coordinates()) out << ',' << q;
    for (const auto& p : system.p) out << ',' << p;
    for (const auto& name : traj.observable_names) out << ",obs:" << name;
    out << '\n';

    // Column for each declared coordinate: canonical slot or noncanonical slot.
    std::vector<std::pair<bool, std::size_t>> where(model.n());
    for (std::size_t i = 0; i < system.partition.canonical.size(); ++i) where[system.partition.canonical[i]] = {true, i};
    for (std::size_t a = 0; a < system.partition.noncanonical.size(); ++a) {
        where[system.partition.noncanonical[a]] = {false, a};
    }
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const State& s = traj.states[k];
        put(s.t);
        for (const auto& [canonical, i] : where) {
            out << ',';
            put(canonical ? s.q[i] : s.qn[i]);
        }
        for (double p : s.p) {
            out << ',';
            put(p);
        }
        if (k < traj.values.size()) {
            for (double v : traj.values[k]) {
                out << ',';
                put(v);
            }
        }
        out << '\n';
    }
}

}  // namespace singmech
