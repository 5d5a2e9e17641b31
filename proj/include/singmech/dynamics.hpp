#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "singmech/analysis.hpp"
#include "singmech/errors.hpp"
#include "singmech/evaluate.hpp"

namespace singmech {

/// A point of the reduced phase space (t, q^i, p_i, q^alpha).
struct State {
    double t = 0.0;
    std::vector<double> q;   // canonical coordinates
    std::vector<double> p;   // canonical momenta
    std::vector<double> qn;  // noncanonical coordinates

    /// q, then p, then qn.
    [[nodiscard]] std::vector<double> flat() const;
    [[nodiscard]] Binding binding(const PartialHamiltonianSystem& system) const;
};

/// Integration produced a non-finite value.
class StepFailure : public Error {
public:
    StepFailure(const std::string& message, State last_good) : Error(message), last_good_(std::move(last_good)) {}
    [[nodiscard]] const State& last_good() const noexcept { return last_good_; }

private:
    State last_good_;
};

enum class Method { rk4, euler };

[[nodiscard]] const char* to_string(Method m) noexcept;

struct Observable {
    std::string name;
    Expr expr;
};

struct IntegratorConfig {
    Method method = Method::rk4;
    double dt = 1e-3;
    double t_end = 1.0;
    std::vector<Observable> observables;
};

struct Trajectory {
    std::vector<State> states;
    double dt = 0.0;
    Method method = Method::rk4;
    std::vector<std::string> observable_names;
    /// values[k][j]: observable j at state k.
    std::vector<std::vector<double>> values;
    /// |H0(state k) - H0(state 0)|
    std::vector<double> h0_drift;
};

/// Time derivatives of (q^i, p_i, q^alpha):
///   q_dot^alpha from the F q_dot = G solution (gauge directions fixed to 0),
///   q_dot^i = {q^i, H0} + {q^i, H_b} q_dot^b,  p_dot_i = {p_i, H0} + {p_i, H_b} q_dot^b.
class ReducedRhs {
public:
    /// Throws InconsistentSystem.
    explicit ReducedRhs(const Analysis& analysis);

    /// In State::flat order.
    [[nodiscard]] const std::vector<Expr>& expressions() const noexcept { return exprs_; }
    /// Value slots: "t", then q, p, qn names.
    [[nodiscard]] const std::vector<std::string>& slots() const noexcept { return slots_; }

    void operator()(double t, std::span<const double> y, std::span<double> dy) const;
    [[nodiscard]] std::vector<double> operator()(const State& s) const;

private:
    std::vector<Expr> exprs_;
    std::vector<std::string> slots_;
    std::vector<CompiledExpr> compiled_;
    mutable std::vector<double> buffer_;
};

[[nodiscard]] std::vector<double> reduced_rhs(const Analysis& analysis, const State& s);

/// Builds the initial state from coordinate values and velocities. Canonical
/// momenta come from p_i = dL/dq_dot^i; a given `p_x` value overrides that.
/// Noncanonical velocities default to 0. Throws PreconditionError listing
/// every missing name.
[[nodiscard]] State initial_state(const PartialHamiltonianSystem& system, double t0, const Binding& values);

/// Fixed-step integration from `init.t` to `cfg.t_end`, with a final partial
/// step when dt does not divide the interval. Throws PreconditionError (dt <= 0,
/// dt > interval) and StepFailure.
[[nodiscard]] Trajectory integrate(const Analysis& analysis, const State& init, const IntegratorConfig& cfg);

struct ObservableResidual {
    std::vector<double> residuals;
    double max_abs = 0.0;
};

/// Per step: finite-difference dA/dt along the trajectory minus
/// dA/dt + bracket(A, H0) evaluated at the step midpoint.
[[nodiscard]] ObservableResidual evolve_observable(const Expr& A, const Analysis& analysis, const Trajectory& traj);

/// max_k |A(state k) - A(state 0)|
[[nodiscard]] double drift(const Expr& A, const Analysis& analysis, const Trajectory& traj);

/// Reference solution on the same time grid as `integrate`. Regular models
/// integrate the Euler-Lagrange equations with RK4; singular models need a
/// registered closed form matching their Lagrangian. `init` holds coordinates
/// and velocities (velocities default to 0). Throws NoOracle.
[[nodiscard]] Trajectory oracle_trajectory(const Analysis& analysis, double t0, const Binding& init,
                                           const IntegratorConfig& cfg);

/// Largest componentwise difference between two trajectories on the same grid.
[[nodiscard]] double max_state_difference(const Trajectory& a, const Trajectory& b);

/// Header `t,<coordinates>,<canonical momenta>,obs:<name>...`; %.17g values.
void write_csv(std::ostream& out, const Trajectory& traj, const PartialHamiltonianSystem& system);

}  // namespace singmech
