#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "singmech/expr.hpp"

namespace singmech {

/// Symbol name -> value.
using Binding = std::map<std::string, double>;

/// Throws UnboundSymbol or DomainError (log of a non-positive value, division
/// by zero).
[[nodiscard]] double evaluate(const Expr& e, const Binding& b);

/// An expression lowered to a flat stack program over a fixed slot layout,
/// for tight loops (integrators, samplers).
class CompiledExpr {
public:
    /// `slots` names the value positions `operator()` will read. Throws
    /// UnboundSymbol if `e` uses a name outside `slots`.
    CompiledExpr(const Expr& e, const std::vector<std::string>& slots);

    [[nodiscard]] double operator()(std::span<const double> values) const;

private:
    enum class Op : unsigned char { push_const, push_slot, add, mul, pow, sin, cos, exp, log, neg, div };
    struct Instr {
        Op op;
        int arity_or_slot = 0;
        std::int64_t exponent = 0;
        double constant = 0.0;
    };
    void emit(const Expr& e, const std::vector<std::string>& slots);

    std::vector<Instr> code_;
    std::size_t max_stack_ = 0;
};

}  // namespace singmech
