#pragma once

#include <map>
#include <string>
#include <vector>

#include "singmech/expr.hpp"
#include "singmech/parse.hpp"

namespace singmech {

/// A Lagrangian L(t, q, q_dot) over named coordinates. Parameter values are
/// folded into `lagrangian()` as exact constants where possible.
class LagrangianModel {
public:
    /// Throws ValidationError (empty or duplicate coordinates, reserved or
    /// malformed names, undeclared symbols in the Lagrangian) or SyntaxError.
    LagrangianModel(std::string name, std::vector<std::string> coordinates, const std::string& lagrangian,
                    std::map<std::string, double> parameters = {});

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<std::string>& coordinates() const noexcept { return coordinates_; }
    [[nodiscard]] std::size_t n() const noexcept { return coordinates_.size(); }
    [[nodiscard]] const Expr& lagrangian() const noexcept { return lagrangian_; }
    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] const std::map<std::string, double>& parameters() const noexcept { return parameters_; }

    [[nodiscard]] std::string velocity(std::size_t a) const { return velocity_name(coordinates_.at(a)); }
    [[nodiscard]] std::string momentum(std::size_t a) const { return momentum_name(coordinates_.at(a)); }
    [[nodiscard]] std::vector<std::string> velocities() const;
    [[nodiscard]] std::vector<std::string> momenta() const;

    /// Coordinates, velocities, momenta and t. Parameters are not included:
    /// they have been substituted away.
    [[nodiscard]] const SymbolTable& symbols() const noexcept { return symbols_; }

    /// Parses `text` against this model's symbols and simplifies it.
    [[nodiscard]] Expr expression(const std::string& text) const;

private:
    std::string name_;
    std::vector<std::string> coordinates_;
    std::string source_;
    std::map<std::string, double> parameters_;
    SymbolTable symbols_;
    Expr lagrangian_;
};

/// True for [A-Za-z_][A-Za-z0-9_]* that is not a function name.
[[nodiscard]] bool is_identifier(const std::string& s);

}  // namespace singmech
