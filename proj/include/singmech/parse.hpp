#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "singmech/expr.hpp"

namespace singmech {

/// Names an expression may refer to. Names are unique; a symbol's kind is fixed
/// when it is registered.
class SymbolTable {
public:
    /// Throws ValidationError on a duplicate name.
    void add(Symbol symbol);
    /// Registers `name` (coordinate), `name_dot` (velocity) and `p_name` (momentum).
    void add_coordinate(const std::string& name);

    [[nodiscard]] bool contains(const std::string& name) const { return symbols_.count(name) != 0; }
    [[nodiscard]] std::optional<Symbol> find(const std::string& name) const;
    [[nodiscard]] std::vector<Symbol> symbols() const;

private:
    std::map<std::string, Symbol> symbols_;
};

/// Infix parser. Binding, loosest first: `+ -`, `* /`, unary minus, `^`
/// (right-associative, integer exponents only). Calls: sin, cos, exp, log.
///
/// Throws SyntaxError (1-based position) or UnknownSymbol. Returns the raw
/// tree; call `simplify` for the normal form.
[[nodiscard]] Expr parse(std::string_view text, const SymbolTable& context);

}  // namespace singmech
