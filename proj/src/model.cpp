#include "singmech/model.hpp"

#include <cctype>

#include "singmech/errors.hpp"

namespace singmech {

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return s != "sin" && s != "cos" && s != "exp" && s != "log";
}

LagrangianModel::LagrangianModel(std::string name, std::vector<std::string> coordinates, const std::string& lagrangian,
                                 std::map<std::string, double> parameters)
    : name_(std::move(name)), coordinates_(std::move(coordinates)), source_(lagrangian),
      parameters_(std::move(parameters)) {
    if (coordinates_.empty()) throw ValidationError("model declares no coordinates");
    symbols_.add({kTimeName, SymbolKind::time});
    for (const auto& q : coordinates_) {
        if (!is_identifier(q)) throw ValidationError("invalid coordinate name '" + q + "'");
        if (symbols_.contains(q)) throw ValidationError("duplicate coordinate '" + q + "'");
        symbols_.add_coordinate(q);
    }

    SymbolTable with_parameters = symbols_;
    std::map<std::string, Expr> values;
    for (const auto& [p, v] : parameters_) {
        if (!is_identifier(p)) throw ValidationError("invalid parameter name '" + p + "'");
        with_parameters.add({p, SymbolKind::parameter});
        values.emplace(p, Expr(Number::from_double(v)));
    }
    try {
        lagrangian_ = simplify(substitute(parse(lagrangian, with_parameters), values));
    } catch (const UnknownSymbol& e) {
        throw ValidationError("lagrangian references undeclared symbol '" + e.name() + "'");
    }
    for (const auto& s : free_symbols(lagrangian_)) {
        if (symbols_.find(s)->kind == SymbolKind::momentum) {
            throw ValidationError("lagrangian references momentum '" + s + "'");
        }
    }
}

std::vector<std::string> LagrangianModel::velocities() const {
    std::vector<std::string> out;
    for (const auto& q : coordinates_) out.push_back(velocity_name(q));
    return out;
}

std::vector<std::string> LagrangianModel::momenta() const {
    std::vector<std::string> out;
    for (const auto& q : coordinates_) out.push_back(momentum_name(q));
    return out;
}

Expr LagrangianModel::expression(const std::string& text) const { return simplify(parse(text, symbols_)); }

}  // namespace singmech
