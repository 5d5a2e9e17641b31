#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "singmech/number.hpp"

namespace singmech {

enum class SymbolKind { coordinate, velocity, momentum, time, parameter };

[[nodiscard]] const char* to_string(SymbolKind kind) noexcept;

struct Symbol {
    std::string name;
    SymbolKind kind = SymbolKind::coordinate;

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Fixed naming rule: the velocity of `x` is `x_dot`, its momentum `p_x`.
[[nodiscard]] std::string velocity_name(const std::string& coordinate);
[[nodiscard]] std::string momentum_name(const std::string& coordinate);
inline constexpr const char* kTimeName = "t";

enum class NodeKind { constant, symbol, add, mul, pow, neg, div, func };
enum class Func { sin, cos, exp, log };

[[nodiscard]] const char* to_string(Func f) noexcept;

struct Node;

/// Immutable expression tree with value semantics. Copies share structure.
///
/// Trees built by the arithmetic operators are raw; `simplify` brings them to
/// the normal form (flattened sums and products, folded rational constants,
/// like terms merged, sums multiplied out). `neg` and `div` nodes only occur
/// in raw trees.
class Expr {
public:
    Expr();  // the constant 0
    Expr(Number value);  // NOLINT(google-explicit-constructor)
    Expr(std::int64_t value) : Expr(Number(value)) {}  // NOLINT(google-explicit-constructor)
    Expr(int value) : Expr(Number(static_cast<std::int64_t>(value))) {}  // NOLINT(google-explicit-constructor)

    static Expr symbol(std::string name);
    static Expr add(std::vector<Expr> terms);
    static Expr mul(std::vector<Expr> factors);
    static Expr pow(Expr base, std::int64_t exponent);
    static Expr neg(Expr operand);
    static Expr div(Expr numerator, Expr denominator);
    static Expr func(Func f, Expr argument);

    [[nodiscard]] NodeKind kind() const noexcept;
    [[nodiscard]] const Node& node() const noexcept { return *node_; }

    [[nodiscard]] bool is_constant() const noexcept { return kind() == NodeKind::constant; }
    [[nodiscard]] bool is_symbol() const noexcept { return kind() == NodeKind::symbol; }
    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] bool is_one() const noexcept;

    /// Valid only for the matching kinds.
    [[nodiscard]] const Number& value() const;
    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] const std::vector<Expr>& children() const;
    [[nodiscard]] std::int64_t exponent() const;
    [[nodiscard]] Func function() const;

    /// Renders in the grammar `parse` accepts.
    [[nodiscard]] std::string str() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Node {
    NodeKind kind = NodeKind::constant;
    Number value;
    std::string name;
    Func function = Func::sin;
    std::int64_t exponent = 0;
    std::vector<Expr> children;
};

/// Structural total order (used for canonical term ordering).
[[nodiscard]] int compare(const Expr& a, const Expr& b);
[[nodiscard]] bool structurally_equal(const Expr& a, const Expr& b);

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

inline Expr sin(const Expr& e) { return Expr::func(Func::sin, e); }
inline Expr cos(const Expr& e) { return Expr::func(Func::cos, e); }
inline Expr exp(const Expr& e) { return Expr::func(Func::exp, e); }
inline Expr log(const Expr& e) { return Expr::func(Func::log, e); }
inline Expr pow(const Expr& base, std::int64_t exponent) { return Expr::pow(base, exponent); }

[[nodiscard]] Expr simplify(const Expr& e);

[[nodiscard]] std::set<std::string> free_symbols(const Expr& e);
[[nodiscard]] bool depends_on(const Expr& e, const std::string& symbol);

/// Exact partial derivative; every other symbol is independent. Simplified.
[[nodiscard]] Expr differentiate(const Expr& e, const std::string& symbol);

/// Simultaneous substitution (replacements are not themselves rewritten), then
/// simplification.
[[nodiscard]] Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);

}  // namespace singmech
