#include "singmech/expr.hpp"

#include <stdexcept>

namespace singmech {

const char* to_string(SymbolKind kind) noexcept {
    switch (kind) {
        case SymbolKind::coordinate: return "coordinate";
        case SymbolKind::velocity: return "velocity";
        case SymbolKind::momentum: return "momentum";
        case SymbolKind::time: return "time";
        case SymbolKind::parameter: return "parameter";
    }
    return "?";
}

const char* to_string(Func f) noexcept {
    switch (f) {
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::exp: return "exp";
        case Func::log: return "log";
    }
    return "?";
}

std::string velocity_name(const std::string& coordinate) { return coordinate + "_dot"; }
std::string momentum_name(const std::string& coordinate) { return "p_" + coordinate; }

namespace {

std::shared_ptr<const Node> zero_node() {
    static const auto node = std::make_shared<const Node>();
    return node;
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr::Expr(Number value) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->value = value;
    node_ = std::move(n);
}

Expr Expr::symbol(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::symbol;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
    if (terms.empty()) return Expr();
    if (terms.size() == 1) return terms.front();
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::add;
    n->children = std::move(terms);
    return Expr(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
    if (factors.empty()) return Expr(1);
    if (factors.size() == 1) return factors.front();
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::mul;
    n->children = std::move(factors);
    return Expr(std::move(n));
}

Expr Expr::pow(Expr base, std::int64_t exponent) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::pow;
    n->exponent = exponent;
    n->children = {std::move(base)};
    return Expr(std::move(n));
}

Expr Expr::neg(Expr operand) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::neg;
    n->children = {std::move(operand)};
    return Expr(std::move(n));
}

Expr Expr::div(Expr numerator, Expr denominator) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::div;
    n->children = {std::move(numerator), std::move(denominator)};
    return Expr(std::move(n));
}

Expr Expr::func(Func f, Expr argument) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::func;
    n->function = f;
    n->children = {std::move(argument)};
    return Expr(std::move(n));
}

NodeKind Expr::kind() const noexcept { return node_->kind; }

bool Expr::is_zero() const noexcept { return is_constant() && node_->value.is_zero(); }
bool Expr::is_one() const noexcept { return is_constant() && node_->value.is_one(); }

const Number& Expr::value() const {
    if (!is_constant()) throw std::logic_error("Expr::value on non-constant");
    return node_->value;
}

const std::string& Expr::name() const {
    if (!is_symbol()) throw std::logic_error("Expr::name on non-symbol");
    return node_->name;
}

const std::vector<Expr>& Expr::children() const { return node_->children; }

std::int64_t Expr::exponent() const {
    if (kind() != NodeKind::pow) throw std::logic_error("Expr::exponent on non-power");
    return node_->exponent;
}

Func Expr::function() const {
    if (kind() != NodeKind::func) throw std::logic_error("Expr::function on non-function");
    return node_->function;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, Expr::neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::div(a, b); }
Expr operator-(const Expr& a) { return Expr::neg(a); }

int compare(const Expr& a, const Expr& b) {
    if (&a.node() == &b.node()) return 0;
    auto ka = static_cast<int>(a.kind());
    auto kb = static_cast<int>(b.kind());
    if (ka != kb) return ka < kb ? -1 : 1;
    switch (a.kind()) {
        case NodeKind::constant: return a.value().compare(b.value());
        case NodeKind::symbol: {
            int c = a.name().compare(b.name());
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case NodeKind::pow: {
            int c = compare(a.children()[0], b.children()[0]);
            if (c != 0) return c;
            if (a.exponent() != b.exponent()) return a.exponent() < b.exponent() ? -1 : 1;
            return 0;
        }
        case NodeKind::func:
            if (a.function() != b.function()) return a.function() < b.function() ? -1 : 1;
            return compare(a.children()[0], b.children()[0]);
        default: {
            const auto& ca = a.children();
            const auto& cb = b.children();
            std::size_t n = std::min(ca.size(), cb.size());
            for (std::size_t i = 0; i < n; ++i) {
                int c = compare(ca[i], cb[i]);
                if (c != 0) return c;
            }
            if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
            return 0;
        }
    }
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (&a.node() == &b.node()) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case NodeKind::constant: return a.value() == b.value();
        case NodeKind::symbol: return a.name() == b.name();
        case NodeKind::pow:
            if (a.exponent() != b.exponent()) return false;
            break;
        case NodeKind::func:
            if (a.function() != b.function()) return false;
            break;
        default: break;
    }
    const auto& ca = a.children();
    const auto& cb = b.children();
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (!structurally_equal(ca[i], cb[i])) return false;
    }
    return true;
}

namespace {

// Binding strength of the rendered text, used to decide on parentheses.
enum Prec { kAdd = 1, kMul = 2, kUnary = 3, kPow = 4, kAtom = 5 };

struct Rendered {
    std::string text;
    int prec;
};

Rendered render(const Expr& e);

std::string wrap(const Expr& e, int min_prec) {
    Rendered r = render(e);
    if (r.prec < min_prec) return "(" + r.text + ")";
    return r.text;
}

Rendered render_number(const Number& n) {
    std::string s = n.to_string();
    if (n.is_negative()) return {s, kUnary};
    if (n.is_exact() && !n.is_integer()) return {s, kMul};
    return {s, kAtom};
}

// A term that reads better after a binary minus: negative constants and
// products with a negative leading coefficient.
bool negative_term(const Expr& e) {
    if (e.is_constant()) return e.value().is_negative();
    if (e.kind() == NodeKind::mul && !e.children().empty() && e.children()[0].is_constant()) {
        return e.children()[0].value().is_negative();
    }
    return e.kind() == NodeKind::neg;
}

Expr negate_term(const Expr& e) {
    if (e.is_constant()) return Expr(-e.value());
    if (e.kind() == NodeKind::neg) return e.children()[0];
    std::vector<Expr> f = e.children();
    Number c = -f[0].value();
    if (c.is_one()) f.erase(f.begin());
    else f[0] = Expr(c);
    return Expr::mul(std::move(f));
}

Rendered render_mul(const Expr& e) {
    const auto& f = e.children();
    std::size_t start = 0;
    std::string coef;
    if (!f.empty() && f[0].is_constant()) {
        const Number& c = f[0].value();
        if (c.is_negative()) {
            // "-2*x/y" reads back as ((-2)*x)/y, the same product.
            return {"-" + wrap(negate_term(e), kMul), kMul};
        }
        if (!c.is_one()) coef = c.to_string();
        start = 1;
    }
    std::string num;
    std::string den;
    for (std::size_t i = start; i < f.size(); ++i) {
        const Expr& x = f[i];
        if (x.kind() == NodeKind::pow && x.exponent() < 0) {
            Expr inv = x.exponent() == -1 ? x.children()[0] : Expr::pow(x.children()[0], -x.exponent());
            den += "/" + wrap(inv, kUnary);
        } else {
            if (!num.empty()) num += "*";
            num += wrap(x, kUnary);
        }
    }
    std::string out = coef;
    if (!num.empty()) out += (out.empty() ? "" : "*") + num;
    if (out.empty()) out = "1";
    out += den;
    return {out, kMul};
}

Rendered render(const Expr& e) {
    switch (e.kind()) {
        case NodeKind::constant: return render_number(e.value());
        case NodeKind::symbol: return {e.name(), kAtom};
        case NodeKind::func:
            return {std::string(to_string(e.function())) + "(" + render(e.children()[0]).text + ")", kAtom};
        case NodeKind::pow: {
            const Expr& base = e.children()[0];
            if (e.exponent() < 0) {
                Expr inv = e.exponent() == -1 ? base : Expr::pow(base, -e.exponent());
                return {"1/" + wrap(inv, kUnary), kMul};
            }
            return {wrap(base, kAtom) + "^" + std::to_string(e.exponent()), kPow};
        }
        case NodeKind::neg: return {"-" + wrap(e.children()[0], kUnary), kUnary};
        case NodeKind::div:
            return {wrap(e.children()[0], kMul) + "/" + wrap(e.children()[1], kUnary), kMul};
        case NodeKind::mul: return render_mul(e);
        case NodeKind::add: {
            std::string out;
            bool first = true;
            for (const Expr& t : e.children()) {
                if (first) {
                    out = wrap(t, kAdd);
                    first = false;
                } else if (negative_term(t)) {
                    out += " - " + wrap(negate_term(t), kMul);
                } else {
                    out += " + " + wrap(t, kMul);
                }
            }
            return {out, kAdd};
        }
    }
    return {"?", kAtom};
}

void collect_symbols(const Expr& e, std::set<std::string>& out) {
    if (e.is_symbol()) {
        out.insert(e.name());
        return;
    }
    for (const Expr& c : e.children()) collect_symbols(c, out);
}

}  // namespace

std::string Expr::str() const { return render(*this).text; }

std::set<std::string> free_symbols(const Expr& e) {
    std::set<std::string> out;
    collect_symbols(e, out);
    return out;
}

bool depends_on(const Expr& e, const std::string& symbol) {
    if (e.is_symbol()) return e.name() == symbol;
    for (const Expr& c : e.children()) {
        if (depends_on(c, symbol)) return true;
    }
    return false;
}

}  // namespace singmech
