#include "singmech/parse.hpp"

#include <cctype>

#include "singmech/errors.hpp"

namespace singmech {

void SymbolTable::add(Symbol symbol) {
    if (symbols_.count(symbol.name) != 0) {
        throw ValidationError("duplicate symbol '" + symbol.name + "'");
    }
    std::string key = symbol.name;
    symbols_.emplace(std::move(key), std::move(symbol));
}

void SymbolTable::add_coordinate(const std::string& name) {
    add({name, SymbolKind::coordinate});
    add({velocity_name(name), SymbolKind::velocity});
    add({momentum_name(name), SymbolKind::momentum});
}

std::optional<Symbol> SymbolTable::find(const std::string& name) const {
    auto it = symbols_.find(name);
    if (it == symbols_.end()) return std::nullopt;
    return it->second;
}

std::vector<Symbol> SymbolTable::symbols() const {
    std::vector<Symbol> out;
    out.reserve(symbols_.size());
    for (const auto& [name, s] : symbols_) out.push_back(s);
    return out;
}

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t pos;  // 1-based
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        std::size_t start = i_;
        if (i_ >= src_.size()) return {Tok::end, {}, start + 1};
        char c = src_[i_];
        auto single = [&](Tok k) {
            ++i_;
            return Token{k, src_.substr(start, 1), start + 1};
        };
        switch (c) {
            case '+': return single(Tok::plus);
            case '-': return single(Tok::minus);
            case '*': return single(Tok::star);
            case '/': return single(Tok::slash);
            case '^': return single(Tok::caret);
            case '(': return single(Tok::lparen);
            case ')': return single(Tok::rparen);
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (i_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.')) ++i_;
            if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
                std::size_t save = i_;
                ++i_;
                if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
                if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
                    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
                } else {
                    i_ = save;
                }
            }
            return {Tok::number, src_.substr(start, i_ - start), start + 1};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) ++i_;
            return {Tok::ident, src_.substr(start, i_ - start), start + 1};
        }
        throw SyntaxError(start + 1, std::string("unexpected character '") + c + "'");
    }

private:
    std::string_view src_;
    std::size_t i_ = 0;
};

// Binding powers.
constexpr int kBpAdd = 10;
constexpr int kBpMul = 20;
constexpr int kBpUnary = 30;
constexpr int kBpPow = 40;

class Parser {
public:
    Parser(std::string_view src, const SymbolTable& ctx) : lex_(src), ctx_(ctx) { advance(); }

    Expr parse_all() {
        Expr e = expression(0);
        if (cur_.kind != Tok::end) throw SyntaxError(cur_.pos, "unexpected '" + std::string(cur_.text) + "'");
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    static int infix_bp(Tok k) {
        switch (k) {
            case Tok::plus:
            case Tok::minus: return kBpAdd;
            case Tok::star:
            case Tok::slash: return kBpMul;
            case Tok::caret: return kBpPow;
            default: return -1;
        }
    }

    Expr expression(int min_bp) {
        Expr lhs = prefix();
        for (;;) {
            int bp = infix_bp(cur_.kind);
            if (bp < 0 || bp <= min_bp) break;
            Token op = cur_;
            advance();
            if (op.kind == Tok::caret) {
                lhs = power(lhs);
                continue;
            }
            Expr rhs = expression(bp);
            switch (op.kind) {
                case Tok::plus: lhs = lhs + rhs; break;
                case Tok::minus: lhs = lhs - rhs; break;
                case Tok::star: lhs = lhs * rhs; break;
                case Tok::slash: lhs = lhs / rhs; break;
                default: break;
            }
        }
        return lhs;
    }

    Expr power(const Expr& base) {
        std::size_t at = cur_.pos;
        // Right operand binds at the power level so that a^b^c = a^(b^c) and
        // a^-2 is accepted.
        Expr raw = expression(kBpPow - 1);
        Expr value = simplify(raw);
        if (!value.is_constant() || !value.value().is_integer()) {
            throw SyntaxError(at, "exponent must be an integer constant (write general powers via exp/log)");
        }
        return Expr::pow(base, value.value().numerator());
    }

    Expr prefix() {
        Token t = cur_;
        switch (t.kind) {
            case Tok::number: {
                advance();
                auto n = Number::from_literal(t.text);
                if (!n) throw SyntaxError(t.pos, "malformed number '" + std::string(t.text) + "'");
                return Expr(*n);
            }
            case Tok::ident: {
                advance();
                std::string name(t.text);
                if (cur_.kind == Tok::lparen) {
                    Func f;
                    if (name == "sin") f = Func::sin;
                    else if (name == "cos") f = Func::cos;
                    else if (name == "exp") f = Func::exp;
                    else if (name == "log") f = Func::log;
                    else throw SyntaxError(t.pos, "unknown function '" + name + "'");
                    advance();
                    Expr arg = expression(0);
                    expect_rparen();
                    return Expr::func(f, arg);
                }
                if (!ctx_.contains(name)) throw UnknownSymbol(name);
                return Expr::symbol(name);
            }
            case Tok::minus: {
                advance();
                return Expr::neg(expression(kBpUnary));
            }
            case Tok::plus: {
                advance();
                return expression(kBpUnary);
            }
            case Tok::lparen: {
                advance();
                Expr e = expression(0);
                expect_rparen();
                return e;
            }
            case Tok::end: throw SyntaxError(t.pos, "unexpected end of input");
            default: throw SyntaxError(t.pos, "unexpected '" + std::string(t.text) + "'");
        }
    }

    void expect_rparen() {
        if (cur_.kind != Tok::rparen) {
            if (cur_.kind == Tok::end) throw SyntaxError(cur_.pos, "missing ')'");
            throw SyntaxError(cur_.pos, "expected ')'");
        }
        advance();
    }

    Lexer lex_;
    const SymbolTable& ctx_;
    Token cur_{Tok::end, {}, 0};
};

}  // namespace

Expr parse(std::string_view text, const SymbolTable& context) {
    return Parser(text, context).parse_all();
}

}  // namespace singmech
