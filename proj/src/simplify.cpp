#include <algorithm>
#include <utility>

#include "singmech/detail/normal_form.hpp"
#include "singmech/expr.hpp"

namespace singmech {

namespace detail {

namespace {

// Splits a normal-form term into rational coefficient and the remaining product.
std::pair<Number, Expr> split_coefficient(const Expr& term) {
    if (term.kind() == NodeKind::mul) {
        const auto& f = term.children();
        if (f[0].is_constant()) {
            std::vector<Expr> rest(f.begin() + 1, f.end());
            return {f[0].value(), Expr::mul(std::move(rest))};
        }
    }
    return {Number(1), term};
}

Expr with_coefficient(const Number& c, const Expr& rest) {
    if (c.is_one()) return rest;
    std::vector<Expr> f{Expr(c)};
    if (rest.kind() == NodeKind::mul) {
        f.insert(f.end(), rest.children().begin(), rest.children().end());
    } else {
        f.push_back(rest);
    }
    return Expr::mul(std::move(f));
}

std::pair<Expr, std::int64_t> split_power(const Expr& factor) {
    if (factor.kind() == NodeKind::pow) return {factor.children()[0], factor.exponent()};
    return {factor, 1};
}

// Raw power node that cannot be folded: 0 to a negative exponent. Kept so that
// evaluation reports the division by zero.
bool is_singular_power(const Expr& base, std::int64_t exponent) {
    return base.is_zero() && exponent < 0;
}

}  // namespace

Expr nf_add(std::vector<Expr> terms) {
    Number constant(0);
    std::vector<std::pair<Expr, Number>> parts;
    auto absorb = [&](const Expr& t, auto&& self) -> void {
        if (t.kind() == NodeKind::add) {
            for (const Expr& c : t.children()) self(c, self);
            return;
        }
        if (t.is_constant()) {
            constant = constant + t.value();
            return;
        }
        auto [c, rest] = split_coefficient(t);
        parts.emplace_back(std::move(rest), c);
    };
    for (const Expr& t : terms) absorb(t, absorb);

    std::stable_sort(parts.begin(), parts.end(),
                     [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<Expr> out;
    if (!constant.is_zero()) out.emplace_back(constant);
    for (std::size_t i = 0; i < parts.size();) {
        Number c = parts[i].second;
        std::size_t j = i + 1;
        while (j < parts.size() && compare(parts[j].first, parts[i].first) == 0) {
            c = c + parts[j].second;
            ++j;
        }
        if (!c.is_zero()) out.push_back(with_coefficient(c, parts[i].first));
        i = j;
    }
    if (out.empty()) return Expr();
    return Expr::add(std::move(out));
}

Expr nf_mul(std::vector<Expr> factors) {
    Number coefficient(1);
    std::vector<std::pair<Expr, std::int64_t>> powers;
    auto absorb = [&](const Expr& f, auto&& self) -> void {
        if (f.kind() == NodeKind::mul) {
            for (const Expr& c : f.children()) self(c, self);
            return;
        }
        if (f.is_constant()) {
            coefficient = coefficient * f.value();
            return;
        }
        powers.push_back(split_power(f));
    };
    for (const Expr& f : factors) absorb(f, absorb);
    if (coefficient.is_zero()) return Expr();

    std::stable_sort(powers.begin(), powers.end(),
                     [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    std::vector<Expr> merged;
    std::vector<Expr> sums;
    for (std::size_t i = 0; i < powers.size();) {
        std::int64_t e = powers[i].second;
        std::size_t j = i + 1;
        while (j < powers.size() && compare(powers[j].first, powers[i].first) == 0) {
            e += powers[j].second;
            ++j;
        }
        const Expr& base = powers[i].first;
        i = j;
        if (e == 0) continue;
        if (base.kind() == NodeKind::add && e > 0) {
            for (std::int64_t k = 0; k < e; ++k) sums.push_back(base);
            continue;
        }
        Expr p = is_singular_power(base, e) ? Expr::pow(base, e) : nf_pow(base, e);
        if (p.is_constant()) {
            coefficient = coefficient * p.value();
        } else if (p.kind() == NodeKind::add) {
            sums.push_back(std::move(p));
        } else if (p.kind() == NodeKind::mul) {
            // nf_pow of a function or symbol never yields a product, but a
            // product base raised to a power does.
            for (const Expr& c : p.children()) {
                if (c.is_constant()) coefficient = coefficient * c.value();
                else merged.push_back(c);
            }
        } else {
            merged.push_back(std::move(p));
        }
    }
    if (coefficient.is_zero()) return Expr();

    if (!sums.empty()) {
        // Multiply out: every factor that is a sum distributes over the rest.
        std::vector<Expr> seed = merged;
        seed.insert(seed.begin(), Expr(coefficient));
        std::vector<Expr> terms{Expr::mul(std::move(seed))};
        for (const Expr& s : sums) {
            std::vector<Expr> next;
            next.reserve(terms.size() * s.children().size());
            for (const Expr& t : terms) {
                for (const Expr& u : s.children()) next.push_back(nf_mul({t, u}));
            }
            terms = std::move(next);
        }
        return nf_add(std::move(terms));
    }

    if (merged.size() > 1) {
        std::stable_sort(merged.begin(), merged.end(),
                         [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
    }
    if (merged.empty()) return Expr(coefficient);
    if (coefficient.is_one() && merged.size() == 1) return merged.front();
    if (!coefficient.is_one()) merged.insert(merged.begin(), Expr(coefficient));
    return Expr::mul(std::move(merged));
}

Expr nf_pow(const Expr& base, std::int64_t exponent) {
    if (exponent == 0) return Expr(1);
    if (exponent == 1) return base;
    if (base.is_constant()) {
        if (is_singular_power(base, exponent)) return Expr::pow(base, exponent);
        return Expr(base.value().pow(exponent));
    }
    switch (base.kind()) {
        case NodeKind::pow: {
            if (is_singular_power(base.children()[0], base.exponent())) return Expr::pow(base, exponent);
            return nf_pow(base.children()[0], base.exponent() * exponent);
        }
        case NodeKind::mul: {
            std::vector<Expr> f;
            f.reserve(base.children().size());
            for (const Expr& c : base.children()) f.push_back(nf_pow(c, exponent));
            return nf_mul(std::move(f));
        }
        case NodeKind::add:
            if (exponent > 0) return nf_mul(std::vector<Expr>(static_cast<std::size_t>(exponent), base));
            if (exponent < -1) {
                Expr expanded = nf_pow(base, -exponent);
                if (expanded.kind() != NodeKind::add) return nf_pow(expanded, -1);
                return Expr::pow(std::move(expanded), -1);
            }
            return Expr::pow(base, exponent);
        default: return Expr::pow(base, exponent);
    }
}

Expr nf_func(Func f, const Expr& argument) {
    if (argument.is_constant() && argument.value().is_exact()) {
        const Number& v = argument.value();
        if (v.is_zero()) {
            switch (f) {
                case Func::sin: return Expr(0);
                case Func::cos:
                case Func::exp: return Expr(1);
                case Func::log: break;
            }
        }
        if (v.is_one() && f == Func::log) return Expr(0);
    }
    return Expr::func(f, argument);
}

}  // namespace detail

Expr simplify(const Expr& e) {
    using namespace detail;
    switch (e.kind()) {
        case NodeKind::constant:
        case NodeKind::symbol: return e;
        case NodeKind::add: {
            std::vector<Expr> t;
            t.reserve(e.children().size());
            for (const Expr& c : e.children()) t.push_back(simplify(c));
            return nf_add(std::move(t));
        }
        case NodeKind::mul: {
            std::vector<Expr> f;
            f.reserve(e.children().size());
            for (const Expr& c : e.children()) f.push_back(simplify(c));
            return nf_mul(std::move(f));
        }
        case NodeKind::pow: {
            Expr base = simplify(e.children()[0]);
            if (base.is_zero() && e.exponent() < 0) return Expr::pow(base, e.exponent());
            return nf_pow(base, e.exponent());
        }
        case NodeKind::neg: return nf_mul({Expr(-1), simplify(e.children()[0])});
        case NodeKind::div: {
            Expr den = simplify(e.children()[1]);
            Expr inv = den.is_zero() ? Expr::pow(den, -1) : nf_pow(den, -1);
            return nf_mul({simplify(e.children()[0]), inv});
        }
        case NodeKind::func: return nf_func(e.function(), simplify(e.children()[0]));
    }
    return e;
}

}  // namespace singmech
