#include "singmech/detail/normal_form.hpp"
#include "singmech/expr.hpp"

namespace singmech {

namespace {

using detail::nf_add;
using detail::nf_func;
using detail::nf_mul;
using detail::nf_pow;

// Operates on normal-form input.
Expr derive(const Expr& e, const std::string& s) {
    if (!depends_on(e, s)) return Expr();
    switch (e.kind()) {
        case NodeKind::constant: return Expr();
        case NodeKind::symbol: return Expr(1);
        case NodeKind::add: {
            std::vector<Expr> terms;
            terms.reserve(e.children().size());
            for (const Expr& c : e.children()) terms.push_back(derive(c, s));
            return nf_add(std::move(terms));
        }
        case NodeKind::mul: {
            const auto& f = e.children();
            std::vector<Expr> terms;
            for (std::size_t k = 0; k < f.size(); ++k) {
                Expr dk = derive(f[k], s);
                if (dk.is_zero()) continue;
                std::vector<Expr> prod;
                prod.reserve(f.size());
                for (std::size_t j = 0; j < f.size(); ++j) prod.push_back(j == k ? dk : f[j]);
                terms.push_back(nf_mul(std::move(prod)));
            }
            return nf_add(std::move(terms));
        }
        case NodeKind::pow: {
            const Expr& base = e.children()[0];
            std::int64_t n = e.exponent();
            return nf_mul({Expr(n), nf_pow(base, n - 1), derive(base, s)});
        }
        case NodeKind::func: {
            const Expr& u = e.children()[0];
            Expr du = derive(u, s);
            switch (e.function()) {
                case Func::sin: return nf_mul({nf_func(Func::cos, u), du});
                case Func::cos: return nf_mul({Expr(-1), nf_func(Func::sin, u), du});
                case Func::exp: return nf_mul({e, du});
                case Func::log: return nf_mul({nf_pow(u, -1), du});
            }
            break;
        }
        case NodeKind::neg:
        case NodeKind::div: break;
    }
    return derive(simplify(e), s);
}

Expr replace(const Expr& e, const std::map<std::string, Expr>& m) {
    switch (e.kind()) {
        case NodeKind::constant: return e;
        case NodeKind::symbol: {
            auto it = m.find(e.name());
            return it == m.end() ? e : simplify(it->second);
        }
        case NodeKind::add: {
            std::vector<Expr> t;
            for (const Expr& c : e.children()) t.push_back(replace(c, m));
            return nf_add(std::move(t));
        }
        case NodeKind::mul: {
            std::vector<Expr> f;
            for (const Expr& c : e.children()) f.push_back(replace(c, m));
            return nf_mul(std::move(f));
        }
        case NodeKind::pow: {
            Expr base = replace(e.children()[0], m);
            if (base.is_zero() && e.exponent() < 0) return Expr::pow(base, e.exponent());
            return nf_pow(base, e.exponent());
        }
        case NodeKind::neg: return nf_mul({Expr(-1), replace(e.children()[0], m)});
        case NodeKind::div: {
            Expr den = replace(e.children()[1], m);
            Expr inv = den.is_zero() ? Expr::pow(den, -1) : nf_pow(den, -1);
            return nf_mul({replace(e.children()[0], m), inv});
        }
        case NodeKind::func: return nf_func(e.function(), replace(e.children()[0], m));
    }
    return e;
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& symbol) {
    return derive(simplify(e), symbol);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
    if (replacements.empty()) return simplify(e);
    return replace(e, replacements);
}

}  // namespace singmech
