#pragma once

// Test-only helpers: independent numeric oracles and random generators.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "singmech/evaluate.hpp"
#include "singmech/expr.hpp"
#include "singmech/model_file.hpp"

namespace singmech::testing {

inline std::string fixture(const std::string& name) { return std::string(SINGMECH_FIXTURE_DIR) + "/" + name; }

/// Central difference of `e` in `symbol` at `at`, evaluated through the tree
/// walker only (no symbolic differentiation involved).
inline double central_difference(const Expr& e, const std::string& symbol, Binding at, double h = 1e-6) {
    const double x = at.at(symbol);
    at[symbol] = x + h;
    const double fp = evaluate(e, at);
    at[symbol] = x - h;
    const double fm = evaluate(e, at);
    return (fp - fm) / (2.0 * h);
}

inline LagrangianModel model_fixture(const std::string& name) { return load_model(fixture("models/" + name + ".toml")); }

inline Expr sym(const char* name) { return Expr::symbol(name); }

/// Random expressions over `symbols` that stay finite on [-2, 2]^k:
/// denominators and log arguments are kept positive by construction.
class ExprGenerator {
public:
    ExprGenerator(std::vector<std::string> symbols, std::uint64_t seed)
        : symbols_(std::move(symbols)), rng_(seed) {}

    Expr operator()(int depth) {
        if (depth <= 0) return leaf();
        switch (pick(9)) {
            case 0: return (*this)(depth - 1) + (*this)(depth - 1);
            case 1: return (*this)(depth - 1) * (*this)(depth - 1);
            case 2: return (*this)(depth - 1) - (*this)(depth - 1);
            case 3: return Expr::pow((*this)(depth - 1), pick(3) + 1);
            case 4: return (*this)(depth - 1) / (Expr(2) + Expr::pow((*this)(depth - 1), 2));
            case 5: return sin((*this)(depth - 1));
            case 6: return cos((*this)(depth - 1));
            case 7: return exp(sin((*this)(depth - 1)));
            default: return log(Expr(1) + Expr::pow((*this)(depth - 1), 2));
        }
    }

    /// Random polynomial of total degree <= 2 with small integer coefficients.
    Expr quadratic() {
        std::vector<Expr> terms{Expr(static_cast<std::int64_t>(pick(5)) - 2)};
        for (int k = 0; k < 3; ++k) {
            auto c = static_cast<std::int64_t>(pick(7)) - 3;
            if (c == 0) c = 1;
            Expr a = Expr::symbol(symbols_[pick(symbols_.size())]);
            if (pick(2) == 0) {
                terms.push_back(Expr(c) * a);
            } else {
                Expr b = Expr::symbol(symbols_[pick(symbols_.size())]);
                terms.push_back(Expr(c) * a * b);
            }
        }
        return simplify(Expr::add(std::move(terms)));
    }

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

private:
    Expr leaf() {
        if (pick(4) == 0) {
            auto num = static_cast<std::int64_t>(pick(9)) - 4;
            auto den = static_cast<std::int64_t>(pick(3)) + 1;
            return Expr(Number::rational(num, den));
        }
        return Expr::symbol(symbols_[pick(symbols_.size())]);
    }

    std::vector<std::string> symbols_;
    std::mt19937_64 rng_;
};

}  // namespace singmech::testing
