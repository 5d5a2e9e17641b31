#pragma once

#include <cstdint>
#include <vector>

#include "singmech/expr.hpp"

// Constructors that take operands already in normal form and return the
// normal form of the combination. simplify, differentiate and substitute are
// built from these.
namespace singmech::detail {

Expr nf_add(std::vector<Expr> terms);
Expr nf_mul(std::vector<Expr> factors);
Expr nf_pow(const Expr& base, std::int64_t exponent);
Expr nf_func(Func f, const Expr& argument);

}  // namespace singmech::detail
