#include "singmech/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "singmech/errors.hpp"

namespace singmech {

namespace {

double int_pow(double base, std::int64_t n) {
    if (n < 0) {
        if (base == 0.0) throw DomainError("division by zero (zero to a negative power)");
        return 1.0 / int_pow(base, -n);
    }
    double result = 1.0;
    while (n != 0) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n != 0) base *= base;
    }
    return result;
}

double apply(Func f, double x) {
    switch (f) {
        case Func::sin: return std::sin(x);
        case Func::cos: return std::cos(x);
        case Func::exp: return std::exp(x);
        case Func::log:
            if (!(x > 0.0)) throw DomainError("log of non-positive value " + std::to_string(x));
            return std::log(x);
    }
    return 0.0;
}

}  // namespace

double evaluate(const Expr& e, const Binding& b) {
    switch (e.kind()) {
        case NodeKind::constant: return e.value().to_double();
        case NodeKind::symbol: {
            auto it = b.find(e.name());
            if (it == b.end()) throw UnboundSymbol(e.name());
            return it->second;
        }
        case NodeKind::add: {
            double s = 0.0;
            for (const Expr& c : e.children()) s += evaluate(c, b);
            return s;
        }
        case NodeKind::mul: {
            double p = 1.0;
            for (const Expr& c : e.children()) p *= evaluate(c, b);
            return p;
        }
        case NodeKind::pow: return int_pow(evaluate(e.children()[0], b), e.exponent());
        case NodeKind::neg: return -evaluate(e.children()[0], b);
        case NodeKind::div: {
            double num = evaluate(e.children()[0], b);
            double den = evaluate(e.children()[1], b);
            if (den == 0.0) throw DomainError("division by zero");
            return num / den;
        }
        case NodeKind::func: return apply(e.function(), evaluate(e.children()[0], b));
    }
    return 0.0;
}

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& slots) {
    emit(e, slots);
    // Stack depth: simulate.
    std::size_t depth = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::push_const:
            case Op::push_slot: ++depth; break;
            case Op::add:
            case Op::mul: depth -= static_cast<std::size_t>(in.arity_or_slot) - 1; break;
            case Op::div: --depth; break;
            default: break;
        }
        max_stack_ = std::max(max_stack_, depth);
    }
}

void CompiledExpr::emit(const Expr& e, const std::vector<std::string>& slots) {
    switch (e.kind()) {
        case NodeKind::constant:
            code_.push_back({Op::push_const, 0, 0, e.value().to_double()});
            return;
        case NodeKind::symbol: {
            auto it = std::find(slots.begin(), slots.end(), e.name());
            if (it == slots.end()) throw UnboundSymbol(e.name());
            code_.push_back({Op::push_slot, static_cast<int>(it - slots.begin())});
            return;
        }
        case NodeKind::add:
        case NodeKind::mul:
            for (const Expr& c : e.children()) emit(c, slots);
            code_.push_back({e.kind() == NodeKind::add ? Op::add : Op::mul, static_cast<int>(e.children().size())});
            return;
        case NodeKind::pow:
            emit(e.children()[0], slots);
            code_.push_back({Op::pow, 0, e.exponent()});
            return;
        case NodeKind::neg:
            emit(e.children()[0], slots);
            code_.push_back({Op::neg});
            return;
        case NodeKind::div:
            emit(e.children()[0], slots);
            emit(e.children()[1], slots);
            code_.push_back({Op::div});
            return;
        case NodeKind::func: {
            emit(e.children()[0], slots);
            Op op = Op::sin;
            switch (e.function()) {
                case Func::sin: op = Op::sin; break;
                case Func::cos: op = Op::cos; break;
                case Func::exp: op = Op::exp; break;
                case Func::log: op = Op::log; break;
            }
            code_.push_back({op});
            return;
        }
    }
}

double CompiledExpr::operator()(std::span<const double> values) const {
    // Small fixed buffer covers every expression this project builds; fall
    // back to the heap otherwise.
    double local[64];
    std::vector<double> heap;
    double* stack = local;
    if (max_stack_ > 64) {
        heap.resize(max_stack_);
        stack = heap.data();
    }
    std::size_t sp = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::push_const: stack[sp++] = in.constant; break;
            case Op::push_slot: stack[sp++] = values[static_cast<std::size_t>(in.arity_or_slot)]; break;
            case Op::add: {
                auto n = static_cast<std::size_t>(in.arity_or_slot);
                double s = 0.0;
                for (std::size_t k = sp - n; k < sp; ++k) s += stack[k];
                sp -= n;
                stack[sp++] = s;
                break;
            }
            case Op::mul: {
                auto n = static_cast<std::size_t>(in.arity_or_slot);
                double p = 1.0;
                for (std::size_t k = sp - n; k < sp; ++k) p *= stack[k];
                sp -= n;
                stack[sp++] = p;
                break;
            }
            case Op::pow: stack[sp - 1] = int_pow(stack[sp - 1], in.exponent); break;
            case Op::neg: stack[sp - 1] = -stack[sp - 1]; break;
            case Op::div: {
                double den = stack[--sp];
                if (den == 0.0) throw DomainError("division by zero");
                stack[sp - 1] /= den;
                break;
            }
            case Op::sin: stack[sp - 1] = apply(Func::sin, stack[sp - 1]); break;
            case Op::cos: stack[sp - 1] = apply(Func::cos, stack[sp - 1]); break;
            case Op::exp: stack[sp - 1] = apply(Func::exp, stack[sp - 1]); break;
            case Op::log: stack[sp - 1] = apply(Func::log, stack[sp - 1]); break;
        }
    }
    return sp == 0 ? 0.0 : stack[sp - 1];
}

}  // namespace singmech
