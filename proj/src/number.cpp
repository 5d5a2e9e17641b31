#include "singmech/number.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace singmech {

namespace {

using i128 = __int128;

constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Reduces num/den; returns nullopt when the reduced pair leaves int64.
std::optional<std::pair<std::int64_t, std::int64_t>> reduce(i128 num, i128 den) {
    if (den == 0) return std::nullopt;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num > kMax || num < -kMax || den > kMax) return std::nullopt;
    return std::make_pair(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

Number make(i128 num, i128 den) {
    if (auto r = reduce(num, den)) return Number::rational(r->first, r->second);
    return Number::real(static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace

Number Number::rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("Number::rational: zero denominator");
    auto r = reduce(num, den);
    Number n;
    if (!r) return real(static_cast<double>(num) / static_cast<double>(den));
    n.num_ = r->first;
    n.den_ = r->second;
    return n;
}

Number Number::real(double value) {
    Number n;
    n.exact_ = false;
    n.real_ = value;
    n.num_ = 0;
    n.den_ = 1;
    return n;
}

std::optional<Number> Number::from_literal(std::string_view text) {
    if (text.empty()) return std::nullopt;
    i128 mantissa = 0;
    int digits = 0;
    int decimals = 0;
    bool seen_dot = false;
    bool overflow = false;
    std::size_t i = 0;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') break;
        if (digits > 0 || c != '0') ++digits;
        if (digits > 18) overflow = true;
        if (!overflow) mantissa = mantissa * 10 + (c - '0');
        if (seen_dot && !overflow) ++decimals;
    }
    if (i == 0 || (i == 1 && seen_dot)) return std::nullopt;
    long exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
        ++i;
        bool neg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            neg = text[i] == '-';
            ++i;
        }
        if (i >= text.size()) return std::nullopt;
        for (; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
            exponent = exponent * 10 + (text[i] - '0');
            if (exponent > 100000) overflow = true;
        }
        if (neg) exponent = -exponent;
    }
    long scale = exponent - decimals;
    if (!overflow && scale >= -18 && scale <= 18) {
        i128 num = mantissa;
        i128 den = 1;
        for (long k = 0; k < std::labs(scale); ++k) (scale > 0 ? num : den) *= 10;
        if (auto r = reduce(num, den)) return rational(r->first, r->second);
    }
    std::string owned(text);
    return real(std::strtod(owned.c_str(), nullptr));
}

Number Number::from_double(double value) {
    if (!std::isfinite(value)) return real(value);
    if (value == std::floor(value) && std::fabs(value) < 1e15) {
        return Number(static_cast<std::int64_t>(value));
    }
    // Continued-fraction convergents; accept the first one that converts back
    // to exactly the same double.
    double x = value;
    i128 h0 = 1, h1 = 0, k0 = 0, k1 = 1;
    for (int iter = 0; iter < 40; ++iter) {
        double a = std::floor(x);
        if (std::fabs(a) > 1e15) break;
        i128 ai = static_cast<i128>(a);
        i128 h2 = ai * h0 + h1;
        i128 k2 = ai * k0 + k1;
        if (k2 > 1000000LL || h2 > kMax || h2 < -kMax) break;
        h1 = h0;
        h0 = h2;
        k1 = k0;
        k0 = k2;
        if (static_cast<double>(h0) / static_cast<double>(k0) == value) return make(h0, k0);
        double frac = x - a;
        if (frac == 0.0) break;
        x = 1.0 / frac;
    }
    return real(value);
}

double Number::to_double() const noexcept {
    return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : real_;
}

bool Number::is_zero() const noexcept { return exact_ ? num_ == 0 : real_ == 0.0; }
bool Number::is_one() const noexcept { return exact_ ? (num_ == 1 && den_ == 1) : real_ == 1.0; }
bool Number::is_negative() const noexcept { return exact_ ? num_ < 0 : real_ < 0.0; }
int Number::sign() const noexcept {
    if (is_zero()) return 0;
    return is_negative() ? -1 : 1;
}

Number Number::operator-() const {
    if (exact_) return rational(-num_, den_);
    return real(-real_);
}

Number operator+(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
        return make(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                    static_cast<i128>(a.den_) * b.den_);
    }
    return Number::real(a.to_double() + b.to_double());
}

Number operator-(const Number& a, const Number& b) { return a + (-b); }

Number operator*(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
        return make(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
    }
    return Number::real(a.to_double() * b.to_double());
}

Number operator/(const Number& a, const Number& b) {
    if (b.is_zero()) throw std::domain_error("Number: division by zero");
    if (a.exact_ && b.exact_) {
        return make(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
    }
    return Number::real(a.to_double() / b.to_double());
}

Number Number::pow(std::int64_t exponent) const {
    if (exponent < 0) {
        if (is_zero()) throw std::domain_error("Number: zero to a negative power");
        return Number(1) / pow(-exponent);
    }
    Number result(1);
    Number base = *this;
    auto e = static_cast<std::uint64_t>(exponent);
    while (e != 0) {
        if (e & 1U) result = result * base;
        e >>= 1U;
        if (e != 0) base = base * base;
    }
    return result;
}

int Number::compare(const Number& other) const noexcept {
    if (exact_ && other.exact_) {
        i128 lhs = static_cast<i128>(num_) * other.den_;
        i128 rhs = static_cast<i128>(other.num_) * den_;
        return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    }
    double x = to_double();
    double y = other.to_double();
    if (x < y) return -1;
    if (x > y) return 1;
    if (exact_ != other.exact_) return exact_ ? -1 : 1;
    return 0;
}

bool operator==(const Number& a, const Number& b) noexcept {
    if (a.exact_ != b.exact_) return false;
    if (a.exact_) return a.num_ == b.num_ && a.den_ == b.den_;
    return a.real_ == b.real_;
}

std::string Number::to_string() const {
    if (exact_) {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", real_);
    return buf;
}

}  // namespace singmech
