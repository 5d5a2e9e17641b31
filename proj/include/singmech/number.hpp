#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace singmech {

/// A numeric constant: an exact rational while it fits in 64-bit numerator and
/// denominator, otherwise an IEEE double. Arithmetic between exact values stays
/// exact unless it overflows.
class Number {
public:
    Number() = default;
    Number(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)

    static Number rational(std::int64_t num, std::int64_t den);
    static Number real(double value);

    /// Parses a decimal literal such as "12", "0.37" or "1e-6". Decimal text is
    /// exact, so the result is rational whenever it fits.
    static std::optional<Number> from_literal(std::string_view text);

    /// Recovers a small rational when `value` is the double nearest to one
    /// (0.1 -> 1/10), otherwise returns the double unchanged.
    static Number from_double(double value);

    [[nodiscard]] bool is_exact() const noexcept { return exact_; }
    [[nodiscard]] bool is_integer() const noexcept { return exact_ && den_ == 1; }
    [[nodiscard]] std::int64_t numerator() const noexcept { return num_; }
    [[nodiscard]] std::int64_t denominator() const noexcept { return den_; }
    [[nodiscard]] double to_double() const noexcept;

    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] bool is_one() const noexcept;
    [[nodiscard]] bool is_negative() const noexcept;
    [[nodiscard]] int sign() const noexcept;

    [[nodiscard]] Number operator-() const;
    friend Number operator+(const Number& a, const Number& b);
    friend Number operator-(const Number& a, const Number& b);
    friend Number operator*(const Number& a, const Number& b);
    /// Division by an exact zero is a logic error; callers check first.
    friend Number operator/(const Number& a, const Number& b);

    /// Integer power. Zero to a negative power is not representable; callers
    /// check first.
    [[nodiscard]] Number pow(std::int64_t exponent) const;

    [[nodiscard]] Number abs() const { return is_negative() ? -*this : *this; }

    /// Total order: by value, exact before inexact on ties.
    [[nodiscard]] int compare(const Number& other) const noexcept;
    /// Identity: same exactness and same value.
    friend bool operator==(const Number& a, const Number& b) noexcept;

    /// Text accepted back by the expression parser ("3", "1/2", "0.25000000000000006").
    [[nodiscard]] std::string to_string() const;

private:
    bool exact_ = true;
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    double real_ = 0.0;
};

}  // namespace singmech
