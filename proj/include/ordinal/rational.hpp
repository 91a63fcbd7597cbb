#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace ordinal {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational number. The denominator is always positive and the fraction
// is kept in lowest terms, so equality is plain member equality and all
// arithmetic is exact. Numerator and denominator are arbitrary precision.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long value) : num_(value), den_(1) {}  // NOLINT: implicit by design
    Rational(BigInt numerator, BigInt denominator);

    // Accepts "p/q", an integer, or a plain decimal such as "0.25".
    static Rational parse(const std::string& text);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const;
    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);  // throws on division by zero

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // Largest integer <= num/den.
    BigInt floor() const;

    double to_double() const;

    // "p/q", or just "p" when the value is an integer.
    std::string to_string() const;

    // Fixed-point rendering with `places` digits after the decimal point,
    // rounding halves away from zero. to_decimal(6) of 1/4 is "0.250000".
    std::string to_decimal(int places) const;

private:
    void normalize();

    BigInt num_;
    BigInt den_;  // invariant: > 0, gcd(|num_|, den_) == 1
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

// 64-bit digest of a big integer, for seed derivation.
std::uint64_t seed_digest(const BigInt& value);

}  // namespace ordinal
