#include "ordinal/rational.hpp"

#include <boost/multiprecision/integer.hpp>

#include <cctype>
#include <ostream>
#include <vector>

#include "ordinal/errors.hpp"

namespace ordinal {

Rational::Rational(BigInt numerator, BigInt denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    normalize();
}

void Rational::normalize() {
    if (den_ == 0) {
        throw ValidationError("rational with zero denominator");
    }
    if (den_ < 0) {
        den_ = -den_;
        num_ = -num_;
    }
    if (num_ == 0) {
        den_ = 1;
        return;
    }
    BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    num_ = num_ * rhs.den_ + rhs.num_ * den_;
    den_ *= rhs.den_;
    normalize();
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
    num_ = num_ * rhs.den_ - rhs.num_ * den_;
    den_ *= rhs.den_;
    normalize();
    return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
    num_ *= rhs.num_;
    den_ *= rhs.den_;
    normalize();
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) {
        throw ValidationError("rational division by zero");
    }
    num_ *= rhs.den_;
    den_ *= rhs.num_;
    normalize();
    return *this;
}

BigInt Rational::floor() const {
    BigInt q = num_ / den_;  // truncates toward zero
    if (num_ < 0 && q * den_ != num_) {
        --q;
    }
    return q;
}

double Rational::to_double() const {
    using boost::multiprecision::msb;
    if (num_ == 0) {
        return 0.0;
    }
    BigInt abs_num = num_ < 0 ? BigInt(-num_) : num_;
    // Shift both parts into double range before dividing; doubles overflow
    // past ~2^1024.
    long bits = static_cast<long>(std::max(msb(abs_num), msb(den_)));
    long shift = bits > 512 ? bits - 512 : 0;
    double n = (abs_num >> shift).convert_to<double>();
    double d = (den_ >> shift).convert_to<double>();
    double v = n / d;
    return num_ < 0 ? -v : v;
}

std::string Rational::to_string() const {
    std::string s = num_.str();
    if (den_ != 1) {
        s += "/" + den_.str();
    }
    return s;
}

std::string Rational::to_decimal(int places) const {
    if (places < 0) {
        throw ValidationError("to_decimal requires places >= 0");
    }
    BigInt scale = 1;
    for (int i = 0; i < places; ++i) {
        scale *= 10;
    }
    bool negative = num_ < 0;
    BigInt abs_num = negative ? BigInt(-num_) : num_;
    // round(|num|*scale / den), halves away from zero
    BigInt scaled = abs_num * scale;
    BigInt q = (2 * scaled + den_) / (2 * den_);

    std::string digits = q.str();
    std::string out = negative && q != 0 ? "-" : "";
    if (places == 0) {
        return out + digits;
    }
    if (digits.size() <= static_cast<size_t>(places)) {
        digits.insert(0, static_cast<size_t>(places) + 1 - digits.size(), '0');
    }
    out += digits.substr(0, digits.size() - places);
    out += ".";
    out += digits.substr(digits.size() - places);
    return out;
}

namespace {

BigInt parse_integer(const std::string& text) {
    if (text.empty()) {
        throw ParseError("empty integer in rational literal");
    }
    size_t i = (text[0] == '+' || text[0] == '-') ? 1 : 0;
    if (i == text.size()) {
        throw ParseError("sign without digits in rational literal");
    }
    for (; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            throw ParseError("invalid integer '" + text + "' in rational literal");
        }
    }
    return BigInt(text);
}

}  // namespace

Rational Rational::parse(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s += c;
        }
    }
    if (s.empty()) {
        throw ParseError("empty rational literal");
    }
    if (auto slash = s.find('/'); slash != std::string::npos) {
        BigInt n = parse_integer(s.substr(0, slash));
        BigInt d = parse_integer(s.substr(slash + 1));
        if (d == 0) {
            throw ParseError("zero denominator in rational literal '" + text + "'");
        }
        return Rational(n, d);
    }
    if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string int_part = s.substr(0, dot);
        std::string frac_part = s.substr(dot + 1);
        if (frac_part.empty()) {
            throw ParseError("missing digits after decimal point in '" + text + "'");
        }
        for (char c : frac_part) {
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                throw ParseError("invalid decimal '" + text + "'");
            }
        }
        bool negative = !int_part.empty() && int_part[0] == '-';
        if (int_part.empty() || int_part == "-" || int_part == "+") {
            int_part += "0";
        }
        BigInt whole = parse_integer(int_part);
        BigInt scale = 1;
        for (size_t i = 0; i < frac_part.size(); ++i) {
            scale *= 10;
        }
        BigInt frac(frac_part);
        BigInt n = whole * scale + (negative ? -frac : frac);
        return Rational(n, scale);
    }
    return Rational(parse_integer(s), 1);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
}

Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

std::uint64_t seed_digest(const BigInt& value) {
    std::uint64_t h = value < 0 ? 0x9e3779b97f4a7c15ull : 0x85ebca6b0f1d2e3cull;
    BigInt v = value < 0 ? BigInt(-value) : value;
    while (v != 0) {
        std::uint64_t limb = (v & 0xffffffffffffffffull).convert_to<std::uint64_t>();
        h ^= limb;
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
        v >>= 64;
    }
    return h;
}

}  // namespace ordinal
