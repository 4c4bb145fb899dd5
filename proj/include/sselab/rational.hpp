#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sselab {

// Exact rational arithmetic for the regime predicates. All admissibility
// boundaries in the hypothesis system mix open and closed endpoints, so
// comparisons must be exact; doubles are only produced at the very end
// for the numerical modules.
//
// Storage is int64, intermediates run through __int128 and every result is
// normalized by gcd. Anything that would not fit back into int64 throws.
class RationalOverflow : public std::overflow_error {
public:
    RationalOverflow() : std::overflow_error("rational overflow") {}
};

class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);

    // Parses "p/q", "p", or "-p/q". Whitespace is not accepted.
    static Rational parse(const std::string& text);

    __int128 num() const { return num_; }
    __int128 den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    Rational operator-() const { return Rational(-num_, den_); }
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_positive() const { return num_ > 0; }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    // Integer power, exponent may be negative (throws on 0^-n).
    Rational pow(int e) const;

    static Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
    static Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

private:
    static Rational make_normalized(__int128 n, __int128 d);
    __int128 num_;
    __int128 den_;  // > 0 always
};

inline Rational operator+(std::int64_t a, const Rational& b) { return Rational(a) + b; }
inline Rational operator-(std::int64_t a, const Rational& b) { return Rational(a) - b; }
inline Rational operator*(std::int64_t a, const Rational& b) { return Rational(a) * b; }

// Recovers p/q from a double that is (up to 1e-12 absolute) a rational with
// denominator <= max_den; nullopt otherwise.
std::optional<Rational> from_double(double v, std::int64_t max_den);

}  // namespace sselab
