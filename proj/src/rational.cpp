#include "sselab/rational.hpp"

#include <cmath>
#include <limits>

namespace sselab {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

__int128 checked_mul(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw RationalOverflow();
    return r;
}

__int128 checked_add(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw RationalOverflow();
    return r;
}

std::string i128_str(__int128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u != 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    return neg ? "-" + s : s;
}

}  // namespace

Rational Rational::make_normalized(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    Rational r;
    r.num_ = n;
    r.den_ = d;
    return r;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
    *this = make_normalized(n, d);
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    std::size_t slash = text.find('/');
    auto to_i64 = [](const std::string& s) {
        if (s.empty()) throw std::invalid_argument("bad rational literal");
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad rational literal: " + s);
        return static_cast<std::int64_t>(v);
    };
    if (slash == std::string::npos) return Rational(to_i64(text));
    return Rational(to_i64(text.substr(0, slash)), to_i64(text.substr(slash + 1)));
}

std::string Rational::str() const {
    if (den_ == 1) return i128_str(num_);
    return i128_str(num_) + "/" + i128_str(den_);
}

Rational Rational::operator+(const Rational& o) const {
    // reduce by the denominator gcd first to keep intermediates small
    const __int128 g = gcd128(den_, o.den_);
    const __int128 da = den_ / g, db = o.den_ / g;
    const __int128 n = checked_add(checked_mul(num_, db), checked_mul(o.num_, da));
    const __int128 d = checked_mul(da, o.den_);
    return make_normalized(n, d);
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
    const __int128 g1 = gcd128(num_, o.den_);
    const __int128 g2 = gcd128(o.num_, den_);
    const __int128 n = checked_mul(num_ / g1, o.num_ / g2);
    const __int128 d = checked_mul(den_ / g2, o.den_ / g1);
    return make_normalized(n, d);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    Rational inv;
    inv.num_ = o.den_;
    inv.den_ = o.num_;
    if (inv.den_ < 0) {
        inv.num_ = -inv.num_;
        inv.den_ = -inv.den_;
    }
    return *this * inv;
}

bool Rational::operator<(const Rational& o) const {
    // denominators are positive; compare via checked cross products
    const __int128 g = gcd128(den_, o.den_);
    return checked_mul(num_, o.den_ / g) < checked_mul(o.num_, den_ / g);
}

Rational Rational::pow(int e) const {
    if (e == 0) return Rational(1);
    Rational base = *this;
    if (e < 0) {
        if (num_ == 0) throw std::domain_error("0 to negative power");
        base = Rational(1) / base;
        e = -e;
    }
    Rational acc(1);
    for (int i = 0; i < e; ++i) acc *= base;
    return acc;
}

std::optional<Rational> from_double(double v, std::int64_t max_den) {
    for (std::int64_t d = 1; d <= max_den; ++d) {
        const double scaled = v * static_cast<double>(d);
        const double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) < 1e-12 * std::max(1.0, std::abs(scaled)) &&
            std::abs(rounded) < 9.0e18) {
            return Rational(static_cast<std::int64_t>(rounded), d);
        }
    }
    return std::nullopt;
}

}  // namespace sselab
