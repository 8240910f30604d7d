#include "robba/rational.hpp"

#include <limits>
#include <numeric>

#include "robba/error.hpp"

namespace robba {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        raise(ErrorKind::InvalidArgument, "rational overflow");
    return static_cast<std::int64_t>(v);
}

Rational make(i128 n, i128 d) {
    if (d == 0) raise(ErrorKind::InvalidArgument, "zero denominator");
    if (d < 0) n = -n, d = -d;
    i128 a = n < 0 ? -n : n, b = d;
    while (b) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) n /= a, d /= a;
    return Rational(narrow(n), narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) raise(ErrorKind::InvalidArgument, "zero denominator");
    if (d < 0) n = -n, d = -d;
    std::int64_t g = std::gcd(n, d);
    if (g > 1) n /= g, d /= g;
    num_ = n;
    den_ = d;
}

Rational Rational::operator-() const { return Rational(-num_, den_); }

Rational operator+(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) raise(ErrorKind::InvalidArgument, "rational division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    i128 l = i128(a.num_) * b.den_, r = i128(b.num_) * a.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}
std::int64_t Rational::ceil() const { return -(-*this).floor(); }

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return fraction();
}
std::string Rational::fraction() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::parse(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::logic_error&) {
        raise(ErrorKind::ParseError, "bad rational '" + s + "'");
    }
}

}  // namespace robba
