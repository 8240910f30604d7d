#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robba/field.hpp"

namespace robba {

// A Laurent series known on [lo, hi) modulo pi^modulus.
// Coefficients below lo are zero modulo pi^modulus; coefficients at hi and beyond are unknown.
// Storage: coefficient n is pi^-shift * raw(n), raw(n) integral and reduced modulo pi^(modulus + shift).
class Series {
public:
    Series() = default;

    static Series zero(const Field& f, long lo, long hi, long modulus);
    static Series from_coefficients(const Field& f, long lo, long hi, long modulus,
                                    const std::map<long, FieldElement>& coeffs);
    // integer coefficients: values[i] is the coefficient of X^(lo + i)
    static Series from_integers(const Field& f, long lo, long hi, long modulus, const std::vector<mpz_class>& values);
    static Series monomial(const Field& f, long n, const FieldElement& c, long hi, long modulus);
    static Series constant(const Field& f, const FieldElement& c, long hi, long modulus);
    static Series from_raw(const Field& f, long lo, long hi, long modulus, long shift, std::vector<mpz_class> data);

    const Field& field() const { return f_; }
    long lo() const { return lo_; }
    long hi() const { return hi_; }
    long modulus() const { return modulus_; }
    long shift() const { return shift_; }
    long width() const { return hi_ - lo_; }

    FieldElement coeff(long n) const;
    bool coeff_is_zero(long n) const;
    // pi-adic valuation of coefficient n; modulus when indistinguishable from zero
    long coeff_pi_valuation(long n) const;
    const mpz_class* raw(long n) const { return &data_[static_cast<size_t>((n - lo_) * f_.e())]; }
    const std::vector<mpz_class>& raw_data() const { return data_; }

    Series operator-() const;
    friend Series operator+(const Series& a, const Series& b);
    friend Series operator-(const Series& a, const Series& b);
    friend Series operator*(const Series& a, const Series& b);
    Series& operator+=(const Series& o) { return *this = *this + o; }
    Series& operator-=(const Series& o) { return *this = *this - o; }
    Series& operator*=(const Series& o) { return *this = *this * o; }
    Series scaled(const FieldElement& c) const;
    Series shifted(long k) const;  // times X^k
    Series derivative() const;

    // sub-window; lo may drop below the current lo (zeros), hi may not exceed the current hi
    Series restricted(long lo, long hi) const;
    // extends the window with zero coefficients; only valid when the caller knows the tail is zero
    Series padded(long hi) const;
    Series with_modulus(long m) const;
    // raises lo past leading coefficients that are indistinguishable from zero
    Series trimmed_low() const;

    bool is_zero() const;
    bool is_integral() const { return min_pi_valuation() >= 0; }
    // minimum pi-adic valuation over the window; modulus if every coefficient is indistinguishable from zero
    long min_pi_valuation() const;
    // least index whose coefficient is distinguishable from zero, or hi
    long order() const;
    // highest index whose coefficient is distinguishable from zero, or lo - 1
    long degree() const;

    friend bool operator==(const Series& a, const Series& b);
    std::string str(long max_terms = 12) const;

private:
    void normalize();

    Field f_;
    long lo_ = 0, hi_ = 0, modulus_ = 0, shift_ = 0;
    std::vector<mpz_class> data_;
};

struct GaussValue {
    Rational v;
    Rational value;
    bool exact = false;
    // certified lower bound for the true Gauss valuation of any series consistent with the truncation
    Rational lower_bound;
};

// val_v(f) = min_n val(a_n) + n v, in units val(p) = 1
GaussValue gauss_valuation(const Series& f, const Rational& v);

struct NewtonPolygon {
    std::vector<std::pair<long, Rational>> vertices;
    std::vector<std::pair<Rational, long>> slopes;  // (slope, horizontal length); root valuation = -slope
    bool provisional = false;
    std::string str() const;
};

NewtonPolygon newton_polygon(const Series& f);
long wideg(const Series& f);
// minimum positive root valuation of s/X; nullopt stands for +infinity (no nonzero zero in the open disk)
std::optional<Rational> rho_valuation(const Series& s);

// f o s. If s(0) is distinguishable from zero it must have positive valuation (Taylor shift at s(0)).
Series compose_power(const Series& f, const Series& s);

// Inverse of an exact Laurent polynomial f in the ring of bounded Laurent series.
// f = c X^k (1 + g) with c X^k the dominant term (least valuation, then least index); (1 + g)^-1 is
// expanded as sum (-g)^j until the terms vanish modulo pi^M. Negative exponents of g have positive
// valuation, so the inverse has infinitely many negative terms with valuations tending to infinity.
struct LaurentInversePlan {
    Field field;
    long modulus = 0;
    long k = 0;
    FieldElement c_inv;
    std::map<long, FieldElement> g;
    bool has_neg = false, has_pos = false;
    Rational v, gamma;  // auxiliary radius and val_v(g) > 0 when has_neg
    long low = 0;       // coefficients of f^-1 below low vanish modulo pi^M
};

struct LaurentInverse {
    Series inv;
    bool exact_high = false;  // the inverse is exactly zero above its window
};

LaurentInversePlan plan_laurent_inverse(const Series& f, long modulus);
// the inverse on [plan.low, hi); ModulusExhausted past cap expansion terms
LaurentInverse invert_laurent(const LaurentInversePlan& plan, long hi, long cap = 20000);

// a * b on [a.lo + b.lo, hi) for operands known to vanish above their windows
Series exact_mul(const Series& a, const Series& b, long hi);

// text format
std::string format_series(const Series& s);
Series parse_series(const std::string& text, std::optional<long> default_modulus = std::nullopt);

}  // namespace robba
