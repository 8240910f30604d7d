#pragma once

#include <optional>
#include <vector>

#include "robba/series.hpp"

namespace robba {

// A finite-height substitution s in X O_K[[X]]: s_1..s_{d-1} in m_K, s_d a unit.
// The stored window of s is taken as the whole series: coefficients at hi and beyond are zero.
class FiniteHeightMap {
public:
    static FiniteHeightMap validate(const Series& s);

    const Series& s() const { return s_; }
    const Field& field() const { return s_.field(); }
    long modulus() const { return s_.modulus(); }
    long d() const { return d_; }
    long order() const { return order_; }    // X-adic order of s
    long degree() const { return degree_; }  // polynomial degree of s
    const FieldElement& s_prime_0() const { return s1_; }
    const std::optional<Rational>& rho_v() const { return rho_v_; }

    // lower hull of (k, val s_k) for order <= k <= d, increasing k
    const std::vector<std::pair<long, Rational>>& lambda_vertices() const { return hull_; }
    // values of v where the minimizing vertex of lambda* changes, ascending
    std::vector<Rational> lambda_breakpoints() const;
    // least v0 with lambda*(v) >= v + 1/e for all v >= v0
    Rational lambda_plus_threshold() const;

    // s with zero coefficients appended up to hi
    Series padded(long hi) const;

private:
    Series s_;
    long d_ = 0, order_ = 0, degree_ = 0;
    FieldElement s1_;
    std::optional<Rational> rho_v_;
    std::vector<std::pair<long, Rational>> hull_;
};

inline FiniteHeightMap validate_finite_height(const Series& s) { return FiniteHeightMap::validate(s); }

// h o s for a power series h; output window [0, order(s) * h.hi)
Series phi_power(const FiniteHeightMap& m, const Series& h);

// h o s for a Laurent series h with h.hi >= 0. Negative powers use s^-1 = s_d^-1 X^-d (1 + g)^-1,
// expanded until the terms vanish modulo pi^M. The output extends below d * h.lo to the first
// exponent where s^n is certified zero modulo the working modulus.
Series phi_laurent(const FiniteHeightMap& m, const Series& h, long cap = 20000);

// s^-1 as a Laurent series on [lo, hi) with lo chosen from the modulus
Series inverse_of_s(const FiniteHeightMap& m, long modulus, long hi, long cap = 20000);

Rational lambda_star(const FiniteHeightMap& m, const Rational& v);

// s o s o ... o s (n times) on [0, hi)
Series iterate(const FiniteHeightMap& m, long n, long hi);

struct Conjugation {
    FieldElement a;
    Series s_a;
    FiniteHeightMap map;
};

// fixed point a of s with val(a) = val(s(0)), and s_a(X) = s(X + a) - a
Conjugation fixed_point_and_conjugate(const Series& s);

}  // namespace robba
