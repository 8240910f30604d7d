#include "robba/substitution.hpp"

#include <algorithm>

namespace robba {

namespace {

Rational vq(long pi_val, long e) { return Rational(pi_val, e); }

}  // namespace

// ---------------------------------------------------------------- FiniteHeightMap

FiniteHeightMap FiniteHeightMap::validate(const Series& s_in) {
    if (s_in.lo() < 0) raise(ErrorKind::InvalidArgument, "substitution must be a power series");
    if (s_in.hi() <= 1) raise(ErrorKind::WidegUndetermined, "window too short");
    Series s = s_in.restricted(0, s_in.hi());
    if (!s.is_integral()) raise(ErrorKind::NotIntegral, "substitution has non-integral coefficients");
    if (!s.coeff_is_zero(0)) raise(ErrorKind::ConstantTermNotZero, "s(0) = " + s.coeff(0).str());
    long d = wideg(s);
    if (d == 1) raise(ErrorKind::HeightOne, "s'(0) is a unit");
    FiniteHeightMap m;
    m.s_ = s;
    m.d_ = d;
    m.order_ = s.order();
    m.degree_ = s.degree();
    m.s1_ = s.coeff(1);
    m.rho_v_ = rho_valuation(s);
    const long e = s.field().e();
    auto slope = [](const std::pair<long, Rational>& a, const std::pair<long, Rational>& b) {
        return (b.second - a.second) / Rational(b.first - a.first);
    };
    for (long k = m.order_; k <= d; ++k) {
        if (s.coeff_is_zero(k)) continue;
        std::pair<long, Rational> pt{k, vq(s.coeff_pi_valuation(k), e)};
        auto& h = m.hull_;
        while (h.size() >= 2 && slope(h[h.size() - 2], h.back()) >= slope(h.back(), pt)) h.pop_back();
        h.push_back(pt);
    }
    return m;
}

std::vector<Rational> FiniteHeightMap::lambda_breakpoints() const {
    std::vector<Rational> b;
    for (size_t i = hull_.size(); i-- > 1;)
        b.push_back((hull_[i - 1].second - hull_[i].second) / Rational(hull_[i].first - hull_[i - 1].first));
    return b;
}

Rational FiniteHeightMap::lambda_plus_threshold() const {
    auto b = lambda_breakpoints();
    Rational t = b.empty() ? Rational(0) : b.back();
    auto [k0, v0] = hull_.front();
    if (k0 > 1) t = max(t, (Rational(1, field().e()) - v0) / Rational(k0 - 1));
    return t;
}

Series FiniteHeightMap::padded(long hi) const { return s_.padded(hi); }

Rational lambda_star(const FiniteHeightMap& m, const Rational& v) {
    if (v < Rational(0)) raise(ErrorKind::InvalidArgument, "lambda* needs v >= 0");
    Rational best = m.lambda_vertices().front().second + Rational(m.lambda_vertices().front().first) * v;
    for (auto& [k, val] : m.lambda_vertices()) best = min(best, val + Rational(k) * v);
    return best;
}

// ---------------------------------------------------------------- phi

Series phi_power(const FiniteHeightMap& m, const Series& h) {
    require_same(m.field(), h.field());
    if (h.lo() < 0) raise(ErrorKind::InvalidArgument, "phi_power needs a power series");
    long W = m.order() * h.hi();
    if (W <= 0) return Series::zero(h.field(), 0, 0, h.modulus());
    return compose_power(h, m.padded(W));
}

Series inverse_of_s(const FiniteHeightMap& m, long modulus, long hi, long cap) {
    long M = std::min(modulus, m.modulus());
    LaurentInverse inv = invert_laurent(plan_laurent_inverse(m.s(), M), hi, cap);
    return inv.exact_high ? inv.inv.padded(hi) : inv.inv;
}

Series phi_laurent(const FiniteHeightMap& m, const Series& h, long cap) {
    require_same(m.field(), h.field());
    if (h.lo() >= 0) return phi_power(m, h);
    if (h.hi() < 0) raise(ErrorKind::InvalidArgument, "phi_laurent needs h known up to exponent 0");
    const Field& K = h.field();
    long hi_out = h.hi() > 0 ? m.order() * h.hi() : 0;
    long N = -h.lo();
    long M = std::min(m.modulus(), h.modulus() + h.shift());
    LaurentInversePlan pl = plan_laurent_inverse(m.s(), M);
    long hi_u = hi_out + N * (pl.k - pl.low) + 1;
    LaurentInverse inv = invert_laurent(pl, hi_u, cap);
    const Series& u = inv.inv;

    // Horner in u = 1/s
    long top = inv.exact_high ? 1 : hi_u;
    auto cst = [&](long n) { return Series::constant(K, h.coeff(n), top, h.modulus()); };
    auto mul = [&](const Series& a) { return inv.exact_high ? exact_mul(a, u, 1) : a * u; };
    Series acc = cst(-N);
    for (long n = N - 1; n >= 1; --n) acc = (mul(acc) + cst(-n)).trimmed_low();
    Series neg = mul(acc).trimmed_low();
    if (inv.exact_high) neg = neg.padded(std::max(hi_out, neg.hi()));
    if (neg.hi() < hi_out) raise(ErrorKind::ModulusExhausted, "negative part window fell short");
    neg = neg.restricted(neg.lo(), hi_out);
    if (h.hi() == 0) return neg;
    return phi_power(m, h.restricted(0, h.hi())) + neg;
}

// ---------------------------------------------------------------- iteration, conjugation

Series iterate(const FiniteHeightMap& m, long n, long hi) {
    if (n < 1) raise(ErrorKind::InvalidArgument, "iterate needs n >= 1");
    Series r = m.padded(hi).restricted(0, hi);
    for (long i = 1; i < n; ++i) r = phi_power(m, r).restricted(0, hi);
    return r;
}

Conjugation fixed_point_and_conjugate(const Series& s_in) {
    if (s_in.lo() < 0) raise(ErrorKind::InvalidArgument, "substitution must be a power series");
    Series s = s_in.restricted(0, s_in.hi());
    const Field& K = s.field();
    const long M = s.modulus();
    FieldElement c = s.coeff(0);
    if (!c.is_zero() && c.pi_valuation() <= 0)
        raise(ErrorKind::PreconditionViolated, "s(0) must lie in the maximal ideal");
    if (!s.is_integral()) raise(ErrorKind::NotIntegral, "substitution has non-integral coefficients");
    if (wideg(s) < 2) raise(ErrorKind::HeightOne, "wideg(s) must be at least 2");
    if (c.is_zero()) return {FieldElement::zero(K, M), s, FiniteHeightMap::validate(s)};

    // s(T) - T has one root of valuation val(s(0)); Newton from 0 converges because s'(0) - 1 is a unit
    Polynomial f;
    for (long k = 0; k < s.hi(); ++k) f.push_back(s.coeff(k));
    f[1] = f[1] - FieldElement::from_integer(K, 1, M);
    FieldElement a = hensel_root(f, FieldElement::zero(K, M));

    long va = a.is_zero() ? M : a.pi_valuation();
    long pad = s.hi() + ceil_div(M, va) + 1;
    std::map<long, FieldElement> lin{{0, a}, {1, FieldElement::from_integer(K, 1, M)}};
    Series shifted = compose_power(s.padded(pad), Series::from_coefficients(K, 0, pad, M, lin));
    Series sa = shifted.restricted(0, std::min(shifted.hi(), s.hi())) -
                Series::constant(K, a, std::min(shifted.hi(), s.hi()), M);
    return {a, sa, FiniteHeightMap::validate(sa)};
}

}  // namespace robba
