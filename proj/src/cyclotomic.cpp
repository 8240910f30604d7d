#include "robba/cyclotomic.hpp"

#include <algorithm>

namespace robba {

namespace {

mpz_class binom(const mpz_class& n, unsigned long k) {
    mpz_class r;
    mpz_bin_ui(r.get_mpz_t(), n.get_mpz_t(), k);
    return r;
}

long vp_factorial(long k, long p) {
    long v = 0;
    for (long q = p; q <= k; q *= p) v += k / q;
    return v;
}

}  // namespace

CyclotomicContext build_cyclotomic(long p, long modulus) {
    if (modulus < 1) raise(ErrorKind::InvalidArgument, "modulus must be positive");
    std::vector<mpz_class> E;
    for (long k = 1; k <= p; ++k) E.push_back(binom(p, static_cast<unsigned long>(k)));
    CyclotomicContext ctx;
    ctx.p = p;
    ctx.modulus = modulus;
    ctx.field = Field::make(p, E);
    const Field& K = ctx.field;
    FieldElement one = FieldElement::from_integer(K, 1, modulus);
    ctx.epsilon = one + FieldElement::uniformizer(K, modulus);
    FieldElement x = one;
    for (long i = 0; i < p; ++i) {
        ctx.roots.push_back(x);
        x = x * ctx.epsilon;
    }
    if (!(x - one).is_zero() || (ctx.epsilon - one).is_zero())
        raise(ErrorKind::PreconditionViolated, "1 + pi is not a primitive p-th root of unity");
    ctx.rho_v = Rational(1, p - 1);
    return ctx;
}

FiniteHeightMap CyclotomicContext::frobenius(long M) const {
    std::vector<mpz_class> c;
    for (long k = 0; k <= p; ++k) c.push_back(k == 0 ? mpz_class(0) : binom(p, static_cast<unsigned long>(k)));
    return FiniteHeightMap::validate(Series::from_integers(field, 0, p + 1, M, c));
}

Series twist_by(const Series& g, const FieldElement& c, long cap) {
    const Field& K = g.field();
    require_same(K, c.field());
    FieldElement one = FieldElement::from_integer(K, 1, c.precision());
    FieldElement c1 = c - one;
    if (c1.is_zero()) return g;
    if (c1.pi_valuation() < 1) raise(ErrorKind::NonConvergentComposition, "c - 1 is not in the maximal ideal");

    std::optional<Series> pos;
    if (g.hi() > 0 && g.hi() > std::max(g.lo(), 0L)) {
        long H = g.hi();
        std::map<long, FieldElement> t{{0, c1}, {1, c}};
        pos = compose_power(g.restricted(0, H), Series::from_coefficients(K, 0, std::max(H, 2L), c.precision(), t));
    }
    if (g.lo() >= 0) return *pos;
    if (g.hi() < 0) raise(ErrorKind::InvalidArgument, "twist needs g known up to exponent 0");

    // Horner in u = (c X + c - 1)^-1, which is exact above its window
    long M = g.modulus() - std::min(0L, g.min_pi_valuation());
    std::map<long, FieldElement> t{{0, c1.with_precision(std::max(1L, std::min(M, c1.precision())))},
                                   {1, c.with_precision(std::max(1L, std::min(M, c.precision())))}};
    Series lin = Series::from_coefficients(K, 0, 2, M, t);
    LaurentInverse inv = invert_laurent(plan_laurent_inverse(lin, M), 0, cap);
    if (!inv.exact_high) raise(ErrorKind::NonConvergentComposition, "twist inverse is not exact");
    const Series& u = inv.inv;
    auto cst = [&](long n) { return Series::constant(K, g.coeff(n), 1, g.modulus()); };
    long N = -g.lo();
    Series acc = cst(-N);
    for (long n = N - 1; n >= 1; --n) acc = (exact_mul(acc, u, 1) + cst(-n)).trimmed_low();
    Series neg = exact_mul(acc, u, 1).trimmed_low();
    if (!pos) return neg.restricted(neg.lo(), 0);
    return neg.padded(std::max(neg.hi(), pos->hi())) + *pos;
}

Series twist_direct(const CyclotomicContext& ctx, const Series& g, long cap) { return twist_by(g, ctx.epsilon, cap); }

// With x_k = g_{k+1} (eps-1)^-(k+1) and y_l = (-1)^l eps^(l+1) (eps-1)^-(l+1) b_{l+1}, the corrected
//   b_m = eps^-m sum_{n=1}^m (-1)^(m-n) binom(m-1, n-1) g_n (eps-1)^(m-n)
// reads y = T x. The printed exponent n - m is evaluated term by term instead.
Series twist_coefficients(const CyclotomicContext& ctx, const Series& g, bool printed) {
    const Field& K = ctx.field;
    require_same(K, g.field());
    if (g.hi() != 0 || g.lo() >= 0) raise(ErrorKind::InvalidArgument, "twist_coefficients needs a window [lo, 0)");
    const long N = -g.lo();
    const long Mg = g.modulus();
    const long tau = std::min(0L, g.min_pi_valuation());
    // (eps-1)^j has pi-valuation j, so b_m vanishes modulo pi^Mg once m - N >= Mg - tau
    // the printed variant divides by (eps-1)^(m-n), costing m - 1 digits at b_m; stop at half the modulus
    const long mmax = printed ? std::max(1L, std::min(N, (Mg + tau) / 2)) : N + (Mg - tau) - 1;
    const long W = Mg + 4 * mmax + 16;
    FieldElement one = FieldElement::from_integer(K, 1, W);
    FieldElement eps = one + FieldElement::uniformizer(K, W);
    FieldElement em1 = eps - one;
    FieldElement eps_inv = eps.inv(), em1_inv = em1.inv();

    std::map<long, FieldElement> b;
    long mod = Mg;
    if (!printed) {
        // x is scaled by (eps-1)^mmax to keep every entry integral
        std::vector<FieldElement> x;
        for (long k = 0; k < N; ++k) x.push_back(g.coeff(-(k + 1)) * em1.pow(mmax - k - 1));
        x.resize(mmax, FieldElement::zero(K, W));
        auto y = binomial_transform(x, mmax);
        for (long l = 0; l < mmax; ++l) {
            long m = l + 1;
            FieldElement bm = y[l] * eps_inv.pow(m) * em1_inv.pow(mmax - m);
            if (l % 2) bm = -bm;
            b.emplace(-m, bm.with_precision(std::min(bm.precision(), Mg)));
        }
    } else {
        for (long m = 1; m <= mmax; ++m) {
            FieldElement acc = FieldElement::zero(K, W);
            for (long n = 1; n <= std::min(m, N); ++n) {
                FieldElement t = g.coeff(-n) * FieldElement::from_integer(K, binom(m - 1, n - 1), W) * em1_inv.pow(m - n);
                acc = (m - n) % 2 ? acc - t : acc + t;
            }
            FieldElement bm = acc * eps_inv.pow(m);
            mod = std::min(mod, bm.precision());
            b.emplace(-m, bm);
        }
    }
    for (auto& [k, v] : b) v = v.with_precision(std::max(1L, std::min(v.precision(), mod)));
    return Series::from_coefficients(K, -mmax, 0, std::max(mod, 1L), b);
}

Series trace_oracle(const CyclotomicContext& ctx, const Series& h, long cap) {
    Series acc = h;
    for (long i = 1; i < ctx.p; ++i) acc = acc + twist_by(h, ctx.roots[i], cap);
    return acc.trimmed_low();
}

std::vector<FieldElement> binomial_transform(const std::vector<FieldElement>& x, long L) {
    if (L < 0 || L > static_cast<long>(x.size())) raise(ErrorKind::InvalidArgument, "transform length exceeds input");
    std::vector<FieldElement> y;
    if (L == 0) return y;
    const Field& K = x[0].field();
    long big = 1;
    for (long k = 0; k < L; ++k) big = std::max(big, x[k].precision() + std::max(0L, -x[k].pi_valuation()) + 1);
    for (long l = 0; l < L; ++l) {
        FieldElement acc = FieldElement::zero(K, big);
        for (long k = 0; k <= l; ++k) {
            FieldElement t = FieldElement::from_integer(K, binom(l, k), big) * x[k];
            acc = k % 2 ? acc - t : acc + t;
        }
        y.push_back(acc);
    }
    return y;
}

FieldElement mahler_eval(const std::vector<FieldElement>& x, const FieldElement& z,
                         const std::optional<Rational>& tail_valuation, long precision, long cap) {
    if (x.empty()) raise(ErrorKind::InvalidArgument, "empty Mahler sequence");
    const Field& K = x[0].field();
    const long e = K.e(), p = K.p();
    mpz_class Z;
    if (!z.as_integer(Z)) raise(ErrorKind::PreconditionViolated, "Mahler evaluation needs z in Z_p");
    const long zp = z.precision() / e;  // z is known modulo p^zp
    const long K0 = std::min<long>(static_cast<long>(x.size()), cap);

    FieldElement acc = FieldElement::zero(K, precision);
    for (long k = 0; k < K0; ++k) {
        long pc = e * (zp - vp_factorial(k, p));
        if (pc < 1) raise(ErrorKind::PrecisionExhausted, "z is not known precisely enough for binom(z, k)");
        FieldElement t = FieldElement::from_integer(K, binom(Z, static_cast<unsigned long>(k)), pc) * x[k];
        acc = k % 2 ? acc - t : acc + t;
    }
    // binom(z, k) is a p-adic integer, so the tail is bounded by the valuations of x_k
    std::optional<long> tail;
    if (tail_valuation) tail = (*tail_valuation * Rational(e)).ceil();
    for (long k = K0; k < static_cast<long>(x.size()); ++k) {
        long v = x[k].is_zero() ? x[k].precision() : x[k].pi_valuation();
        tail = tail ? std::min(*tail, v) : v;
    }
    if (tail && *tail < precision) raise(ErrorKind::TailNotCertified, "tail bound below the requested precision");
    return acc.with_precision(std::min(acc.precision(), precision));
}

}  // namespace robba
