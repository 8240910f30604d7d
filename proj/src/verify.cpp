#include "robba/verify.hpp"

#include <algorithm>
#include <random>

#include "robba/cyclotomic.hpp"
#include "robba/eigen.hpp"
#include "robba/trace.hpp"

namespace robba {

namespace {

Series random_integral(const Field& K, long lo, long hi, long M, std::mt19937_64& rng) {
    std::vector<mpz_class> d(static_cast<size_t>((hi - lo) * K.e()));
    for (auto& x : d) x = static_cast<unsigned long>(rng() % 1000000007UL);
    return Series::from_raw(K, lo, hi, M, 0, d);
}

FieldElement random_unit_or_not(const Field& K, long M, std::mt19937_64& rng) {
    std::vector<mpz_class> c(K.e());
    for (auto& x : c) x = static_cast<long>(rng() % 100000);
    return FieldElement::from_coords(K, c, M);
}

Series poly(const Field& K, const std::vector<long>& c, long M) {
    std::vector<mpz_class> v(c.begin(), c.end());
    return Series::from_integers(K, 0, static_cast<long>(c.size()), M, v);
}

Check rational_check(std::string name, bool ok, std::string detail = {}) {
    Check c;
    c.name = std::move(name);
    c.pass = ok;
    c.detail = std::move(detail);
    return c;
}

Series one_series(const Field& K, long hi, long M) {
    return Series::constant(K, FieldElement::from_integer(K, 1, M), hi, M);
}

// --------------------------------------------------------------- suites

void suite_psi_phi(const SuiteOptions& o, std::vector<Check>& out) {
    std::mt19937_64 rng(o.seed);
    const long M = o.modulus, W = std::max(2L, o.hi);
    for (const auto& [name, m] : builtin_corpus(o.p, M + 40)) {
        const Field& K = m.field();
        TraceOperator t(m, M, 16);
        Series one = one_series(K, 1, M).padded(4 * W);
        out.push_back(residual_check("psi-phi/" + name + "/psi(1)=d",
                                     t.psi_power(one) - one_series(K, 16, M).scaled(FieldElement::from_integer(K, m.d(), M))));
        for (long i = 0; i < o.samples; ++i) {
            Series h = random_integral(K, 0, W, M, rng);
            Series r = t.psi_power(phi_power(m, h)) - h.scaled(FieldElement::from_integer(K, m.d(), M));
            out.push_back(residual_check("psi-phi/" + name + "/psi(phi(h))=d*h/" + std::to_string(i), r));
        }
        for (long i = 0; i < o.samples; ++i) {
            Series f = random_integral(K, 0, W, M, rng), g = random_integral(K, 0, W, M, rng);
            Series r = t.psi_power(f * phi_power(m, g)) - t.psi_power(f) * g;
            out.push_back(residual_check("psi-phi/" + name + "/projection/" + std::to_string(i), r));
        }
    }
}

void bm_checks(const std::string& prefix, long p, const SuiteOptions& o, std::mt19937_64& rng, std::vector<Check>& out) {
    auto ctx = build_cyclotomic(p, o.modulus);
    for (long i = 0; i < o.samples; ++i) {
        long N = 2 + static_cast<long>(rng() % 29);
        Series g = random_integral(ctx.field, -N, 0, o.modulus, rng);
        Series direct = twist_direct(ctx, g);
        Series closed = twist_coefficients(ctx, g, o.printed_bm);
        long lo = std::max(direct.lo(), closed.lo());
        Series r = direct.restricted(lo, std::min(direct.hi(), closed.hi())) - closed.restricted(lo, closed.hi());
        out.push_back(residual_check(prefix + "/bm-vs-direct-twist" + (o.printed_bm ? "(printed)" : "") + "/p=" +
                                         std::to_string(p) + "/" + std::to_string(i),
                                     r));
    }
}

void suite_eigen(const SuiteOptions& o, std::vector<Check>& out) {
    std::mt19937_64 rng(o.seed + 1);
    const long M = o.modulus, H = std::clamp(o.hi, 4L, 50L);
    for (const auto& [name, m0] : builtin_corpus(o.p, M + 60)) {
        if (m0.s_prime_0().is_zero()) continue;
        const FiniteHeightMap& m = m0;
        const Field& K = m.field();
        Series L = log_s(m, H);
        std::string pre = "eigen/" + name;
        // cubes of log_s lose 3 |vmin| digits, so keep that many above M
        long need = M + 3 * std::max(0L, -L.min_pi_valuation());
        out.push_back(rational_check(pre + "/log_s-modulus", L.modulus() >= need,
                                     "modulus " + std::to_string(L.modulus()) + ", need " + std::to_string(need)));
        const Series full = L;
        L = L.with_modulus(std::min(L.modulus(), need));
        Series Lk = L;
        FieldElement mu = m.s_prime_0();
        for (int k = 1; k <= 3; ++k) {
            out.push_back(residual_check(pre + "/phi(log^" + std::to_string(k) + ")=s'(0)^" + std::to_string(k),
                                         verify_eigen(m, Lk, mu).residual, M));
            Lk = Lk * L;
            mu = mu * m.s_prime_0();
        }
        out.push_back(residual_check(pre + "/chain-rule(log)", chain_rule_check(m, L, m.s_prime_0()).residual, M));
        out.push_back(residual_check(pre + "/chain-rule(log^2)",
                                     chain_rule_check(m, L * L, m.s_prime_0() * m.s_prime_0()).residual, M));
        FieldElement c = random_unit_or_not(K, full.modulus(), rng);
        out.push_back(residual_check(pre + "/wronskian(log,c*log)", wronskian({full, full.scaled(c)}), M));
        TraceOperator t(m, M + 20, 12);
        FieldElement q = FieldElement::from_integer(K, m.d(), M + 20) / m.s_prime_0();
        // psi certifies fewer terms the higher the input modulus, so descend from M + val(s'(0))
        Series Ld = full.with_modulus(std::min(full.modulus(), M + m.s_prime_0().pi_valuation()));
        out.push_back(residual_check(pre + "/psi(log)=d/s'(0)*log", t.psi_power(Ld) - Ld.scaled(q), M));
        if (name.find("(1+X)^") != std::string::npos) {
            std::map<long, FieldElement> lg;
            for (long k = 1; k < H; ++k) lg.emplace(k, FieldElement::from_rational(K, k % 2 ? 1 : -1, k, M + 20));
            out.push_back(residual_check(pre + "/log_s=log(1+X)", L - Series::from_coefficients(K, 0, H, M, lg)));
        }
    }
    if (o.p == 0 || o.p == 2) bm_checks("eigen", 2, o, rng, out);
    if (o.p == 0 || o.p == 3) bm_checks("eigen", 3, o, rng, out);
}

void suite_cyclotomic(const SuiteOptions& o, std::vector<Check>& out) {
    std::mt19937_64 rng(o.seed + 2);
    const long M = o.modulus;
    for (long p : {2L, 3L}) {
        if (o.p != 0 && o.p != p) continue;
        auto ctx = build_cyclotomic(p, M);
        const Field& K = ctx.field;
        auto m = ctx.frobenius(M + 40);
        TraceOperator t(m, M, 24);
        std::string pre = "cyclotomic/p=" + std::to_string(p);
        Series tr1 = trace_oracle(ctx, one_series(K, 30, M));
        out.push_back(residual_check(pre + "/trace(1)=p",
                                     tr1 - one_series(K, 30, M).scaled(FieldElement::from_integer(K, p, M))));
        for (long i = 0; i < o.samples; ++i) {
            Series h = random_integral(K, o.lo, o.hi, M, rng);
            out.push_back(residual_check(pre + "/trace-oracle=phi(psi)/" + std::to_string(i),
                                         trace_oracle(ctx, h) - phi_laurent(m, t.psi_laurent(h))));
        }
        bm_checks("cyclotomic", p, o, rng, out);
        Series h = random_integral(K, std::min(o.lo, 0L), o.hi, M, rng);
        Series tw = h;
        for (long i = 0; i < p; ++i) tw = twist_direct(ctx, tw);
        out.push_back(residual_check(pre + "/twist^p=id", tw - h));
        for (long i = 0; i < o.samples; ++i) {
            Field Q = Field::make(p);
            std::vector<FieldElement> x;
            for (long k = 0; k < 64; ++k) x.push_back(random_unit_or_not(Q, 20, rng));
            auto y = binomial_transform(binomial_transform(x, 64), 64);
            bool ok = true;
            for (long k = 0; k < 64; ++k) ok = ok && y[k].equals_at_precision(x[k]);
            out.push_back(rational_check(pre + "/binomial-involution/" + std::to_string(i), ok));
        }
    }
}

void suite_valuation(const SuiteOptions& o, std::vector<Check>& out) {
    std::mt19937_64 rng(o.seed + 3);
    for (const auto& [name, m] : builtin_corpus(o.p, o.modulus + 40)) {
        const Field& K = m.field();
        std::string pre = "valuation/" + name;
        long exact = 0, bad = 0;
        for (long i = 0; i < 10 * o.samples; ++i) {
            Series h = random_integral(K, 0, 30, o.modulus, rng);
            if (i % 3 == 0) h = h.scaled(FieldElement::from_integer(K, K.p(), o.modulus + 10));
            Rational v(1 + static_cast<long>(rng() % 6), 2 + static_cast<long>(rng() % 6));
            GaussValue a = gauss_valuation(phi_power(m, h), v), b = gauss_valuation(h, lambda_star(m, v));
            if (a.exact && b.exact) {
                ++exact;
                if (a.value != b.value) ++bad;
            }
        }
        out.push_back(rational_check(pre + "/functoriality", bad == 0 && exact > 0,
                                     std::to_string(exact) + " exact pairs, " + std::to_string(bad) + " mismatches"));
        auto br = m.lambda_breakpoints();
        std::optional<Rational> first;
        if (!br.empty()) first = br.front();
        Rational plus = m.lambda_plus_threshold();
        bool gt = true, lin = true, above = true;
        for (long a = 1; a <= 100; ++a) {
            Rational v(a, 20);
            Rational l = lambda_star(m, v);
            gt = gt && l > v;
            if (!first || v < *first) lin = lin && l == Rational(m.d()) * v;
            if (v >= plus) above = above && l >= v + Rational(1, K.e());
        }
        out.push_back(rational_check(pre + "/lambda*>v", gt));
        out.push_back(rational_check(pre + "/lambda*=d*v-below-first-breakpoint", lin));
        out.push_back(rational_check(pre + "/lambda*>=v+1/e-above-threshold", above, "threshold " + plus.str()));
    }
}

}  // namespace

std::string format_valuation(const Valuation& v, int e) {
    Rational k = v.q * Rational(e);
    std::string s = k.is_integer() ? std::to_string(k.num()) + "/" + std::to_string(e) : v.q.fraction();
    return (v.exact ? "" : ">=") + s;
}

Check residual_check(std::string name, const Series& residual, long min_modulus) {
    Check c;
    c.name = std::move(name);
    c.e = residual.field().e();
    c.deficiency = residual_valuation(residual);
    bool nonempty = residual.hi() > residual.lo();
    c.pass = nonempty && residual.is_zero() && residual.modulus() >= min_modulus;
    c.detail = "window [" + std::to_string(residual.lo()) + "," + std::to_string(residual.hi()) + ") modulus " +
               std::to_string(residual.modulus());
    if (!nonempty) c.detail += " (empty)";
    return c;
}

std::vector<CorpusEntry> builtin_corpus(long p, long M) {
    std::vector<CorpusEntry> out;
    auto add = [&](long q, const std::string& name, const Series& s) {
        if (p == 0 || p == q) out.push_back({"Q" + std::to_string(q) + ":" + name, FiniteHeightMap::validate(s)});
    };
    Field q2 = Field::make(2), q3 = Field::make(3);
    add(3, "3X+X^2", poly(q3, {0, 3, 1}, M));
    add(2, "(1+X)^2-1", poly(q2, {0, 2, 1}, M));
    add(3, "(1+X)^3-1", poly(q3, {0, 3, 3, 1}, M));
    add(2, "X^2", poly(q2, {0, 0, 1}, M));
    add(2, "X^3", poly(q2, {0, 0, 0, 1}, M));
    add(3, "X^2", poly(q3, {0, 0, 1}, M));
    add(3, "X^3", poly(q3, {0, 0, 0, 1}, M));
    add(2, "2X+X^2", poly(q2, {0, 2, 1}, M));
    add(3, "3X+X^3", poly(q3, {0, 3, 0, 1}, M));
    if (p == 0 || p == 3) {
        auto c = fixed_point_and_conjugate(poly(q3, {3, 3, 1}, M));
        out.push_back({"Q3:conj(3+3X+X^2)", c.map});
    }
    return out;
}

std::vector<Check> run_suite(const std::string& suite, const SuiteOptions& opt) {
    std::vector<Check> out;
    bool all = suite == "all";
    if (!all && suite != "psi-phi" && suite != "eigen" && suite != "cyclotomic" && suite != "valuation")
        raise(ErrorKind::InvalidArgument, "unknown suite " + suite);
    if (all || suite == "psi-phi") suite_psi_phi(opt, out);
    if (all || suite == "eigen") suite_eigen(opt, out);
    if (all || suite == "cyclotomic") suite_cyclotomic(opt, out);
    if (all || suite == "valuation") suite_valuation(opt, out);
    return out;
}

}  // namespace robba
