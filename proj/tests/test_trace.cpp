#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "robba/trace.hpp"

using namespace robba;
using th::I;
using th::ints;

namespace {

using Poly = std::vector<mpz_class>;

Poly padd(Poly a, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size());
    for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

Poly pmul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

// Traces of T^j on Z[Y][T]/(s(T) - Y) for monic integer s, via powers of the companion matrix
std::vector<Poly> companion_traces(const Poly& s, long J) {
    const size_t d = s.size() - 1;
    using Mat = std::vector<std::vector<Poly>>;
    Mat C(d, std::vector<Poly>(d));
    for (size_t i = 1; i < d; ++i) C[i][i - 1] = {1};
    for (size_t i = 0; i < d; ++i) C[i][d - 1] = {-s[i]};
    C[0][d - 1] = padd(C[0][d - 1], Poly{0, 1});
    Mat A(d, std::vector<Poly>(d));
    for (size_t i = 0; i < d; ++i) A[i][i] = {1};
    std::vector<Poly> out;
    for (long j = 0; j <= J; ++j) {
        Poly tr;
        for (size_t i = 0; i < d; ++i) tr = padd(tr, A[i][i]);
        out.push_back(tr);
        Mat B(d, std::vector<Poly>(d));
        for (size_t i = 0; i < d; ++i)
            for (size_t k = 0; k < d; ++k)
                for (size_t l = 0; l < d; ++l) B[i][k] = padd(B[i][k], pmul(A[i][l], C[l][k]));
        A = B;
    }
    return out;
}

bool matches_poly(const Series& a, const Poly& p) {
    for (long n = a.lo(); n < a.hi(); ++n) {
        mpz_class c = n >= 0 && n < static_cast<long>(p.size()) ? p[n] : 0;
        if (!(a.coeff(n) - FieldElement::from_integer(a.field(), c, a.modulus())).is_zero()) return false;
    }
    return true;
}

struct Case {
    const char* name;
    Field K;
    Poly s;
};

std::vector<Case> corpus() {
    Field q3 = th::Qp(3), q2 = th::Qp(2);
    return {{"3X+X^2", q3, {0, 3, 1}},   {"(1+X)^3-1", q3, {0, 3, 3, 1}},    {"(1+X)^2-1", q2, {0, 2, 1}},
            {"X^2", q3, {0, 0, 1}},      {"X^3", q2, {0, 0, 0, 1}},          {"3X+X^3", q3, {0, 3, 0, 1}},
            {"pi X+X^2", th::cyclo3(), {0, 0, 1}}, {"3X+X^2+X^4", q3, {0, 3, 1, 0, 1}}};
}

FiniteHeightMap fh(const Field& K, const Poly& s, long M = 40) {
    return FiniteHeightMap::validate(Series::from_integers(K, 0, static_cast<long>(s.size()), M, s));
}

FiniteHeightMap fh(const Case& c, long M = 40) {
    if (std::string(c.name) == "pi X+X^2") {
        std::map<long, FieldElement> m{{1, FieldElement::uniformizer(c.K, M)}, {2, I(c.K, 1, M)}};
        return FiniteHeightMap::validate(Series::from_coefficients(c.K, 0, 3, M, m));
    }
    return fh(c.K, c.s, M);
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("trace") {

TEST_CASE("Weierstrass data of polynomial substitutions") {
    Field K = th::Qp(3);
    auto w = weierstrass_prepare(fh(K, {0, 3, 1}), 20, 8);
    CHECK(w.polynomial_in_y);
    REQUIRE(w.P.size() == 3);
    CHECK(matches_poly(w.P[0], {0, -1}));
    CHECK(matches_poly(w.P[1], {3}));
    CHECK(matches_poly(w.P[2], {1}));
    REQUIRE(w.U.size() == 1);
    CHECK(matches_poly(w.U[0], {1}));

    auto w3 = weierstrass_prepare(fh(K, {0, 0, 0, 1}), 20, 8);
    CHECK(matches_poly(w3.P[0], {0, -1}));
    CHECK(matches_poly(w3.P[1], {0}));
    CHECK(matches_poly(w3.P[2], {0}));

    auto wc = weierstrass_prepare(fh(K, {0, 3, 3, 1}), 20, 8);
    CHECK(matches_poly(wc.P[0], {0, -1}));
    CHECK(matches_poly(wc.P[1], {3}));
    CHECK(matches_poly(wc.P[2], {3}));
}

TEST_CASE("Weierstrass lifting for a series with terms beyond X^d") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 1, 0, 1}, 30);
    auto w = weierstrass_prepare(m, 20, 10);
    CHECK_FALSE(w.polynomial_in_y);
    REQUIRE(w.P.size() == 3);
    REQUIRE(w.U.size() == 3);
    for (const auto& r : weierstrass_residual(m, w)) CHECK(r.is_zero());
    // P reduces to T^2 modulo (pi, Y); U has unit constant term
    CHECK(w.P[0].coeff(0).is_zero());
    CHECK(w.P[1].coeff(0).pi_valuation() >= 1);
    CHECK(w.U[0].coeff(0).pi_valuation() == 0);
}

TEST_CASE("power sums pin the Newton sign convention") {
    Field K = th::Qp(3);
    auto w = weierstrass_prepare(fh(K, {0, 3, 1}), 20, 8);
    auto p = power_sums(w, 2);
    CHECK(matches_poly(p[0], {2}));
    CHECK(matches_poly(p[1], {-3}));
    CHECK(matches_poly(p[2], {9, 2}));
}

TEST_CASE("power sums of X^d are d Y^(j/d) on multiples of d") {
    for (long d : {2, 3, 4}) {
        Poly s(d + 1);
        s[d] = 1;
        auto w = weierstrass_prepare(fh(th::Qp(5), s), 20, 12);
        auto p = power_sums(w, 3 * d + 2);
        for (long j = 0; j <= 3 * d + 2; ++j) {
            Poly want(j / d + 1);
            if (j % d == 0) want[j / d] = d;
            CHECK(matches_poly(p[j], want));
        }
    }
}

TEST_CASE("power sums agree with companion matrix traces") {
    for (Poly s : {Poly{0, 3, 1}, Poly{0, 3, 3, 1}, Poly{0, 3, 0, 1}, Poly{0, 6, 3, 9, 1}}) {
        auto w = weierstrass_prepare(fh(th::Qp(3), s), 30, 10);
        auto p = power_sums(w, 12);
        auto want = companion_traces(s, 12);
        for (long j = 0; j <= 12; ++j) CHECK(matches_poly(p[j], want[j]));
    }
}

TEST_CASE("psi(1) = d across the corpus") {
    for (const auto& c : corpus()) {
        CAPTURE(std::string(c.name));
        auto m = fh(c);
        TraceOperator t(m, 20, 8);
        Series one = Series::constant(c.K, I(c.K, 1, 20), 1, 20).padded(80);
        Series r = t.psi_power(one);
        REQUIRE(r.hi() > 0);
        CHECK(matches_poly(r, {m.d()}));
    }
}

TEST_CASE("psi examples") {
    Field K = th::Qp(3);
    TraceOperator t(fh(K, {0, 3, 1}), 20, 10);
    Series x2 = Series::monomial(K, 2, I(K, 1, 20), 30, 20);
    Series r = t.psi_power(x2);
    REQUIRE(r.hi() >= 2);
    CHECK(matches_poly(r, {9, 2}));

    Series inv_x = Series::monomial(K, -1, I(K, 1, 20), 30, 20);
    Series q = t.psi_laurent(inv_x);
    CHECK(q.coeff(-1).equals_at_precision(I(K, 3, 20)));
    for (long n = q.lo(); n < q.hi(); ++n)
        if (n != -1) CHECK(q.coeff_is_zero(n));

    // psi_laurent on power series falls through to psi_power
    std::mt19937_64 rng(5);
    Series h = th::random_series(K, 0, 30, 20, rng);
    CHECK(t.psi_laurent(h) == t.psi_power(h));
}

TEST_CASE("psi for X^d keeps every d-th coefficient") {
    std::mt19937_64 rng(11);
    for (long d : {2, 3}) {
        Field K = th::Qp(d == 2 ? 3 : 2);
        Poly s(d + 1);
        s[d] = 1;
        TraceOperator t(fh(K, s), 16, 10);
        Series h = th::random_series(K, 0, 28, 16, rng);
        Series r = t.psi_power(h);
        REQUIRE(r.hi() >= 5);
        for (long n = 0; n < r.hi(); ++n) CHECK(r.coeff(n).equals_at_precision(h.coeff(d * n) * I(K, d, 16)));

        Series inv_x = Series::monomial(K, -1, I(K, 1, 16), 10, 16);
        CHECK(t.psi_laurent(inv_x).is_zero());
    }
}

TEST_CASE("psi o phi = d across the corpus") {
    std::mt19937_64 rng(21);
    for (const auto& c : corpus()) {
        CAPTURE(std::string(c.name));
        auto m = fh(c, 60);
        TraceOperator t(m, 16, 10);
        Series h = th::random_series(c.K, 0, 10, 16, rng);
        Series r = t.psi_power(phi_power(m, h.padded(60)));
        REQUIRE(r.hi() >= 3);
        Series dh = h.scaled(I(c.K, m.d(), 16));
        CHECK(th::same(r, dh));
    }
}

TEST_CASE("projection formula psi(f phi(g)) = psi(f) g") {
    std::mt19937_64 rng(33);
    for (const auto& c : corpus()) {
        CAPTURE(std::string(c.name));
        auto m = fh(c, 60);
        TraceOperator t(m, 14, 10);
        Series f = th::random_series(c.K, 0, 24, 14, rng);
        Series g = th::random_series(c.K, 0, 12, 14, rng);
        f = f.padded(80);
        g = g.padded(60);
        Series lhs = t.psi_power(f * phi_power(m, g));
        Series rhs = t.psi_power(f) * g;
        REQUIRE(std::min(lhs.hi(), rhs.hi()) >= 2);
        CHECK(th::same(lhs, rhs));
    }
}

TEST_CASE("decompose examples") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 1});
    TraceOperator t(m, 20, 10);
    Series x1 = Series::monomial(K, 1, I(K, 1, 20), 20, 20);
    auto H = t.decompose(x1);
    CHECK(matches_poly(H[0], {0}));
    CHECK(matches_poly(H[1], {1}));
    auto Hs = t.decompose(m.padded(20));
    CHECK(matches_poly(Hs[0], {0, 1}));
    CHECK(matches_poly(Hs[1], {0}));
}

TEST_CASE("decompose reassembles and agrees with power sums") {
    std::mt19937_64 rng(44);
    for (const auto& c : corpus()) {
        CAPTURE(std::string(c.name));
        auto m = fh(c, 60);
        TraceOperator t(m, 14, 12);
        Series h = th::random_series(c.K, 0, 24, 14, rng).padded(60);
        auto H = t.decompose(h);
        REQUIRE(static_cast<long>(H.size()) == m.d());
        Series back = Series::zero(c.K, 0, 24, 14);
        std::optional<Series> via;
        for (long j = 0; j < m.d(); ++j) {
            REQUIRE(H[j].hi() >= 2);
            back = back + phi_power(m, H[j]).shifted(j);
            Series term = t.power_sum(j).restricted(0, H[j].hi()) * H[j];
            via = via ? *via + term : term;
        }
        long hi = std::min(back.hi(), 24L);
        CHECK(th::same_on(back, h, 0, hi));
        CHECK(th::same(*via, t.psi_power(h)));
    }
}

TEST_CASE("decompose rejects negative exponents") {
    Field K = th::Qp(3);
    TraceOperator t(fh(K, {0, 3, 1}), 10, 6);
    CHECK(kind_of([&] { t.decompose(Series::monomial(K, -1, I(K, 1, 10), 4, 10)); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("psi of negative monomials satisfies the division recursion") {
    // X^-n = phi(1/X) sum_j s_j X^(j-n), so psi(X^-n) = X^-1 sum_j s_j psi(X^(j-n))
    for (const auto& c : corpus()) {
        CAPTURE(std::string(c.name));
        auto m = fh(c, 60);
        const long M = 14;
        TraceOperator t(m, M, 16);
        auto psi_of = [&](long k) -> Series {
            if (k < 0) return t.psi_negative_monomial(-k);
            return t.power_sum(k);
        };
        for (long n = 1; n <= 5; ++n) {
            std::optional<Series> acc;
            for (long j = m.order(); j <= m.degree(); ++j) {
                if (m.s().coeff_is_zero(j)) continue;
                Series term = psi_of(j - n).scaled(m.s().coeff(j));
                acc = acc ? *acc + term : term;
            }
            CHECK(th::same(t.psi_negative_monomial(n), acc->shifted(-1)));
        }
    }
}

TEST_CASE("Gauss bound for psi of negative monomials") {
    for (const auto& c : corpus()) {
        CAPTURE(std::string(c.name));
        auto m = fh(c, 60);
        TraceOperator t(m, 24, 20);
        for (Rational v : {Rational(1, 4), Rational(1, 2), Rational(1), Rational(3)}) {
            Rational w = lambda_star(m, v);
            for (long n = 1; n <= 6; ++n) {
                GaussValue g = gauss_valuation(t.psi_negative_monomial(n), w);
                CHECK(g.value >= Rational(1 - n) * v - w);
            }
        }
    }
}

TEST_CASE("discriminant of X^d") {
    Field K = th::Qp(5);
    TraceOperator t2(fh(K, {0, 0, 1}), 20, 8);
    Series d2 = t2.discriminant();
    CHECK(matches_poly(d2, {0, 0, 4}));
    TraceOperator t3(fh(K, {0, 0, 0, 1}), 20, 8);
    CHECK(matches_poly(t3.discriminant(), {0, 0, 0, 0, 0, 0, -27}));
}

TEST_CASE("discriminant of 3X+X^2 against the two-root product") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 1});
    TraceOperator t(m, 20, 8);
    CHECK(matches_poly(t.discriminant_y(), {9, 4}));
    CHECK(matches_poly(t.discriminant(), {9, 12, 4}));
    // roots x, -3-x of T^2+3T-Y: N(s') = (3+2x)(-3-2x) = -(9+12x+4x^2) = -(9+4Y)
    // so det(Tr(e_i e_j)) = (-1)^(d(d-1)/2) N(s')
    Poly Nsp{-9, -4};
    CHECK(matches_poly(-t.discriminant_y(), Nsp));
}

TEST_CASE("cyclotomic discriminant is a unit of E^+") {
    Field K = th::Qp(3);
    TraceOperator t(fh(K, {0, 3, 3, 1}), 20, 10);
    Series delta = t.discriminant();
    CHECK(delta.coeff(0).equals_at_precision(I(K, -27, 20)));
    long v0 = delta.coeff_pi_valuation(0);
    for (long n = 1; n < delta.hi(); ++n) CHECK(delta.coeff_pi_valuation(n) >= v0);
}

TEST_CASE("dual basis") {
    Field K = th::Qp(3);
    SUBCASE("3X+X^2") {
        TraceOperator t(fh(K, {0, 3, 1}), 12, 40);
        auto rep = dual_basis_check(t);
        CHECK(rep.pass);
        CHECK_FALSE(rep.deficiency.exact);
        for (auto& row : rep.residuals)
            for (auto& r : row) CHECK(r.hi() >= 2);
    }
    SUBCASE("X^2") {
        TraceOperator t(fh(K, {0, 0, 1}), 12, 24);
        auto rep = dual_basis_check(t);
        CHECK(rep.pass);
        CHECK(rep.residuals.size() == 2);
    }
    SUBCASE("requires a polynomial Weierstrass factor") {
        TraceOperator t(fh(K, {0, 3, 1, 0, 1}), 10, 8);
        CHECK(kind_of([&] { dual_basis_check(t); }) == ErrorKind::PreconditionViolated);
    }
}

TEST_CASE("determinant and adjugate") {
    Field K = th::Qp(7);
    std::mt19937_64 rng(9);
    for (int n : {1, 2, 3, 4}) {
        std::vector<std::vector<Series>> a(n, std::vector<Series>(n));
        for (auto& row : a)
            for (auto& x : row) x = th::random_series(K, 0, 6, 10, rng);
        Series det = determinant(a);
        auto adj = adjugate(a);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::optional<Series> acc;
                for (int k = 0; k < n; ++k) {
                    Series term = adj[i][k] * a[k][j];
                    acc = acc ? *acc + term : term;
                }
                Series want = i == j ? det : Series::zero(K, 0, 6, 10);
                CHECK(th::same(*acc, want));
            }
    }
}

}  // TEST_SUITE
