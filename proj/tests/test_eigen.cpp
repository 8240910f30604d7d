#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "robba/eigen.hpp"
#include "robba/trace.hpp"

using namespace robba;
using th::I;
using th::ints;

namespace {

FiniteHeightMap fh(const Field& K, std::vector<long> s, long M) {
    long n = static_cast<long>(s.size());
    return FiniteHeightMap::validate(ints(K, 0, std::move(s), n, M));
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

Series random_one_plus(const Field& K, long hi, long M, std::mt19937_64& rng) {
    Series a = th::random_series(K, 0, hi, M, rng);
    return a - Series::constant(K, a.coeff(0) - I(K, 1, M), hi, M);
}

}  // namespace

TEST_SUITE("eigen") {

TEST_CASE("product of a = 1 is 1") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 1}, 20);
    Series one = Series::constant(K, I(K, 1, 20), 12, 20);
    CHECK(product_solution(m, one) == one);
}

TEST_CASE("binary expansion product for X^2") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 0, 1}, 20);
    Series a = ints(K, 0, {1, 1}, 40, 20);
    Series r = product_solution(m, a);
    REQUIRE(r.hi() == 40);
    for (long n = 0; n < 40; ++n) CHECK(r.coeff(n).equals_at_precision(I(K, 1, 20)));
}

TEST_CASE("phi(m_a) a = m_a for random integral a") {
    std::mt19937_64 rng(7);
    struct C {
        Field K;
        std::vector<long> s;
    };
    for (const auto& c : {C{th::Qp(3), {0, 3, 1}}, C{th::Qp(3), {0, 0, 1}}, C{th::Qp(2), {0, 0, 0, 1}},
                          C{th::Qp(3), {0, 3, 3, 1}}, C{th::Qp(2), {0, 2, 1}}}) {
        auto m = fh(c.K, c.s, 30);
        Series a = random_one_plus(c.K, 16, 12, rng);
        Series ma = product_solution(m, a);
        CHECK(ma.is_integral());
        CHECK(ma.coeff(0).equals_at_precision(I(c.K, 1, 12)));
        Series res = phi_power(m, ma) * a - ma;
        CHECK(res.hi() >= 16);
        CHECK(res.is_zero());
    }
}

TEST_CASE("product reports NoStabilization at the cap") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 1}, 30);
    Series a = ints(K, 0, {1, 1}, 10, 20);
    CHECK(kind_of([&] { product_solution(m, a, 2); }) == ErrorKind::NoStabilization);
}

TEST_CASE("log_s for the cyclotomic map is log(1+X)") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 3, 1}, 60);
    Series L = log_s(m, 14);
    REQUIRE(L.hi() == 14);
    CHECK(L.modulus() >= 20);
    CHECK(L.coeff_is_zero(0));
    for (long k = 1; k < 14; ++k) {
        FieldElement want = FieldElement::from_rational(K, k % 2 ? 1 : -1, k, L.modulus());
        CHECK(L.coeff(k).equals_at_precision(want));
    }
}

TEST_CASE("log_s eigen identities") {
    struct C {
        const char* name;
        Field K;
        std::vector<long> s;
    };
    for (const auto& c : {C{"3X+X^2", th::Qp(3), {0, 3, 1}}, C{"(1+X)^3-1", th::Qp(3), {0, 3, 3, 1}},
                          C{"(1+X)^2-1", th::Qp(2), {0, 2, 1}}, C{"3X+X^3", th::Qp(3), {0, 3, 0, 1}}}) {
        CAPTURE(std::string(c.name));
        auto m = fh(c.K, c.s, 80);
        Series L = log_s(m, 16);
        CHECK(L.coeff(1).equals_at_precision(I(c.K, 1, 80)));
        Series Lk = L;
        FieldElement mu = m.s_prime_0();
        for (int k = 1; k <= 3; ++k) {
            auto rep = verify_eigen(m, Lk, mu);
            CHECK(rep.pass);
            CHECK(rep.residual.hi() >= 16);
            CHECK(rep.modulus >= 20);
            Lk = Lk * L;
            mu = mu * m.s_prime_0();
        }
    }
}

TEST_CASE("log_s needs s'(0) distinguishable from zero") {
    Field K = th::Qp(3);
    CHECK(kind_of([&] { log_s(fh(K, {0, 0, 1}, 20), 8); }) == ErrorKind::SPrimeZeroIndistinguishable);
}

TEST_CASE("verify_eigen trivial cases") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 1}, 20);
    Series one = Series::constant(K, I(K, 1, 20), 10, 20);
    CHECK(verify_eigen(m, one, I(K, 1, 20)).pass);
    Series x = Series::monomial(K, 1, I(K, 1, 20), 10, 20);
    auto rep = verify_eigen(m, x, I(K, 1, 20));
    CHECK_FALSE(rep.pass);
    CHECK(rep.deficiency == Valuation::Exact(Rational(0)));
    CHECK(rep.residual.coeff(1).equals_at_precision(I(K, 2, 20)));
    CHECK(rep.residual.coeff(2).equals_at_precision(I(K, 1, 20)));
}

TEST_CASE("descent: psi(log_s) = d / s'(0) log_s") {
    Field K = th::Qp(3);
    for (std::vector<long> s : {std::vector<long>{0, 3, 1}, std::vector<long>{0, 3, 3, 1}}) {
        auto m = fh(K, s, 120);
        Series L = log_s(m, 90).with_modulus(20);
        TraceOperator t(m, L.modulus(), 12);
        Series lhs = t.psi_power(L);
        REQUIRE(lhs.hi() >= 3);
        FieldElement c = FieldElement::from_integer(K, m.d(), 120) / m.s_prime_0();
        Series rhs = L.scaled(c);
        long hi = std::min(lhs.hi(), rhs.hi());
        Series diff = lhs.restricted(0, hi) - rhs.restricted(0, hi);
        CHECK(diff.is_zero());
    }
}

TEST_CASE("wronskian basics") {
    Field K = th::Qp(5);
    std::mt19937_64 rng(3);
    Series f = th::random_series(K, 0, 12, 10, rng);
    Series g = th::random_series(K, 0, 12, 10, rng);
    Series h = th::random_series(K, 0, 12, 10, rng);
    CHECK(wronskian({f}) == f);
    CHECK(wronskian({f, f}).is_zero());
    Series one = Series::constant(K, I(K, 1, 10), 12, 10);
    Series x = Series::monomial(K, 1, I(K, 1, 10), 12, 10);
    Series w = wronskian({one, x}).trimmed_low();
    CHECK(w.coeff(0).equals_at_precision(I(K, 1, 10)));
    for (long n = 1; n < w.hi(); ++n) CHECK(w.coeff_is_zero(n));
    CHECK(th::same(wronskian({f, g, h}), -wronskian({g, f, h})));
    CHECK(wronskian({f, g, f}).is_zero());
    // W(f, g) = f g' - f' g
    CHECK(th::same(wronskian({f, g}), f * g.derivative() - f.derivative() * g));
}

TEST_CASE("log_s and its multiples are dependent") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 3, 1}, 60);
    Series L = log_s(m, 14);
    CHECK(wronskian({L, L.scaled(I(K, 7, 60))}).is_zero());
    CHECK_FALSE(wronskian({L, L * L}).is_zero());
}

TEST_CASE("chain rule identity") {
    Field K = th::Qp(3);
    auto m = fh(K, {0, 3, 3, 1}, 60);
    Series L = log_s(m, 14);
    CHECK(chain_rule_check(m, L, m.s_prime_0()).pass);
    // log_s' = 1/(1+X)
    Series lp = L.derivative().trimmed_low();
    for (long n = 0; n < lp.hi(); ++n) CHECK(lp.coeff(n).equals_at_precision(I(K, n % 2 ? -1 : 1, lp.modulus())));
    Series one = Series::constant(K, I(K, 1, 60), 10, 60);
    CHECK(chain_rule_check(m, one, I(K, 1, 60)).pass);
    CHECK(chain_rule_check(m, L * L, m.s_prime_0() * m.s_prime_0()).pass);
    CHECK_FALSE(chain_rule_check(m, L, I(K, 1, 60)).pass);
}

}  // TEST_SUITE
