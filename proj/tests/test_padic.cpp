#include "doctest.h"

#include "helpers.hpp"

using namespace robba;
using th::I;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

mpz_class int_of(const FieldElement& x) {
    mpz_class z;
    REQUIRE(x.as_integer(z));
    return z;
}

std::vector<Field> fields() {
    return {Field::make(3), Field::make(2), Field::make(3, {-3, 0, 1}), th::cyclo3(), Field::make(2, {2, 1}),
            Field::make(5, {5, 10, 0, 1})};
}

}  // namespace

TEST_SUITE("padic") {

TEST_CASE("field construction") {
    Field q3 = Field::make(3);
    CHECK(q3.e() == 1);
    CHECK(q3.p() == 3);
    Field k = Field::make(3, {-3, 0, 1});
    CHECK(k.e() == 2);
    CHECK(FieldElement::uniformizer(k, 10).valuation() == Valuation::Exact(Rational(1, 2)));
    CHECK(kind_of([] { Field::make(3, {-1, 0, 1}); }) == ErrorKind::NotEisenstein);
    CHECK(kind_of([] { Field::make(3, {9, 0, 1}); }) == ErrorKind::NotEisenstein);
    CHECK(kind_of([] { Field::make(3, {3, 1, 1}); }) == ErrorKind::NotEisenstein);
    CHECK(kind_of([] { Field::make(4); }) == ErrorKind::NotPrime);
    CHECK(Field::make(3) == Field::make(3));
    CHECK(Field::make(3) != Field::make(5));
}

TEST_CASE("inverse of 1 - 3 is the geometric series") {
    Field K = Field::make(3);
    FieldElement x = I(K, 1, 4) - I(K, 3, 4);
    FieldElement y = x.inv();
    CHECK(y.precision() == 4);
    CHECK(int_of(y) == 40);
}

TEST_CASE("products and valuations") {
    Field K = Field::make(3);
    FieldElement nine = I(K, 3, 10) * I(K, 3, 10);
    CHECK(int_of(nine) == 9);
    CHECK(nine.valuation() == Valuation::Exact(Rational(2)));
    CHECK(I(K, 3, 10).valuation() == Valuation::Exact(Rational(1)));
    CHECK(FieldElement::zero(K, 10).valuation() == Valuation::AtLeast(Rational(10)));
    Field C = th::cyclo3();
    FieldElement eps = I(C, 1, 12) + FieldElement::uniformizer(C, 12);
    CHECK((eps - I(C, 1, 12)).valuation() == Valuation::Exact(Rational(1, 2)));
    CHECK(eps.pow(3).equals_at_precision(I(C, 1, 12)));
    CHECK(!eps.equals_at_precision(I(C, 1, 12)));
}

TEST_CASE("precision propagation") {
    Field K = Field::make(3);
    FieldElement a = I(K, 3, 5), b = I(K, 2, 7);
    CHECK((a + b).precision() == 5);
    // min(M1 + v2, M2 + v1) = min(5 + 0, 7 + 1)
    CHECK((a * b).precision() == 5);
    FieldElement c = I(K, 9, 8);
    CHECK((a * c).precision() == std::min(5 + 2, 8 + 1));
    // inverse of val-v element at M is known mod pi^(M - 2v)
    CHECK(c.inv().precision() == 8 - 4);
    CHECK(c.inv().valuation() == Valuation::Exact(Rational(-2)));
}

TEST_CASE("division by indistinguishable zero") {
    Field K = Field::make(3);
    CHECK(kind_of([&] { FieldElement::zero(K, 4).inv(); }) == ErrorKind::DivisionByIndistinguishableZero);
    CHECK(kind_of([&] { (I(K, 1, 4) / I(K, 81, 4)); }) == ErrorKind::DivisionByIndistinguishableZero);
}

TEST_CASE("precision exhaustion") {
    Field K = Field::make(3);
    CHECK(kind_of([&] { I(K, 27, 4).inv(); }) == ErrorKind::PrecisionExhausted);
}

TEST_CASE("rationals with unit denominators") {
    Field K = Field::make(3);
    FieldElement half = FieldElement::from_rational(K, 1, 2, 6);
    CHECK((half * I(K, 2, 6)).equals_at_precision(I(K, 1, 6)));
    FieldElement third = FieldElement::from_rational(K, 1, 3, 6);
    CHECK(third.valuation() == Valuation::Exact(Rational(-1)));
}

TEST_CASE("ramified multiplication against a hand expansion") {
    // Q_3(sqrt 3): (a + b pi)(c + d pi) = (ac + 3bd) + (ad + bc) pi
    Field K = Field::make(3, {-3, 0, 1});
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        long a = rng() % 1000, b = rng() % 1000, c = rng() % 1000, d = rng() % 1000;
        FieldElement x = FieldElement::from_coords(K, {a, b}, 30), y = FieldElement::from_coords(K, {c, d}, 30);
        FieldElement z = FieldElement::from_coords(K, {a * c + 3 * b * d, a * d + b * c}, 30);
        CHECK((x * y).with_precision(30).equals_at_precision(z));
    }
}

TEST_CASE("hensel roots match an exhaustive search mod 9") {
    Field K = Field::make(3);
    auto search = [](long b, long c, long seed) {
        std::vector<long> r;
        for (long x = 0; x < 9; ++x)
            if ((x * x + b * x + c) % 9 == 0 && x % 3 == seed % 3) r.push_back(x);
        return r;
    };
    {
        Polynomial f = {I(K, 2, 12), I(K, 0, 12), I(K, 1, 12)};
        FieldElement r = hensel_root(f, I(K, 1, 12));
        auto want = search(0, 2, 1);
        REQUIRE(want.size() == 1);
        CHECK(int_of(r) % 9 == want[0]);
        CHECK(int_of(r) % 9 == 4);
        CHECK(evaluate(f, r).is_zero());
    }
    {
        Polynomial f = {I(K, 3, 12), I(K, 2, 12), I(K, 1, 12)};
        FieldElement r = hensel_root(f, I(K, 0, 12));
        auto want = search(2, 3, 0);
        REQUIRE(want.size() == 1);
        CHECK(int_of(r) % 9 == want[0]);
        CHECK(int_of(r) % 9 == 3);
        CHECK(evaluate(f, r).is_zero());
    }
    Polynomial g = {I(K, -3, 12), I(K, 0, 12), I(K, 1, 12)};
    CHECK(kind_of([&] { hensel_root(g, I(K, 0, 12)); }) == ErrorKind::HenselCriterionFails);
}

TEST_CASE("hensel in a ramified field") {
    // sqrt(-2) in Q_3(sqrt 3) via T^2 + 2 from seed 1
    Field K = Field::make(3, {-3, 0, 1});
    Polynomial f = {I(K, 2, 20), I(K, 0, 20), I(K, 1, 20)};
    FieldElement r = hensel_root(f, I(K, 1, 20));
    CHECK(evaluate(f, r).is_zero());
    CHECK(r.precision() == 20);
}

TEST_CASE("ring axioms on random triples") {
    std::mt19937_64 rng(11);
    for (const Field& K : fields()) {
        for (int t = 0; t < 40; ++t) {
            long px = 8 + rng() % 10, py = 8 + rng() % 10, pz = 8 + rng() % 10;
            FieldElement x = th::random_element(K, px, rng, rng() % 3);
            FieldElement y = th::random_element(K, py, rng, rng() % 3);
            FieldElement z = th::random_element(K, pz, rng, rng() % 3);
            CHECK(((x + y) + z).equals_at_precision(x + (y + z)));
            CHECK((x * (y + z)).equals_at_precision(x * y + x * z));
            CHECK((x * y).equals_at_precision(y * x));
            if (!x.is_zero() && !y.is_zero()) {
                Valuation vx = x.valuation(), vy = y.valuation();
                CHECK((x * y).valuation() == Valuation::Exact(vx.q + vy.q));
            }
            if (!x.is_zero() && x.precision() - 2 * x.pi_valuation() > 2 * x.pi_valuation()) {
                FieldElement back = x.inv().inv();
                CHECK(back.equals_at_precision(x));
                CHECK(back.precision() <= x.precision());
            }
        }
    }
}

TEST_CASE("random hensel roots re-check by evaluation") {
    std::mt19937_64 rng(5);
    Field K = Field::make(5);
    for (int t = 0; t < 30; ++t) {
        // f = (T - r0)(T - r1) + 5 c with r0 != r1 mod 5: simple root near r0
        long r0 = rng() % 5, r1 = (r0 + 1 + rng() % 4) % 5, c = rng() % 100;
        Polynomial f = {I(K, r0 * r1 + 5 * c, 15), I(K, -(r0 + r1), 15), I(K, 1, 15)};
        FieldElement r = hensel_root(f, I(K, r0, 15));
        CHECK(evaluate(f, r).is_zero());
        CHECK(r.residue() == r0);
    }
}

TEST_CASE("rational arithmetic") {
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(-3, 6).str() == "-1/2");
    CHECK(Rational(4, 2).str() == "2");
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).ceil() == -3);
    CHECK(Rational::parse("3/4") == Rational(3, 4));
}

}
