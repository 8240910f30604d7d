#pragma once

#include <random>
#include <vector>

#include "robba/series.hpp"

namespace th {

using namespace robba;

inline Field Qp(long p) { return Field::make(p); }
inline Field cyclo3() { return Field::make(3, {3, 3, 1}); }

inline FieldElement I(const Field& K, long n, long prec) { return FieldElement::from_integer(K, n, prec); }

inline Series ints(const Field& K, long lo, std::vector<long> c, long hi, long M) {
    std::vector<mpz_class> v(c.begin(), c.end());
    return Series::from_integers(K, lo, hi, M, v);
}

inline FieldElement random_element(const Field& K, long prec, std::mt19937_64& rng, long min_val = 0) {
    std::vector<mpz_class> c(K.e());
    for (auto& x : c) x = static_cast<long>(rng() % 100000);
    return FieldElement::from_coords(K, c, prec, min_val);
}

inline Series random_series(const Field& K, long lo, long hi, long M, std::mt19937_64& rng) {
    int e = K.e();
    std::vector<mpz_class> d(static_cast<size_t>((hi - lo) * e));
    for (auto& x : d) x = static_cast<unsigned long>(rng() % 1000000007UL);
    return Series::from_raw(K, lo, hi, M, 0, d);
}

// coefficientwise equality on [lo, hi) at the smaller modulus
inline bool same_on(const Series& a, const Series& b, long lo, long hi) {
    for (long n = lo; n < hi; ++n)
        if (!(a.coeff(n) - b.coeff(n)).is_zero()) return false;
    return true;
}

inline bool same(const Series& a, const Series& b) {
    long lo = std::min(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
    return same_on(a, b, lo, hi);
}

}  // namespace th
