#pragma once

#include <optional>
#include <vector>

#include "robba/substitution.hpp"

namespace robba {

// Q_p(zeta_p) with uniformizer pi a root of ((1+T)^p - 1)/T, so that eps = 1 + pi is a primitive p-th root of 1
struct CyclotomicContext {
    long p = 0;
    long modulus = 0;
    Field field;
    FieldElement epsilon;
    std::vector<FieldElement> roots;  // eps^i, 0 <= i < p
    Rational rho_v;                   // val(eps - 1) = 1/(p-1)

    // s = (1+X)^p - 1 over the cyclotomic field at the given modulus
    FiniteHeightMap frobenius(long modulus) const;
};

CyclotomicContext build_cyclotomic(long p, long modulus);

// g((1+X) c - 1) for c = 1 + (pi-adically small), by direct composition
Series twist_by(const Series& g, const FieldElement& c, long cap = 20000);
// g((1+X) eps - 1)
Series twist_direct(const CyclotomicContext& ctx, const Series& g, long cap = 20000);

// twist of a purely negative g by the closed form for b_m; printed = true uses the exponent n - m on
// (eps - 1) instead of m - n
Series twist_coefficients(const CyclotomicContext& ctx, const Series& g, bool printed = false);

// sum_i h(eps^i (1+X) - 1)
Series trace_oracle(const CyclotomicContext& ctx, const Series& h, long cap = 20000);

// (Tx)_l = sum_{k <= l} (-1)^k binom(l, k) x_k for l < L
std::vector<FieldElement> binomial_transform(const std::vector<FieldElement>& x, long L);

// sum_k (-1)^k binom(z, k) x_k for z in Z_p. tail_valuation bounds val(x_k) for k >= x.size() (nullopt: x_k = 0
// there). Raises TailNotCertified when the tail cannot be bounded to the requested pi-adic precision.
FieldElement mahler_eval(const std::vector<FieldElement>& x, const FieldElement& z,
                         const std::optional<Rational>& tail_valuation, long precision, long cap = 1 << 20);

}  // namespace robba
