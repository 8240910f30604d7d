#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "robba/substitution.hpp"

namespace robba {

// polynomial in T whose coefficients are power series in Y on [0, N) modulo pi^M
using YPoly = std::vector<Series>;

struct WeierstrassData {
    long modulus = 0;
    long y_window = 0;
    YPoly P;  // monic, degree d: P[0..d-1] = c_0..c_{d-1}, P[d] = 1
    YPoly U;  // unit cofactor, degree deg(s) - d
    bool polynomial_in_y = false;  // c_i are exact polynomials in Y (deg s == d)
};

// s(T) - Y = P(T) U(T) modulo (pi^M, Y^N) by Newton lifting of the factor T^d of s mod (pi, Y)
WeierstrassData weierstrass_prepare(const FiniteHeightMap& m, long modulus, long y_window, long cap = 64);
// s(T) - Y - P(T) U(T), coefficientwise
YPoly weierstrass_residual(const FiniteHeightMap& m, const WeierstrassData& w);

// p_0..p_J by Newton's identities with e_i = (-1)^i c_{d-i}
std::vector<Series> power_sums(const WeierstrassData& w, long J);

// psi normalized by psi(1) = d, i.e. phi(psi(h)) is the trace of h over phi(E). Results are series in
// the variable X (the Y of the Weierstrass data renamed). Caches are filled on demand under a mutex.
class TraceOperator {
public:
    TraceOperator(const FiniteHeightMap& m, long modulus, long y_window);

    const FiniteHeightMap& map() const { return m_; }
    const WeierstrassData& weierstrass() const { return w_; }
    long modulus() const { return w_.modulus; }
    long y_window() const { return w_.y_window; }
    // min over hull vertices k < d of val(s_k)/(d - k); nullopt when s has no terms below X^d
    const std::optional<Rational>& kappa() const { return kappa_; }

    const Series& power_sum(long j) const;
    // psi(X^-n) = psi(q^n) X^-n with q = s/X
    const Series& psi_negative_monomial(long n) const;

    Series psi_power(const Series& h) const;
    Series psi_laurent(const Series& h) const;
    // psi of an exact polynomial: sum h_k p_k on the full Y window
    Series psi_polynomial(const Series& h) const;

    // h = sum_j X^j phi(H_j), j < d
    std::vector<Series> decompose(const Series& h, long cap = 4096) const;

    // det(p_{i+j}) as a series in Y, and delta(X) = det(...) o s
    Series discriminant_y() const;
    Series discriminant() const;

private:
    long certified_window(long W, long modulus, long tau_pi, long slack) const;

    FiniteHeightMap m_;
    WeierstrassData w_;
    std::optional<Rational> kappa_;
    mutable std::mutex mu_;
    mutable std::vector<Series> sums_;
    mutable std::vector<Series> neg_;  // neg_[n] = psi(X^-n), neg_[0] unused
};

struct DualBasisReport {
    std::vector<std::vector<Series>> residuals;  // psi(e_i^* e_j) - [i == j]
    Valuation deficiency;                        // least certified valuation over all residuals
    long modulus = 0;
    bool pass = false;
};

DualBasisReport dual_basis_check(const TraceOperator& t);

// determinant without division, by expansion over column subsets
Series determinant(const std::vector<std::vector<Series>>& a);
// cofactor matrix transposed, so that adj * a = det * I
std::vector<std::vector<Series>> adjugate(const std::vector<std::vector<Series>>& a);

// residual verdict helpers shared by the verification layers
Valuation residual_valuation(const Series& r);

}  // namespace robba
