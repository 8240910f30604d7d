#include "robba/eigen.hpp"

#include <algorithm>

#include "robba/trace.hpp"

namespace robba {

EigenReport make_report(const Series& residual) {
    EigenReport r;
    r.residual = residual;
    r.deficiency = residual_valuation(residual);
    r.modulus = residual.modulus();
    r.pass = residual.is_zero();
    return r;
}

std::string EigenReport::str() const {
    return std::string(pass ? "pass" : "fail") + " deficiency " + deficiency.str() + " modulus " +
           std::to_string(modulus);
}

Series product_solution(const FiniteHeightMap& m, const Series& a, long cap) {
    require_same(m.field(), a.field());
    if (a.lo() < 0 || a.hi() < 1) raise(ErrorKind::InvalidArgument, "product_solution needs a power series");
    const Field& K = a.field();
    const long H = a.hi();
    if (!(a.coeff(0) - FieldElement::from_integer(K, 1, a.modulus())).is_zero())
        raise(ErrorKind::PreconditionViolated, "a(0) must be 1");
    std::vector<std::pair<long, long>> terms;  // (k, val a_k) for k >= 1
    for (long k = 1; k < H; ++k)
        if (!a.coeff_is_zero(k)) terms.emplace_back(k, a.coeff_pi_valuation(k));

    Series result = a.restricted(0, H);
    Series t = m.padded(H).restricted(0, H);
    for (long i = 1;; ++i) {
        if (t.is_zero() || terms.empty()) return result;
        // a(t) - 1 has valuation >= min_k val(a_k) + k beta; later iterates only have larger beta
        long beta = t.order() >= H ? -1 : t.min_pi_valuation();
        if (beta < 0) return result;
        long bound = terms.front().second + terms.front().first * beta;
        for (auto [k, v] : terms) bound = std::min(bound, v + k * beta);
        if (bound + std::min(0L, result.min_pi_valuation()) >= result.modulus()) return result;
        if (i > cap) raise(ErrorKind::NoStabilization, "product factors did not become trivial");
        Series f = compose_power(a, t);
        result = (result * f.padded(std::max(f.hi(), H))).restricted(0, std::min(H, f.hi()));
        t = phi_power(m, t).restricted(0, H);
    }
}

Series log_s(const FiniteHeightMap& m, long hi, long cap) {
    const Field& K = m.field();
    const FieldElement& s1 = m.s_prime_0();
    if (s1.is_zero()) raise(ErrorKind::SPrimeZeroIndistinguishable, "s'(0) vanishes at the working precision");
    FieldElement inv = s1.inv();
    const long M = m.modulus();
    std::map<long, FieldElement> c;
    for (long k = 1; k <= std::min(hi, m.degree()); ++k)
        if (!m.s().coeff_is_zero(k)) c.emplace(k - 1, m.s().coeff(k) * inv);
    long Mr = M - s1.pi_valuation();
    Series r = Series::from_coefficients(K, 0, std::max(hi - 1, 1L), Mr, c);
    return product_solution(m, r, cap).shifted(1).restricted(0, hi);
}

EigenReport verify_eigen(const FiniteHeightMap& m, const Series& f, const FieldElement& lam) {
    return make_report(phi_laurent(m, f) - f.scaled(lam));
}

EigenReport verify_eigen(const FiniteHeightMap& m, const Series& f, const Series& lam) {
    return make_report(phi_laurent(m, f) - lam * f);
}

Series wronskian(const std::vector<Series>& fs) {
    if (fs.empty()) raise(ErrorKind::InvalidArgument, "wronskian of nothing");
    const size_t n = fs.size();
    std::vector<std::vector<Series>> a(n, std::vector<Series>(n));
    for (size_t j = 0; j < n; ++j) {
        Series g = fs[j];
        for (size_t i = 0; i < n; ++i) {
            a[i][j] = g;
            if (i + 1 < n) g = g.derivative();
        }
    }
    return determinant(a);
}

EigenReport chain_rule_check(const FiniteHeightMap& m, const Series& f, const FieldElement& lam) {
    Series fp = f.derivative();
    Series sp = m.s().derivative();
    Series lhs = phi_laurent(m, fp);
    sp = sp.padded(std::max(sp.hi(), lhs.hi() - lhs.lo()));
    return make_report(lhs * sp - fp.scaled(lam));
}

}  // namespace robba
