#pragma once

#include <vector>

#include "robba/substitution.hpp"

namespace robba {

struct EigenReport {
    Series residual;
    Valuation deficiency;
    long modulus = 0;
    bool pass = false;
    std::string str() const;
};

// m_a = prod_{i >= 0} a(s^i(X)), so that phi(m_a) a = m_a; output on the window of a.
// Stops once the next factor is certified to be 1 modulo the running modulus.
Series product_solution(const FiniteHeightMap& m, const Series& a, long cap = 4096);

// log_s = X m_r with r = s / (s'(0) X), on [0, hi). The output modulus is that of s lowered by the
// denominators s'(0)^-1 that r introduces; build s at a higher modulus to compensate.
Series log_s(const FiniteHeightMap& m, long hi, long cap = 4096);

// phi(f) - lam f
EigenReport verify_eigen(const FiniteHeightMap& m, const Series& f, const FieldElement& lam);
EigenReport verify_eigen(const FiniteHeightMap& m, const Series& f, const Series& lam);

// det (f_j^(i)), division free
Series wronskian(const std::vector<Series>& fs);

// f'(s) s' - lam f' for constant lam
EigenReport chain_rule_check(const FiniteHeightMap& m, const Series& f, const FieldElement& lam);

EigenReport make_report(const Series& residual);

}  // namespace robba
