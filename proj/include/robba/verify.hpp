#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robba/substitution.hpp"

namespace robba {

struct Check {
    std::string name;
    bool pass = false;
    std::optional<Valuation> deficiency;  // absent for checks that compare rationals
    int e = 1;                            // ramification index used to print the deficiency as k/e
    std::string detail;
};

// "k/e" with e the ramification index; AtLeast values are prefixed by ">="
std::string format_valuation(const Valuation& v, int e);

struct CorpusEntry {
    std::string name;
    FiniteHeightMap map;
};

// 3X+X^2, (1+X)^p-1 for p in {2,3}, X^2, X^3, pX+X^p, and 3+3X+X^2 conjugated to its fixed point.
// p = 0 selects every entry; otherwise only maps over Q_p. Coefficients are exact integers held at the given modulus.
std::vector<CorpusEntry> builtin_corpus(long p, long modulus);

struct SuiteOptions {
    long p = 0;
    long modulus = 12;
    long lo = -20, hi = 60;  // sampling window
    unsigned long long seed = 1;
    long samples = 3;
    bool printed_bm = false;
};

// suite: psi-phi | eigen | cyclotomic | valuation | all
std::vector<Check> run_suite(const std::string& suite, const SuiteOptions& opt);

// a check from a residual series: pass when it is indistinguishable from zero on a nonempty window
Check residual_check(std::string name, const Series& residual, long min_modulus = 0);

}  // namespace robba
