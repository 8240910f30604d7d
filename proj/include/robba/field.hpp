#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

#include "robba/error.hpp"
#include "robba/rational.hpp"

namespace robba {

namespace detail {
struct FieldData;
}

// K = Q_p or Q_p[T]/(E) with E Eisenstein of degree e. The residue field is F_p.
// Precision and exponents of pi are counted in pi-units; val(p) = 1, val(pi) = 1/e.
class Field {
public:
    Field() = default;

    // eisenstein: coefficients c_0..c_e, least significant first, monic. Empty means Q_p with pi = p.
    static Field make(long p, const std::vector<mpz_class>& eisenstein = {});

    bool valid() const { return d_ != nullptr; }
    long p() const;
    int e() const;
    // c_0..c_{e-1},1 as used for reduction; for plain Q_p this is {-p, 1}.
    std::vector<mpz_class> eisenstein() const;
    bool has_explicit_polynomial() const;
    std::string describe() const;

    friend bool operator==(const Field& a, const Field& b);
    friend bool operator!=(const Field& a, const Field& b) { return !(a == b); }

    const detail::FieldData& data() const { return *d_; }

private:
    std::shared_ptr<const detail::FieldData> d_;
};

void require_same(const Field& a, const Field& b);

struct Valuation {
    bool exact = false;
    Rational q;

    static Valuation Exact(Rational v) { return {true, v}; }
    static Valuation AtLeast(Rational v) { return {false, v}; }
    friend bool operator==(const Valuation&, const Valuation&) = default;
    std::string str() const;
};

namespace detail {

struct FieldData {
    long p = 0;
    int e = 1;
    mpz_class pz;
    std::vector<mpz_class> c;     // c_0..c_{e-1}
    std::vector<mpz_class> winv;  // coordinates of pi^e / p, a unit with integer coordinates
    bool explicit_poly = false;
};

// Arithmetic on integral pi-basis coordinates modulo pi^R. Coordinate i is kept in [0, p^ceil((R-i)/e)).
class Arith {
public:
    Arith(const FieldData& f, long R);

    const FieldData& f;
    int e;
    long R;
    std::vector<mpz_class> cmod;
    mpz_class top;  // p^ceil(R/e): every cmod divides it

    void reduce(mpz_class* x) const;
    bool is_zero(const mpz_class* x) const;
    // pi-adic valuation of a reduced element; R when zero
    long val(const mpz_class* x) const;
    // out = a*b reduced; out must not alias a or b
    void mul(const mpz_class* a, const mpz_class* b, mpz_class* out) const;
    // out += a*b without the final reduction (out has 2e-1 slots of scratch semantics handled internally)
    void addmul_unreduced(const mpz_class* a, const mpz_class* b, mpz_class* acc) const;
    // fold an accumulator of length 2e-1 into e reduced coordinates
    void fold(mpz_class* acc, mpz_class* out) const;
    // inverse of a unit, reduced
    void inv_unit(const mpz_class* a, mpz_class* out) const;
    // x * pi^k, reduced
    void mul_pi(mpz_class* x, long k) const;
    // x / pi^k for x divisible by pi^k (integral coordinates, any size); result reduced mod pi^R
    void div_pi(mpz_class* x, long k) const;
    // the unit factor used by div_pi for k; empty when it is 1 (plain Q_p)
    std::vector<mpz_class> div_factor(long k) const;
    void div_pi_with(mpz_class* x, long k, const std::vector<mpz_class>& factor) const;
};

// p-adic valuation of a nonzero integer, fast path for small valuations
long pval(const mpz_class& x, long p);

}  // namespace detail

// An element of K known modulo pi^prec. Stored as pi^shift * unit; an indistinguishable zero has shift == prec.
class FieldElement {
public:
    FieldElement() = default;

    static FieldElement zero(const Field& f, long prec);
    static FieldElement from_integer(const Field& f, const mpz_class& n, long prec);
    static FieldElement from_rational(const Field& f, const mpz_class& num, const mpz_class& den, long prec);
    // pi^pi_exp * sum coords[i] pi^i, known modulo pi^prec
    static FieldElement from_coords(const Field& f, const std::vector<mpz_class>& coords, long prec, long pi_exp = 0);
    static FieldElement uniformizer(const Field& f, long prec);

    const Field& field() const { return f_; }
    long precision() const { return prec_; }
    bool is_zero() const { return shift_ >= prec_; }
    // pi-adic valuation, or precision when indistinguishable from zero
    long pi_valuation() const { return shift_; }
    Valuation valuation() const;
    // unit part coordinates modulo pi^(prec - shift); empty for zero
    const std::vector<mpz_class>& unit() const { return unit_; }
    // coordinates of pi^-base * x reduced modulo pi^R (requires pi_valuation >= base unless zero)
    std::vector<mpz_class> coords_scaled(long base, long R) const;

    FieldElement operator-() const;
    friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b);
    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
    FieldElement inv() const;
    FieldElement pow(long n) const;

    FieldElement with_precision(long prec) const;  // lowers only
    bool equals_at_precision(const FieldElement& o) const { return (*this - o).is_zero(); }
    // lowest coordinate modulo p of the unit times pi^shift, i.e. residue class mod pi (0 if val > 0)
    long residue() const;
    // exact integer representative when e == 1 or the element lies in Z_p, in [0, p^ceil(prec/e))
    bool as_integer(mpz_class& out) const;

    std::string str() const;

private:
    static FieldElement normalize(const Field& f, std::vector<mpz_class> y, long shift, long prec);

    Field f_;
    long shift_ = 0;
    long prec_ = 0;
    std::vector<mpz_class> unit_;
};

// polynomial over O_K, coefficients least significant first
using Polynomial = std::vector<FieldElement>;

FieldElement evaluate(const Polynomial& f, const FieldElement& x);
Polynomial derivative(const Polynomial& f);

// Newton iteration from x0; requires val f(x0) > 2 val f'(x0).
FieldElement hensel_root(const Polynomial& f, const FieldElement& x0);

long p_valuation(const mpz_class& n, long p);  // n != 0
mpz_class ipow(const mpz_class& b, long n);
bool is_prime(long p);
long ceil_div(long a, long b);
long floor_div(long a, long b);

}  // namespace robba
