#include "robba/field.hpp"

#include <algorithm>
#include <sstream>

namespace robba {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::NotPrime: return "NotPrime";
        case ErrorKind::NotEisenstein: return "NotEisenstein";
        case ErrorKind::FieldMismatch: return "FieldMismatch";
        case ErrorKind::DivisionByIndistinguishableZero: return "DivisionByIndistinguishableZero";
        case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorKind::HenselCriterionFails: return "HenselCriterionFails";
        case ErrorKind::EmptyWindow: return "EmptyWindow";
        case ErrorKind::OutsideWindow: return "OutsideWindow";
        case ErrorKind::NonConvergentComposition: return "NonConvergentComposition";
        case ErrorKind::AllCoefficientsIndistinguishable: return "AllCoefficientsIndistinguishable";
        case ErrorKind::WidegUndetermined: return "WidegUndetermined";
        case ErrorKind::NotIntegral: return "NotIntegral";
        case ErrorKind::ConstantTermNotZero: return "ConstantTermNotZero";
        case ErrorKind::HeightOne: return "HeightOne";
        case ErrorKind::ModulusExhausted: return "ModulusExhausted";
        case ErrorKind::LiftStalled: return "LiftStalled";
        case ErrorKind::NoStabilization: return "NoStabilization";
        case ErrorKind::SPrimeZeroIndistinguishable: return "SPrimeZeroIndistinguishable";
        case ErrorKind::DiscriminantIndistinguishableFromZero: return "DiscriminantIndistinguishableFromZero";
        case ErrorKind::TailNotCertified: return "TailNotCertified";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Error";
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }
long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long p_valuation(const mpz_class& n, long p) {
    if (n == 0) raise(ErrorKind::InvalidArgument, "valuation of 0");
    mpz_class t, pz = p;
    return static_cast<long>(mpz_remove(t.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
}

mpz_class ipow(const mpz_class& b, long n) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

// ---------------------------------------------------------------- Field

Field Field::make(long p, const std::vector<mpz_class>& eis) {
    if (!is_prime(p)) raise(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
    auto d = std::make_shared<detail::FieldData>();
    d->p = p;
    d->pz = p;
    if (eis.empty()) {
        d->e = 1;
        d->c = {mpz_class(-p)};
        d->winv = {mpz_class(1)};
        d->explicit_poly = false;
    } else {
        if (eis.size() < 2 || eis.back() != 1)
            raise(ErrorKind::InvalidArgument, "Eisenstein polynomial must be monic of degree >= 1");
        d->e = static_cast<int>(eis.size()) - 1;
        d->c.assign(eis.begin(), eis.end() - 1);
        if (d->c[0] == 0 || p_valuation(d->c[0], p) != 1)
            raise(ErrorKind::NotEisenstein, "constant term must have p-valuation exactly 1");
        for (int i = 1; i < d->e; ++i)
            if (d->c[i] % p != 0) raise(ErrorKind::NotEisenstein, "middle coefficient is a p-unit");
        d->winv.resize(d->e);
        for (int i = 0; i < d->e; ++i) d->winv[i] = -d->c[i] / p;
        d->explicit_poly = true;
    }
    Field f;
    f.d_ = std::move(d);
    return f;
}

long Field::p() const { return d_->p; }
int Field::e() const { return d_->e; }
bool Field::has_explicit_polynomial() const { return d_->explicit_poly; }

std::vector<mpz_class> Field::eisenstein() const {
    auto v = d_->c;
    v.push_back(1);
    return v;
}

std::string Field::describe() const {
    std::ostringstream os;
    os << "field p=" << p() << " e=" << e();
    if (has_explicit_polynomial()) {
        os << " eisenstein=[";
        auto v = eisenstein();
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].get_str();
        os << "]";
    }
    return os.str();
}

bool operator==(const Field& a, const Field& b) {
    if (a.d_ == b.d_) return true;
    if (!a.d_ || !b.d_) return false;
    return a.d_->p == b.d_->p && a.d_->c == b.d_->c;
}

void require_same(const Field& a, const Field& b) {
    if (a != b) raise(ErrorKind::FieldMismatch, "operands live in different fields");
}

std::string Valuation::str() const { return (exact ? "Exact(" : "AtLeast(") + q.str() + ")"; }

// ---------------------------------------------------------------- Arith

namespace detail {

Arith::Arith(const FieldData& fd, long R_) : f(fd), e(fd.e), R(R_), cmod(fd.e) {
    for (int i = 0; i < e; ++i) {
        long k = std::max(0L, ceil_div(R - i, e));
        mpz_ui_pow_ui(cmod[i].get_mpz_t(), static_cast<unsigned long>(f.p), static_cast<unsigned long>(k));
    }
    top = cmod[0];
}

void Arith::reduce(mpz_class* x) const {
    for (int i = 0; i < e; ++i) mpz_fdiv_r(x[i].get_mpz_t(), x[i].get_mpz_t(), cmod[i].get_mpz_t());
}

bool Arith::is_zero(const mpz_class* x) const {
    for (int i = 0; i < e; ++i)
        if (x[i] != 0) return false;
    return true;
}

long pval(const mpz_class& x, long p) {
    if (!mpz_divisible_ui_p(x.get_mpz_t(), static_cast<unsigned long>(p))) return 0;
    return p_valuation(x, p);
}

long Arith::val(const mpz_class* x) const {
    long best = R;
    for (int i = 0; i < e; ++i) {
        if (x[i] == 0) continue;
        long v = e * pval(x[i], f.p) + i;
        best = std::min(best, v);
    }
    return best;
}

void Arith::addmul_unreduced(const mpz_class* a, const mpz_class* b, mpz_class* acc) const {
    for (int i = 0; i < e; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < e; ++j) mpz_addmul(acc[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
}

void Arith::fold(mpz_class* acc, mpz_class* out) const {
    for (int k = 2 * e - 2; k >= e; --k) {
        if (acc[k] == 0) continue;
        for (int i = 0; i < e; ++i) mpz_submul(acc[k - e + i].get_mpz_t(), f.c[i].get_mpz_t(), acc[k].get_mpz_t());
        acc[k] = 0;
    }
    for (int i = 0; i < e; ++i) {
        mpz_fdiv_r(out[i].get_mpz_t(), acc[i].get_mpz_t(), cmod[i].get_mpz_t());
        acc[i] = 0;
    }
}

void Arith::mul(const mpz_class* a, const mpz_class* b, mpz_class* out) const {
    if (e == 1) {
        mpz_mul(out[0].get_mpz_t(), a[0].get_mpz_t(), b[0].get_mpz_t());
        mpz_fdiv_r(out[0].get_mpz_t(), out[0].get_mpz_t(), cmod[0].get_mpz_t());
        return;
    }
    std::vector<mpz_class> acc(2 * e - 1);
    addmul_unreduced(a, b, acc.data());
    fold(acc.data(), out);
}

void Arith::inv_unit(const mpz_class* a, mpz_class* out) const {
    if (R <= 0) {
        for (int i = 0; i < e; ++i) out[i] = 0;
        return;
    }
    mpz_class a0 = a[0];
    mpz_fdiv_r(a0.get_mpz_t(), a0.get_mpz_t(), f.pz.get_mpz_t());
    if (a0 == 0) raise(ErrorKind::DivisionByIndistinguishableZero, "inverse of a non-unit");
    if (e == 1) {
        if (!mpz_invert(out[0].get_mpz_t(), a[0].get_mpz_t(), cmod[0].get_mpz_t()))
            raise(ErrorKind::DivisionByIndistinguishableZero, "inverse of a non-unit");
        return;
    }
    std::vector<mpz_class> z(e), t(e), u(e);
    mpz_invert(z[0].get_mpz_t(), a0.get_mpz_t(), f.pz.get_mpz_t());
    // Newton: z <- z (2 - a z); the pi-adic error squares each round
    for (long prec = 1; prec < R; prec *= 2) {
        mul(a, z.data(), t.data());
        for (int i = 0; i < e; ++i) t[i] = -t[i];
        t[0] += 2;
        reduce(t.data());
        mul(z.data(), t.data(), u.data());
        z.swap(u);
    }
    for (int i = 0; i < e; ++i) out[i] = z[i];
}

void Arith::mul_pi(mpz_class* x, long k) const {
    if (e == 1) {
        mpz_class m = ipow(mpz_class(-f.c[0]), k);
        x[0] *= m;
    } else {
        for (long s = 0; s < k; ++s) {
            mpz_class hi = x[e - 1];
            for (int i = e - 1; i > 0; --i) x[i] = x[i - 1];
            x[0] = 0;
            if (hi != 0)
                for (int i = 0; i < e; ++i) mpz_submul(x[i].get_mpz_t(), f.c[i].get_mpz_t(), hi.get_mpz_t());
        }
    }
    reduce(x);
}

std::vector<mpz_class> Arith::div_factor(long k) const {
    long a = k / e + (k % e ? 1 : 0);
    bool trivial = f.winv[0] == 1;
    for (int i = 1; i < e && trivial; ++i) trivial = f.winv[i] == 0;
    if (trivial || a == 0) return {};
    // (p / pi^e)^a = winv^-a
    std::vector<mpz_class> w(e), wa(e), t(e);
    inv_unit(f.winv.data(), w.data());
    wa[0] = 1;
    for (long s = 0; s < a; ++s) {
        mul(wa.data(), w.data(), t.data());
        wa.swap(t);
    }
    return wa;
}

void Arith::div_pi(mpz_class* x, long k) const { div_pi_with(x, k, div_factor(k)); }

void Arith::div_pi_with(mpz_class* x, long k, const std::vector<mpz_class>& factor) const {
    if (k < 0) raise(ErrorKind::InvalidArgument, "negative pi division");
    long a = k / e, b = k % e;
    if (b > 0) {
        // x / pi^b = (x pi^(e-b) / p) * (p / pi^e)
        for (long s = 0; s < e - b; ++s) {
            mpz_class hi = x[e - 1];
            for (int i = e - 1; i > 0; --i) x[i] = x[i - 1];
            x[0] = 0;
            if (hi != 0)
                for (int i = 0; i < e; ++i) mpz_submul(x[i].get_mpz_t(), f.c[i].get_mpz_t(), hi.get_mpz_t());
        }
        ++a;
    }
    if (a > 0) {
        mpz_class pa = ipow(f.pz, a);
        for (int i = 0; i < e; ++i) {
            if (!mpz_divisible_p(x[i].get_mpz_t(), pa.get_mpz_t()))
                raise(ErrorKind::InvalidArgument, "pi division of a non-multiple");
            mpz_divexact(x[i].get_mpz_t(), x[i].get_mpz_t(), pa.get_mpz_t());
        }
        reduce(x);
        if (!factor.empty()) {
            std::vector<mpz_class> t(e);
            mul(x, factor.data(), t.data());
            for (int i = 0; i < e; ++i) x[i] = t[i];
        }
    } else {
        reduce(x);
    }
}

}  // namespace detail

// ---------------------------------------------------------------- FieldElement

FieldElement FieldElement::normalize(const Field& f, std::vector<mpz_class> y, long shift, long prec) {
    if (prec <= 0) raise(ErrorKind::PrecisionExhausted, "result precision <= 0");
    long R = prec - shift;
    if (R <= 0) return zero(f, prec);
    detail::Arith A(f.data(), R);
    A.reduce(y.data());
    long v = A.val(y.data());
    if (v >= R) return zero(f, prec);
    if (v > 0) {
        detail::Arith B(f.data(), R - v);
        B.div_pi(y.data(), v);
    }
    FieldElement r;
    r.f_ = f;
    r.shift_ = shift + v;
    r.prec_ = prec;
    r.unit_ = std::move(y);
    return r;
}

FieldElement FieldElement::zero(const Field& f, long prec) {
    if (prec <= 0) raise(ErrorKind::PrecisionExhausted, "zero at precision <= 0");
    FieldElement r;
    r.f_ = f;
    r.shift_ = prec;
    r.prec_ = prec;
    return r;
}

FieldElement FieldElement::from_integer(const Field& f, const mpz_class& n, long prec) {
    std::vector<mpz_class> y(f.e());
    y[0] = n;
    return normalize(f, std::move(y), 0, prec);
}

FieldElement FieldElement::from_rational(const Field& f, const mpz_class& num, const mpz_class& den, long prec) {
    if (den == 0) raise(ErrorKind::InvalidArgument, "zero denominator");
    if (num == 0) return zero(f, prec);
    long p = f.p();
    int e = f.e();
    long b = p_valuation(den, p);
    mpz_class d1 = den / ipow(mpz_class(p), b);
    long R = prec + e * b;
    if (R <= 0) raise(ErrorKind::PrecisionExhausted, "rational at precision <= 0");
    detail::Arith A(f.data(), R);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), d1.get_mpz_t(), A.top.get_mpz_t());
    std::vector<mpz_class> y(e), t(e);
    y[0] = num * inv;
    A.reduce(y.data());
    // num/den = pi^(-eb) * N * (pi^e/p)^b
    for (long s = 0; s < b; ++s) {
        A.mul(y.data(), f.data().winv.data(), t.data());
        y.swap(t);
    }
    return normalize(f, std::move(y), -e * b, prec);
}

FieldElement FieldElement::from_coords(const Field& f, const std::vector<mpz_class>& coords, long prec, long pi_exp) {
    std::vector<mpz_class> y(f.e());
    if (coords.size() > y.size()) raise(ErrorKind::InvalidArgument, "too many pi-basis coordinates");
    for (size_t i = 0; i < coords.size(); ++i) y[i] = coords[i];
    return normalize(f, std::move(y), pi_exp, prec);
}

FieldElement FieldElement::uniformizer(const Field& f, long prec) {
    if (f.e() == 1) return from_integer(f, -f.data().c[0], prec);
    return from_coords(f, {0, 1}, prec);
}

Valuation FieldElement::valuation() const {
    if (is_zero()) return Valuation::AtLeast(Rational(prec_, f_.e()));
    return Valuation::Exact(Rational(shift_, f_.e()));
}

std::vector<mpz_class> FieldElement::coords_scaled(long base, long R) const {
    std::vector<mpz_class> y(f_.e());
    if (is_zero() || R <= 0) return y;
    if (shift_ < base) raise(ErrorKind::NotIntegral, "element below the requested scale");
    y = unit_;
    detail::Arith A(f_.data(), R);
    A.mul_pi(y.data(), shift_ - base);
    return y;
}

FieldElement FieldElement::operator-() const {
    if (is_zero()) return *this;
    std::vector<mpz_class> y = unit_;
    for (auto& c : y) c = -c;
    return normalize(f_, std::move(y), shift_, prec_);
}

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    require_same(a.f_, b.f_);
    long prec = std::min(a.prec_, b.prec_);
    if (prec <= 0) raise(ErrorKind::PrecisionExhausted, "sum precision <= 0");
    bool ua = !a.is_zero() && a.shift_ < prec, ub = !b.is_zero() && b.shift_ < prec;
    if (!ua && !ub) return FieldElement::zero(a.f_, prec);
    long s = std::min(ua ? a.shift_ : prec, ub ? b.shift_ : prec);
    detail::Arith A(a.f_.data(), prec - s);
    int e = a.f_.e();
    std::vector<mpz_class> z(e);
    if (ua) {
        std::vector<mpz_class> t = a.unit_;
        A.mul_pi(t.data(), a.shift_ - s);
        for (int i = 0; i < e; ++i) z[i] += t[i];
    }
    if (ub) {
        std::vector<mpz_class> t = b.unit_;
        A.mul_pi(t.data(), b.shift_ - s);
        for (int i = 0; i < e; ++i) z[i] += t[i];
    }
    return FieldElement::normalize(a.f_, std::move(z), s, prec);
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) { return a + (-b); }

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    require_same(a.f_, b.f_);
    long prec = std::min(a.prec_ + b.shift_, b.prec_ + a.shift_);
    if (prec <= 0) raise(ErrorKind::PrecisionExhausted, "product precision <= 0");
    if (a.is_zero() || b.is_zero()) return FieldElement::zero(a.f_, prec);
    long shift = a.shift_ + b.shift_;
    if (shift >= prec) return FieldElement::zero(a.f_, prec);
    detail::Arith A(a.f_.data(), prec - shift);
    std::vector<mpz_class> z(a.f_.e());
    A.mul(a.unit_.data(), b.unit_.data(), z.data());
    FieldElement r;
    r.f_ = a.f_;
    r.shift_ = shift;
    r.prec_ = prec;
    r.unit_ = std::move(z);
    return r;
}

FieldElement FieldElement::inv() const {
    if (is_zero()) raise(ErrorKind::DivisionByIndistinguishableZero, "inverse of " + str());
    long prec = prec_ - 2 * shift_;
    if (prec <= 0) raise(ErrorKind::PrecisionExhausted, "inverse precision <= 0");
    detail::Arith A(f_.data(), prec_ - shift_);
    std::vector<mpz_class> z(f_.e());
    A.inv_unit(unit_.data(), z.data());
    FieldElement r;
    r.f_ = f_;
    r.shift_ = -shift_;
    r.prec_ = prec;
    r.unit_ = std::move(z);
    return r;
}

FieldElement operator/(const FieldElement& a, const FieldElement& b) { return a * b.inv(); }

FieldElement FieldElement::pow(long n) const {
    if (n < 0) return inv().pow(-n);
    FieldElement r = from_integer(f_, 1, std::max(1L, prec_ - std::min(shift_, 0L)));
    FieldElement b = *this;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            r = first ? b : r * b;
            first = false;
        }
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

FieldElement FieldElement::with_precision(long prec) const {
    if (prec >= prec_) return *this;
    if (prec <= 0) raise(ErrorKind::PrecisionExhausted, "precision <= 0");
    if (is_zero() || shift_ >= prec) return zero(f_, prec);
    return normalize(f_, unit_, shift_, prec);
}

long FieldElement::residue() const {
    if (is_zero() || shift_ > 0) return 0;
    if (shift_ < 0) raise(ErrorKind::NotIntegral, "residue of a non-integral element");
    mpz_class r = unit_[0] % f_.p();
    if (r < 0) r += f_.p();
    return r.get_si();
}

bool FieldElement::as_integer(mpz_class& out) const {
    if (!is_zero() && shift_ < 0) return false;
    auto y = coords_scaled(0, prec_);
    for (int i = 1; i < f_.e(); ++i)
        if (y[i] != 0) return false;
    out = y[0];
    return true;
}

std::string FieldElement::str() const {
    std::ostringstream os;
    if (is_zero()) {
        os << "O(pi^" << prec_ << ")";
        return os.str();
    }
    long base = std::min(shift_, 0L);
    auto y = coords_scaled(base, prec_ - base);
    if (f_.e() == 1) {
        os << y[0].get_str();
    } else {
        os << "[";
        for (size_t i = 0; i < y.size(); ++i) os << (i ? "," : "") << y[i].get_str();
        os << "]";
    }
    if (base < 0) os << "*pi^" << base;
    os << " + O(pi^" << prec_ << ")";
    return os.str();
}

// ---------------------------------------------------------------- polynomials, Hensel

FieldElement evaluate(const Polynomial& f, const FieldElement& x) {
    if (f.empty()) return FieldElement::zero(x.field(), x.precision());
    FieldElement r = f.back();
    for (size_t i = f.size() - 1; i-- > 0;) r = r * x + f[i];
    return r;
}

Polynomial derivative(const Polynomial& f) {
    Polynomial d;
    for (size_t i = 1; i < f.size(); ++i)
        d.push_back(f[i] * FieldElement::from_integer(f[i].field(), static_cast<long>(i), f[i].precision() + 64));
    return d;
}

FieldElement hensel_root(const Polynomial& f, const FieldElement& x0) {
    if (f.empty()) raise(ErrorKind::InvalidArgument, "empty polynomial");
    const Field& K = x0.field();
    long target = f[0].precision();
    for (auto& c : f) target = std::min(target, c.precision());
    Polynomial df = derivative(f);
    FieldElement fx = evaluate(f, x0), dfx = evaluate(df, x0);
    if (dfx.is_zero() || fx.pi_valuation() <= 2 * dfx.pi_valuation())
        raise(ErrorKind::HenselCriterionFails, "val f(x0) must exceed 2 val f'(x0)");
    long vd = dfx.pi_valuation();
    if (target - vd <= 0) raise(ErrorKind::PrecisionExhausted, "coefficients too coarse for a certified root");
    long base = std::min(0L, x0.pi_valuation());
    FieldElement x = FieldElement::from_coords(K, x0.coords_scaled(base, x0.precision() - base), target, base);
    for (int it = 0; it < 256; ++it) {
        fx = evaluate(f, x);
        if (fx.is_zero()) return x.with_precision(target - vd);
        FieldElement step = fx / evaluate(df, x);
        if (step.is_zero()) return x.with_precision(target - vd);
        x = x - step;
    }
    raise(ErrorKind::PrecisionExhausted, "Newton iteration did not settle");
}

}  // namespace robba
