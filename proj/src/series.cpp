#include "robba/series.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace robba {

using detail::Arith;

namespace {

// coordinates of pi^k modulo pi^R
std::vector<mpz_class> pi_power(const Arith& A, long k) {
    std::vector<mpz_class> y(A.e);
    y[0] = 1;
    A.mul_pi(y.data(), k);
    return y;
}

std::vector<size_t> nonzero_slots(const Series& s) {
    std::vector<size_t> idx;
    int e = s.field().e();
    const auto& d = s.raw_data();
    for (size_t i = 0; i < static_cast<size_t>(s.width()); ++i) {
        for (int j = 0; j < e; ++j)
            if (d[i * e + j] != 0) {
                idx.push_back(i);
                break;
            }
    }
    return idx;
}

}  // namespace

// ---------------------------------------------------------------- construction

Series Series::from_raw(const Field& f, long lo, long hi, long modulus, long shift, std::vector<mpz_class> data) {
    if (hi < lo) raise(ErrorKind::EmptyWindow, "window [" + std::to_string(lo) + "," + std::to_string(hi) + ")");
    Series s;
    s.f_ = f;
    s.lo_ = lo;
    s.hi_ = hi;
    s.modulus_ = modulus;
    s.shift_ = std::max(0L, shift);
    s.data_ = std::move(data);
    s.data_.resize(static_cast<size_t>((hi - lo) * f.e()));
    if (shift < 0) {
        Arith A(f.data(), modulus);
        for (long n = lo; n < hi; ++n) A.mul_pi(&s.data_[(n - lo) * f.e()], -shift);
    }
    s.normalize();
    return s;
}

void Series::normalize() {
    int e = f_.e();
    long R = modulus_ + shift_;
    if (R <= 0) {
        for (auto& c : data_) c = 0;
        shift_ = 0;
        return;
    }
    Arith A(f_.data(), R);
    long v = R;
    for (long n = lo_; n < hi_; ++n) {
        mpz_class* x = &data_[(n - lo_) * e];
        A.reduce(x);
        if (shift_ > 0 && v > 0) v = std::min(v, A.val(x));
    }
    if (shift_ > 0 && v > 0) {
        long k = std::min(shift_, v);
        Arith B(f_.data(), R - k);
        auto fac = B.div_factor(k);
        for (long n = lo_; n < hi_; ++n) {
            mpz_class* x = &data_[(n - lo_) * e];
            if (!A.is_zero(x)) B.div_pi_with(x, k, fac);
        }
        shift_ -= k;
    }
}

Series Series::zero(const Field& f, long lo, long hi, long modulus) { return from_raw(f, lo, hi, modulus, 0, {}); }

Series Series::from_coefficients(const Field& f, long lo, long hi, long modulus,
                                 const std::map<long, FieldElement>& coeffs) {
    long M = modulus, shift = 0;
    for (auto& [n, c] : coeffs) {
        require_same(f, c.field());
        if (n < lo || n >= hi) raise(ErrorKind::OutsideWindow, "coefficient index " + std::to_string(n));
        M = std::min(M, c.precision());
        if (!c.is_zero()) shift = std::max(shift, -c.pi_valuation());
    }
    int e = f.e();
    std::vector<mpz_class> data(static_cast<size_t>((hi - lo) * e));
    for (auto& [n, c] : coeffs) {
        if (c.is_zero() || c.pi_valuation() >= M) continue;
        auto y = c.coords_scaled(-shift, M + shift);
        for (int i = 0; i < e; ++i) data[(n - lo) * e + i] = y[i];
    }
    return from_raw(f, lo, hi, M, shift, std::move(data));
}

Series Series::from_integers(const Field& f, long lo, long hi, long modulus, const std::vector<mpz_class>& values) {
    int e = f.e();
    std::vector<mpz_class> data(static_cast<size_t>((hi - lo) * e));
    for (size_t i = 0; i < values.size() && static_cast<long>(i) < hi - lo; ++i) data[i * e] = values[i];
    return from_raw(f, lo, hi, modulus, 0, std::move(data));
}

Series Series::monomial(const Field& f, long n, const FieldElement& c, long hi, long modulus) {
    long lo = std::min(n, hi);
    return from_coefficients(f, lo, std::max(hi, lo), modulus, n < hi ? std::map<long, FieldElement>{{n, c}}
                                                                      : std::map<long, FieldElement>{});
}

Series Series::constant(const Field& f, const FieldElement& c, long hi, long modulus) {
    return monomial(f, 0, c, hi, modulus);
}

// ---------------------------------------------------------------- access

FieldElement Series::coeff(long n) const {
    if (n >= hi_) raise(ErrorKind::OutsideWindow, "coefficient " + std::to_string(n) + " beyond window end " +
                                                      std::to_string(hi_));
    if (n < lo_ || coeff_is_zero(n)) return FieldElement::zero(f_, modulus_);
    std::vector<mpz_class> y(raw(n), raw(n) + f_.e());
    return FieldElement::from_coords(f_, y, modulus_, -shift_);
}

bool Series::coeff_is_zero(long n) const {
    if (n < lo_) return true;
    if (n >= hi_) raise(ErrorKind::OutsideWindow, "coefficient " + std::to_string(n));
    const mpz_class* x = raw(n);
    for (int i = 0; i < f_.e(); ++i)
        if (x[i] != 0) return false;
    return true;
}

long Series::coeff_pi_valuation(long n) const {
    if (coeff_is_zero(n)) return modulus_;
    Arith A(f_.data(), modulus_ + shift_);
    return A.val(raw(n)) - shift_;
}

long Series::min_pi_valuation() const {
    long best = modulus_;
    if (modulus_ + shift_ <= 0) return best;
    Arith A(f_.data(), modulus_ + shift_);
    for (long n = lo_; n < hi_; ++n) {
        if (coeff_is_zero(n)) continue;
        best = std::min(best, A.val(raw(n)) - shift_);
    }
    return best;
}

bool Series::is_zero() const {
    for (auto& c : data_)
        if (c != 0) return false;
    return true;
}

long Series::order() const {
    for (long n = lo_; n < hi_; ++n)
        if (!coeff_is_zero(n)) return n;
    return hi_;
}

long Series::degree() const {
    for (long n = hi_ - 1; n >= lo_; --n)
        if (!coeff_is_zero(n)) return n;
    return lo_ - 1;
}

bool operator==(const Series& a, const Series& b) {
    return a.f_ == b.f_ && a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.modulus_ == b.modulus_ && a.shift_ == b.shift_ &&
           a.data_ == b.data_;
}

// ---------------------------------------------------------------- arithmetic

Series Series::operator-() const {
    Series r = *this;
    for (auto& c : r.data_) c = -c;
    r.normalize();
    return r;
}

Series operator+(const Series& a, const Series& b) {
    require_same(a.f_, b.f_);
    long lo = std::min(a.lo_, b.lo_), hi = std::min(a.hi_, b.hi_);
    long M = std::min(a.modulus_, b.modulus_);
    long shift = std::max(a.shift_, b.shift_);
    int e = a.f_.e();
    std::vector<mpz_class> out(static_cast<size_t>((hi - lo) * e));
    long R = M + shift;
    if (R > 0) {
        Arith A(a.f_.data(), R);
        for (const Series* s : {&a, &b}) {
            auto mult = pi_power(A, shift - s->shift_);
            bool unit = shift == s->shift_;
            std::vector<mpz_class> t(e);
            for (long n = std::max(lo, s->lo_); n < hi; ++n) {
                if (s->coeff_is_zero(n)) continue;
                mpz_class* o = &out[(n - lo) * e];
                if (unit) {
                    for (int i = 0; i < e; ++i) o[i] += s->raw(n)[i];
                } else {
                    A.mul(s->raw(n), mult.data(), t.data());
                    for (int i = 0; i < e; ++i) o[i] += t[i];
                }
            }
        }
    }
    return Series::from_raw(a.f_, lo, hi, M, shift, std::move(out));
}

Series operator-(const Series& a, const Series& b) { return a + (-b); }

Series operator*(const Series& a, const Series& b) {
    require_same(a.f_, b.f_);
    long lo = a.lo_ + b.lo_, hi = std::min(a.lo_ + b.hi_, b.lo_ + a.hi_);
    if (hi <= lo) raise(ErrorKind::EmptyWindow, "product window is empty");
    long M = std::min(a.modulus_ + b.min_pi_valuation(), b.modulus_ + a.min_pi_valuation());
    long shift = a.shift_ + b.shift_;
    long R = M + shift;
    int e = a.f_.e();
    size_t W = static_cast<size_t>(hi - lo);
    std::vector<mpz_class> out(W * e);
    if (R > 0) {
        Arith A(a.f_.data(), R);
        auto ia = nonzero_slots(a), ib = nonzero_slots(b);
        const Series* x = &a;
        const Series* y = &b;
        if (ia.size() > ib.size()) {
            std::swap(ia, ib);
            std::swap(x, y);
        }
        const auto& dx = x->data_;
        const auto& dy = y->data_;
        if (e == 1) {
            for (size_t i : ia)
                for (size_t j : ib) {
                    if (i + j >= W) break;
                    mpz_addmul(out[i + j].get_mpz_t(), dx[i].get_mpz_t(), dy[j].get_mpz_t());
                }
            for (auto& c : out) mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), A.top.get_mpz_t());
        } else {
            size_t stride = 2 * e - 1;
            std::vector<mpz_class> acc(W * stride);
            for (size_t i : ia)
                for (size_t j : ib) {
                    if (i + j >= W) break;
                    A.addmul_unreduced(&dx[i * e], &dy[j * e], &acc[(i + j) * stride]);
                }
            for (size_t n = 0; n < W; ++n) A.fold(&acc[n * stride], &out[n * e]);
        }
    }
    return Series::from_raw(a.f_, lo, hi, M, shift, std::move(out));
}

Series Series::scaled(const FieldElement& c) const {
    require_same(f_, c.field());
    long vmin = min_pi_valuation();
    if (c.is_zero()) {
        long M = std::min(modulus_ + c.precision(), c.precision() + vmin);
        return zero(f_, lo_, hi_, M);
    }
    long cs = c.pi_valuation();
    long M = std::min(modulus_ + cs, c.precision() + vmin);
    long shift = shift_ - cs;
    std::vector<mpz_class> unit = c.unit();
    long R = M + std::max(0L, shift);
    int e = f_.e();
    std::vector<mpz_class> out(data_.size());
    if (R > 0) {
        Arith A(f_.data(), R);
        if (shift < 0) A.mul_pi(unit.data(), -shift);
        for (long n = lo_; n < hi_; ++n) {
            if (coeff_is_zero(n)) continue;
            A.mul(raw(n), unit.data(), &out[(n - lo_) * e]);
        }
    }
    return from_raw(f_, lo_, hi_, M, std::max(0L, shift), std::move(out));
}

Series Series::shifted(long k) const {
    Series r = *this;
    r.lo_ += k;
    r.hi_ += k;
    return r;
}

Series Series::derivative() const {
    int e = f_.e();
    std::vector<mpz_class> out(data_.size());
    for (long n = lo_; n < hi_; ++n)
        for (int i = 0; i < e; ++i) out[(n - lo_) * e + i] = data_[(n - lo_) * e + i] * n;
    return from_raw(f_, lo_ - 1, hi_ - 1, modulus_, shift_, std::move(out));
}

Series Series::restricted(long lo, long hi) const {
    if (hi > hi_) raise(ErrorKind::OutsideWindow, "restriction beyond the known window");
    if (hi < lo) hi = lo;
    int e = f_.e();
    std::vector<mpz_class> out(static_cast<size_t>((hi - lo) * e));
    for (long n = std::max(lo, lo_); n < hi; ++n)
        for (int i = 0; i < e; ++i) out[(n - lo) * e + i] = data_[(n - lo_) * e + i];
    return from_raw(f_, lo, hi, modulus_, shift_, std::move(out));
}

Series Series::padded(long hi) const {
    if (hi <= hi_) return *this;
    Series r = *this;
    r.hi_ = hi;
    r.data_.resize(static_cast<size_t>((hi - lo_) * f_.e()));
    return r;
}

Series Series::with_modulus(long m) const {
    if (m >= modulus_) return *this;
    Series r = *this;
    r.modulus_ = m;
    r.normalize();
    return r;
}

Series Series::trimmed_low() const {
    long n = order();
    if (n == lo_ || n >= hi_) return *this;
    return restricted(n, hi_);
}

std::string Series::str(long max_terms) const {
    std::ostringstream os;
    long shown = 0;
    for (long n = lo_; n < hi_ && shown < max_terms; ++n) {
        if (coeff_is_zero(n)) continue;
        if (shown++) os << " + ";
        os << "(" << coeff(n).str() << ")*X^" << n;
    }
    if (!shown) os << "0";
    os << "  [window " << lo_ << ".." << hi_ << ", mod pi^" << modulus_ << "]";
    return os.str();
}

// ---------------------------------------------------------------- valuations

GaussValue gauss_valuation(const Series& f, const Rational& v) {
    if (v < Rational(0)) raise(ErrorKind::InvalidArgument, "negative radius valuation");
    const long e = f.field().e();
    GaussValue g;
    g.v = v;
    bool have = false;
    Rational best;
    for (long n = f.lo(); n < f.hi(); ++n) {
        if (f.coeff_is_zero(n)) continue;
        Rational val = Rational(f.coeff_pi_valuation(n), e) + Rational(n) * v;
        if (!have || val < best) best = val, have = true;
    }
    long vmin = f.min_pi_valuation();
    Rational floor_tail = Rational(std::min(0L, vmin), e);
    Rational tail = floor_tail + Rational(f.hi()) * v;
    Rational mod_bound = Rational(f.modulus(), e) + Rational(f.lo()) * v;
    Rational lb = min(tail, mod_bound);
    if (have) lb = min(lb, best);
    g.lower_bound = lb;
    if (!have) {
        g.value = lb;
        g.exact = false;
        return g;
    }
    g.value = best;
    g.exact = vmin >= 0 && tail >= best && mod_bound >= best;
    return g;
}

std::string NewtonPolygon::str() const {
    std::ostringstream os;
    os << "vertices";
    for (auto& [n, v] : vertices) os << " (" << n << "," << v.str() << ")";
    os << "; slopes";
    for (auto& [s, l] : slopes) os << " (" << s.str() << ", length " << l << ")";
    os << "; root valuation = -slope";
    if (provisional) os << "; provisional";
    return os.str();
}

NewtonPolygon newton_polygon(const Series& f) {
    const long e = f.field().e();
    std::vector<std::pair<long, Rational>> pts, loose;
    for (long n = f.lo(); n < f.hi(); ++n) {
        if (f.coeff_is_zero(n))
            loose.emplace_back(n, Rational(f.modulus(), e));
        else
            pts.emplace_back(n, Rational(f.coeff_pi_valuation(n), e));
    }
    if (pts.empty()) raise(ErrorKind::AllCoefficientsIndistinguishable, "no coefficient has an exact valuation");
    std::vector<std::pair<long, Rational>> hull;
    auto slope = [](const std::pair<long, Rational>& a, const std::pair<long, Rational>& b) {
        return (b.second - a.second) / Rational(b.first - a.first);
    };
    for (auto& pt : pts) {
        while (hull.size() >= 2 && slope(hull[hull.size() - 2], hull.back()) >= slope(hull.back(), pt)) hull.pop_back();
        hull.push_back(pt);
    }
    NewtonPolygon np;
    np.vertices = hull;
    for (size_t i = 1; i < hull.size(); ++i) np.slopes.emplace_back(slope(hull[i - 1], hull[i]), hull[i].first - hull[i - 1].first);
    for (auto& [n, q] : loose) {
        if (n < hull.front().first) {
            np.provisional = true;
        } else if (n > hull.back().first) {
            if (q < hull.back().second) np.provisional = true;
        } else {
            for (size_t i = 1; i < hull.size(); ++i) {
                if (n > hull[i].first) continue;
                Rational h = hull[i - 1].second + slope(hull[i - 1], hull[i]) * Rational(n - hull[i - 1].first);
                if (q < h) np.provisional = true;
                break;
            }
        }
    }
    return np;
}

long wideg(const Series& f) {
    if (!f.is_integral()) raise(ErrorKind::NotIntegral, "wideg needs integral coefficients");
    for (long n = f.lo(); n < f.hi(); ++n)
        if (!f.coeff_is_zero(n) && f.coeff_pi_valuation(n) == 0) return n;
    raise(ErrorKind::WidegUndetermined, "no unit coefficient in the window");
}

std::optional<Rational> rho_valuation(const Series& s) {
    Series q = s.shifted(-1);
    q = q.restricted(0, q.hi());
    NewtonPolygon np = newton_polygon(q);
    std::optional<Rational> best;
    for (auto& [sl, len] : np.slopes)
        if (sl < Rational(0)) best = -sl;
    return best;
}

// ---------------------------------------------------------------- composition

namespace {

// f o s for s with zero constant term
Series compose_zero(const Series& f, const Series& s) {
    long o = std::max(1L, s.order());
    long W = std::min(s.hi(), o * std::max(0L, f.hi()));
    if (W <= 0) raise(ErrorKind::EmptyWindow, "composition window is empty");
    const Field& K = f.field();
    long nmax = std::min(f.hi() - 1, ceil_div(W, o) - 1);
    Series sp = s.restricted(0, s.hi());
    Series r = Series::zero(K, 0, W, f.modulus());
    for (long n = nmax; n >= 0; --n) {
        if (n != nmax) r = (r * sp).restricted(0, W);
        if (n >= f.lo() && !f.coeff_is_zero(n)) r = r + Series::constant(K, f.coeff(n), W, f.modulus());
    }
    return r;
}

}  // namespace

Series compose_power(const Series& f, const Series& s) {
    require_same(f.field(), s.field());
    if (f.lo() < 0) raise(ErrorKind::InvalidArgument, "compose_power needs a power series f");
    if (s.lo() < 0) raise(ErrorKind::InvalidArgument, "compose_power needs a power series s");
    if (s.hi() <= 0) raise(ErrorKind::EmptyWindow, "s has an empty window");
    FieldElement c = s.coeff(0);
    if (!c.is_zero() && c.pi_valuation() <= 0)
        raise(ErrorKind::NonConvergentComposition, "constant term of s is not in the maximal ideal");
    if (!s.is_integral()) raise(ErrorKind::NotIntegral, "s must have integral coefficients");
    // s with its constant term removed
    std::vector<mpz_class> d = s.raw_data();
    if (s.lo() == 0)
        for (int i = 0; i < s.field().e(); ++i) d[i] = 0;
    Series sp = Series::from_raw(s.field(), s.lo(), s.hi(), s.modulus(), s.shift(), std::move(d));
    if (c.is_zero()) return compose_zero(f, sp);

    // Taylor shift at c: F_k = sum_n binom(n,k) f_n c^(n-k); the unknown tail n >= hi contributes
    // valuation >= tau + (hi - k) val(c), which fixes how many F_k are certified.
    long vc = c.pi_valuation();
    long tau = std::min(0L, f.min_pi_valuation());
    long Wc = f.hi() - ceil_div(f.modulus() - tau, vc);
    if (Wc <= 0) raise(ErrorKind::EmptyWindow, "constant term too large for the available window");
    std::vector<FieldElement> a;
    for (long n = 0; n < f.hi(); ++n) a.push_back(f.coeff(n));
    long N = f.hi();
    for (long i = 0; i < std::min(Wc, N - 1); ++i)
        for (long j = N - 2; j >= i; --j) a[j] = a[j] + c * a[j + 1];
    std::map<long, FieldElement> F;
    for (long k = 0; k < Wc; ++k) F.emplace(k, a[k].with_precision(f.modulus()));
    Series Fs = Series::from_coefficients(f.field(), 0, Wc, f.modulus(), F);
    Series r = compose_zero(Fs, sp);
    return r.with_modulus(std::min(r.modulus(), f.modulus()));
}

// ---------------------------------------------------------------- Laurent inverse

Series exact_mul(const Series& a, const Series& b, long hi) {
    Series x = a.padded(hi - b.lo()), y = b.padded(hi - a.lo());
    return (x * y).restricted(a.lo() + b.lo(), hi);
}

LaurentInversePlan plan_laurent_inverse(const Series& f, long M) {
    const Field& K = f.field();
    const long e = K.e();
    LaurentInversePlan pl;
    pl.field = K;
    pl.modulus = M;
    long best = -1;
    for (long n = f.lo(); n < f.hi(); ++n) {
        if (f.coeff_is_zero(n)) continue;
        long v = f.coeff_pi_valuation(n);
        if (best < 0 || v < f.coeff_pi_valuation(best)) best = n;
    }
    if (best < 0) raise(ErrorKind::DivisionByIndistinguishableZero, "inverse of a series indistinguishable from 0");
    pl.k = best;
    pl.c_inv = f.coeff(best).inv();
    for (long n = f.lo(); n < f.hi(); ++n) {
        if (n == best || f.coeff_is_zero(n)) continue;
        pl.g.emplace(n - best, (f.coeff(n) * pl.c_inv).with_precision(M));
        (n < best ? pl.has_neg : pl.has_pos) = true;
    }
    if (!pl.has_neg) return pl;
    std::optional<Rational> theta, gm;
    for (auto& [r, c] : pl.g) {
        if (r > 0) continue;
        Rational t = Rational(c.pi_valuation(), e) / Rational(-r);
        theta = theta ? min(*theta, t) : t;
    }
    pl.v = *theta * Rational(3, 4);
    for (auto& [r, c] : pl.g) {
        Rational t = Rational(c.pi_valuation(), e) + Rational(r) * pl.v;
        gm = gm ? min(*gm, t) : t;
    }
    pl.gamma = *gm;
    pl.low = (-(Rational(M, e) / pl.v)).floor() + 1;
    return pl;
}

namespace {

// power-series inverse of 1 + g for g with positive exponents only, on [0, hi)
Series inverse_one_plus(const Field& K, const std::map<long, FieldElement>& g, long hi, long M) {
    std::vector<FieldElement> w(static_cast<size_t>(hi), FieldElement::zero(K, M));
    w[0] = FieldElement::from_integer(K, 1, M);
    for (long n = 1; n < hi; ++n) {
        FieldElement acc = FieldElement::zero(K, M);
        for (auto& [r, c] : g) {
            if (r > n) break;
            acc = acc - c * w[n - r];
        }
        w[n] = acc;
    }
    std::map<long, FieldElement> c;
    for (long n = 0; n < hi; ++n) c.emplace(n, w[n]);
    return Series::from_coefficients(K, 0, hi, M, c);
}

}  // namespace

LaurentInverse invert_laurent(const LaurentInversePlan& pl, long hi, long cap) {
    const Field& K = pl.field;
    const long M = pl.modulus;
    Series w;
    bool exact_high = !pl.has_pos;
    long hw = hi + pl.k;  // w is needed on [.., hi + k)
    if (!pl.has_neg) {
        w = pl.has_pos ? inverse_one_plus(K, pl.g, std::max(hw, 1L), M)
                       : Series::constant(K, FieldElement::from_integer(K, 1, M), 1, M);
    } else {
        long glo = pl.g.begin()->first, ghi = pl.g.rbegin()->first + 1;
        Series g = Series::from_coefficients(K, glo, std::max(ghi, 1L), M, pl.g);
        Rational need = Rational(M, K.e());
        if (pl.has_pos) need += Rational(std::max(hw, 0L)) * pl.v;
        long steps = (need / pl.gamma).ceil();
        if (steps > cap)
            raise(ErrorKind::ModulusExhausted, "inverse expansion needs " + std::to_string(steps) + " terms");
        long top = pl.has_pos ? std::max(hw, 1L) + steps * (-glo) : 1;
        Series one = Series::constant(K, FieldElement::from_integer(K, 1, M), top, M);
        Series acc = one;
        for (long i = 1; i < steps; ++i) {
            Series prod = exact_high ? exact_mul(g, acc, 1) : g.padded(acc.hi() - pl.low + 1) * acc;
            prod = prod.restricted(std::max(pl.low, prod.lo()), prod.hi());
            acc = one - prod;
        }
        w = acc;
    }
    Series u = w.scaled(pl.c_inv).shifted(-pl.k);
    if (!exact_high) u = u.restricted(u.lo(), std::min(u.hi(), hi));
    return {u, exact_high};
}

}  // namespace robba
