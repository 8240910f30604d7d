#include "robba/trace.hpp"

#include <algorithm>

namespace robba {

namespace {

Series yzero(const Field& K, long N, long M) { return Series::zero(K, 0, N, M); }

Series yconst(const Field& K, const FieldElement& c, long N, long M) {
    return Series::constant(K, c.with_precision(std::max(1L, std::min(M, c.precision()))), N, M);
}

bool ypoly_is_zero(const YPoly& a) {
    return std::all_of(a.begin(), a.end(), [](const Series& s) { return s.is_zero(); });
}

YPoly ymul(const YPoly& a, const YPoly& b) {
    const Series& z = a[0];
    YPoly c(a.size() + b.size() - 1, Series::zero(z.field(), 0, z.hi(), z.modulus()));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j)
            if (!b[j].is_zero()) c[i + j] = c[i + j] + a[i] * b[j];
    }
    return c;
}

// F = Q P + R for monic P; R has degree < deg P
std::pair<YPoly, YPoly> ydivmod(YPoly F, const YPoly& P) {
    size_t d = P.size() - 1;
    const Series& z = F[0];
    Series zero = Series::zero(z.field(), 0, z.hi(), z.modulus());
    if (F.size() <= d) {
        F.resize(d, zero);
        return {YPoly{zero}, F};
    }
    YPoly Q(F.size() - d, zero);
    for (size_t k = F.size(); k-- > d;) {
        Series q = F[k];
        Q[k - d] = q;
        if (q.is_zero()) continue;
        for (size_t i = 0; i <= d; ++i) F[k - d + i] = F[k - d + i] - q * P[i];
    }
    F.resize(d);
    return {Q, F};
}

YPoly ymod(const YPoly& A, const YPoly& P) { return ydivmod(A, P).second; }

YPoly yadd(YPoly a, const YPoly& b) {
    if (a.size() < b.size()) a.resize(b.size(), Series::zero(b[0].field(), 0, b[0].hi(), b[0].modulus()));
    for (size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
    return a;
}

// appends p_j for j = sums.size()
void extend_power_sums(const WeierstrassData& w, std::vector<Series>& sums) {
    long d = static_cast<long>(w.P.size()) - 1;
    long j = static_cast<long>(sums.size());
    const Field& K = w.P[0].field();
    if (j == 0) {
        sums.push_back(yconst(K, FieldElement::from_integer(K, d, w.modulus), w.y_window, w.modulus));
        return;
    }
    Series acc = yzero(K, w.y_window, w.modulus);
    for (long i = 1; i <= std::min(j - 1, d); ++i) acc = acc - w.P[d - i] * sums[j - i];
    if (j <= d) acc = acc - w.P[d - j].scaled(FieldElement::from_integer(K, j, w.modulus));
    sums.push_back(acc);
}

}  // namespace

// ---------------------------------------------------------------- Weierstrass preparation

WeierstrassData weierstrass_prepare(const FiniteHeightMap& m, long M, long N, long cap) {
    const Field& K = m.field();
    const Series& s = m.s();
    const long d = m.d(), D = m.degree();
    WeierstrassData w;
    w.modulus = M;
    w.y_window = N;
    Series Y = Series::monomial(K, 1, FieldElement::from_integer(K, 1, M), N, M);
    if (D == d) {
        FieldElement inv = s.coeff(d).inv();
        for (long k = 0; k < d; ++k) w.P.push_back(yconst(K, s.coeff(k) * inv, N, M));
        w.P[0] = w.P[0] - Y.scaled(inv);
        w.P.push_back(yconst(K, FieldElement::from_integer(K, 1, M), N, M));
        w.U = {yconst(K, s.coeff(d), N, M)};
        w.polynomial_in_y = true;
        return w;
    }
    YPoly F;
    for (long k = 0; k <= D; ++k) F.push_back(yconst(K, s.coeff(k), N, M));
    F[0] = F[0] - Y;
    YPoly P(d + 1, yzero(K, N, M));
    P[d] = yconst(K, FieldElement::from_integer(K, 1, M), N, M);

    // inverse of the cofactor mod T^d at Y = 0 seeds V = Q^-1 mod P
    auto [Q, R] = ydivmod(F, P);
    std::vector<FieldElement> q0, v0;
    for (auto& c : Q) q0.push_back(c.coeff(0));
    FieldElement u0 = q0[0].inv();
    for (long n = 0; n < d; ++n) {
        FieldElement acc = n == 0 ? FieldElement::from_integer(K, 1, M) : FieldElement::zero(K, M);
        for (long i = 1; i <= n && i < static_cast<long>(q0.size()); ++i) acc = acc - q0[i] * v0[n - i];
        v0.push_back(acc * u0);
    }
    YPoly V;
    for (auto& c : v0) V.push_back(yconst(K, c, N, M));

    for (long round = 0;; ++round) {
        if (ypoly_is_zero(R)) break;
        if (round >= cap) raise(ErrorKind::LiftStalled, "Weierstrass factor did not converge");
        for (long it = 0;; ++it) {
            YPoly E = ymod(ymul(Q, V), P);
            E[0] = E[0] - yconst(K, FieldElement::from_integer(K, 1, M), N, M);
            if (ypoly_is_zero(E)) break;
            if (it >= cap) raise(ErrorKind::LiftStalled, "cofactor inverse did not converge");
            YPoly corr = ymod(ymul(V, E), P);
            for (auto& c : corr) c = -c;
            V = yadd(V, corr);
            V.resize(d, yzero(K, N, M));
        }
        YPoly delta = ymod(ymul(R, V), P);
        for (long i = 0; i < d; ++i) P[i] = P[i] + delta[i];
        std::tie(Q, R) = ydivmod(F, P);
    }
    w.P = P;
    w.U = Q;
    return w;
}

YPoly weierstrass_residual(const FiniteHeightMap& m, const WeierstrassData& w) {
    const Field& K = m.field();
    const long N = w.y_window, M = w.modulus;
    YPoly F;
    for (long k = 0; k <= m.degree(); ++k) F.push_back(yconst(K, m.s().coeff(k), N, M));
    F[0] = F[0] - Series::monomial(K, 1, FieldElement::from_integer(K, 1, M), N, M);
    YPoly PU = ymul(w.P, w.U);
    for (auto& c : PU) c = -c;
    return yadd(F, PU);
}

std::vector<Series> power_sums(const WeierstrassData& w, long J) {
    std::vector<Series> sums;
    while (static_cast<long>(sums.size()) <= J) extend_power_sums(w, sums);
    return sums;
}

// ---------------------------------------------------------------- TraceOperator

TraceOperator::TraceOperator(const FiniteHeightMap& m, long modulus, long y_window)
    : m_(m), w_(weierstrass_prepare(m, modulus, y_window)) {
    const long d = m.d();
    for (auto& [k, v] : m.lambda_vertices()) {
        if (k >= d) continue;
        Rational t = v / Rational(d - k);
        kappa_ = kappa_ ? min(*kappa_, t) : t;
    }
    neg_.emplace_back();
}

const Series& TraceOperator::power_sum(long j) const {
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<long>(sums_.size()) <= j) extend_power_sums(w_, sums_);
    return sums_[j];
}

// Number of Y-coefficients of psi(h) that the unknown tail n >= W of h cannot disturb: the Y^q
// coefficient of p_n has valuation >= kappa (n - slack - q d), and tail coefficients have valuation >= tau.
long TraceOperator::certified_window(long W, long M, long tau_pi, long slack) const {
    const long d = m_.d(), e = m_.field().e();
    long n;
    if (!kappa_) {
        n = ceil_div(W - slack, d);
    } else {
        Rational r = Rational(M - tau_pi, e) / *kappa_;
        n = ((Rational(W - slack) - r) / Rational(d)).floor() + 1;
    }
    return std::clamp(n, 0L, w_.y_window);
}

Series TraceOperator::psi_polynomial(const Series& h) const {
    const Field& K = h.field();
    require_same(K, m_.field());
    if (h.lo() < 0) raise(ErrorKind::InvalidArgument, "psi_polynomial needs a polynomial");
    Series acc = yzero(K, w_.y_window, w_.modulus + h.modulus());
    for (long n = h.lo(); n < h.hi(); ++n) {
        if (h.coeff_is_zero(n)) continue;
        acc = acc + power_sum(n).scaled(h.coeff(n));
    }
    return acc;
}

Series TraceOperator::psi_power(const Series& h) const {
    if (h.lo() < 0) raise(ErrorKind::InvalidArgument, "psi_power needs a power series");
    long tau = std::min(0L, h.min_pi_valuation());
    long N = certified_window(h.hi(), h.modulus(), tau, m_.d() - 1);
    return psi_polynomial(h).restricted(0, N);
}

const Series& TraceOperator::psi_negative_monomial(long n) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (static_cast<long>(neg_.size()) > n) return neg_[n];
    }
    const Series& s = m_.s();
    Series q = s.shifted(-1).restricted(0, s.hi() - 1);
    Series qn = Series::constant(m_.field(), FieldElement::from_integer(m_.field(), 1, s.modulus()), 1, s.modulus());
    for (long i = 0; i < n; ++i) qn = exact_mul(qn, q, qn.hi() + q.hi() - 1);
    Series r = psi_polynomial(qn).shifted(-n).trimmed_low();
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<long>(neg_.size()) <= n) neg_.emplace_back();
    neg_[n] = r;
    return neg_[n];
}

Series TraceOperator::psi_laurent(const Series& h) const {
    if (h.lo() >= 0) return psi_power(h);
    if (h.hi() < 0) raise(ErrorKind::InvalidArgument, "psi_laurent needs h known up to exponent 0");
    Series acc = h.hi() > 0 ? psi_power(h.restricted(0, h.hi())) : yzero(h.field(), 0, h.modulus());
    for (long n = 1; n <= -h.lo(); ++n) {
        if (h.coeff_is_zero(-n)) continue;
        acc = acc + psi_negative_monomial(n).scaled(h.coeff(-n));
    }
    return acc.trimmed_low();
}

std::vector<Series> TraceOperator::decompose(const Series& h_in, long cap) const {
    if (h_in.lo() < 0) raise(ErrorKind::InvalidArgument, "decompose needs a power series");
    const Field& K = m_.field();
    const long d = m_.d(), W = h_in.hi(), M = h_in.modulus();
    Series R = h_in.restricted(0, W);
    long qmax = ceil_div(W, d);
    std::vector<Series> S;
    std::vector<FieldElement> lead;
    S.push_back(Series::constant(K, FieldElement::from_integer(K, 1, m_.modulus()), std::max(W, 1L), m_.modulus()));
    for (long q = 1; q < qmax; ++q) S.push_back(exact_mul(S.back(), m_.s(), W));
    for (long q = 0; q < qmax; ++q) lead.push_back(S[q].coeff(q * d));
    std::vector<std::vector<FieldElement>> C(d, std::vector<FieldElement>(qmax, FieldElement::zero(K, M)));

    // mod pi the extraction is triangular (s = unit X^d mod pi); each sweep pushes the residual deeper
    long round = 0;
    for (; !R.is_zero(); ++round) {
        if (round >= cap) raise(ErrorKind::ModulusExhausted, "decomposition residual did not vanish");
        for (long n = 0; n < W; ++n) {
            if (R.coeff_is_zero(n)) continue;
            long q = n / d, j = n % d;
            FieldElement c = R.coeff(n) / lead[q];
            C[j][q] += c;
            R = R - S[q].shifted(j).restricted(0, W).scaled(c);
        }
    }
    long tau = std::min(0L, h_in.min_pi_valuation());
    std::vector<Series> H;
    for (long j = 0; j < d; ++j) {
        long Nj = std::min(certified_window(W, M, tau, j), ceil_div(W - j, d));
        Nj = std::max(0L, Nj);
        std::map<long, FieldElement> cs;
        for (long q = 0; q < Nj; ++q) cs.emplace(q, C[j][q]);
        H.push_back(Series::from_coefficients(K, 0, Nj, M, cs));
    }
    return H;
}

Series TraceOperator::discriminant_y() const {
    const long d = m_.d();
    std::vector<std::vector<Series>> G(d, std::vector<Series>(d));
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) G[i][j] = power_sum(i + j);
    return determinant(G);
}

Series TraceOperator::discriminant() const { return phi_power(m_, discriminant_y()); }

// ---------------------------------------------------------------- determinants

Series determinant(const std::vector<std::vector<Series>>& a) {
    const size_t n = a.size();
    if (n == 0) raise(ErrorKind::InvalidArgument, "empty matrix");
    if (n > 20) raise(ErrorKind::InvalidArgument, "matrix too large for subset expansion");
    // D[mask] = minor of the first popcount(mask) rows on the columns in mask
    std::vector<std::optional<Series>> D(size_t(1) << n);
    for (size_t mask = 1; mask < D.size(); ++mask) {
        size_t r = static_cast<size_t>(__builtin_popcountll(mask)) - 1;
        int below = 0;
        for (size_t c = 0; c < n; ++c) {
            if (!(mask >> c & 1)) continue;
            Series term = a[r][c];
            size_t rest = mask & ~(size_t(1) << c);
            if (rest) {
                if (!D[rest]) {
                    ++below;
                    continue;
                }
                term = term * *D[rest];
            }
            // sign of moving column c past the remaining larger columns in mask
            int larger = __builtin_popcountll(mask >> (c + 1));
            if (larger % 2) term = -term;
            D[mask] = D[mask] ? *D[mask] + term : term;
            ++below;
        }
    }
    return *D.back();
}

std::vector<std::vector<Series>> adjugate(const std::vector<std::vector<Series>>& a) {
    const size_t n = a.size();
    std::vector<std::vector<Series>> adj(n, std::vector<Series>(n));
    if (n == 1) {
        const Series& x = a[0][0];
        adj[0][0] = Series::constant(x.field(), FieldElement::from_integer(x.field(), 1, x.modulus()), x.hi(),
                                     x.modulus())
                        .restricted(std::min(0L, x.lo()), std::max(x.hi(), 1L));
        return adj;
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            std::vector<std::vector<Series>> minor;
            for (size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<Series> row;
                for (size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(a[r][c]);
                minor.push_back(row);
            }
            Series x = determinant(minor);
            adj[i][j] = (i + j) % 2 ? -x : x;
        }
    return adj;
}

Valuation residual_valuation(const Series& r) {
    const long e = r.field().e();
    if (r.is_zero()) return Valuation::AtLeast(Rational(r.modulus(), e));
    return Valuation::Exact(Rational(r.min_pi_valuation(), e));
}

// ---------------------------------------------------------------- dual basis

namespace {

Valuation worse(const Valuation& a, const Valuation& b) {
    if (a.exact != b.exact) return a.exact ? a : b;
    return a.q <= b.q ? a : b;
}

Series exact_polynomial(const Series& f) {
    long deg = f.degree();
    return f.restricted(0, std::max(deg + 1, 1L));
}

}  // namespace

DualBasisReport dual_basis_check(const TraceOperator& t) {
    const FiniteHeightMap& m = t.map();
    const Field& K = m.field();
    const long d = m.d();
    if (!t.weierstrass().polynomial_in_y)
        raise(ErrorKind::PreconditionViolated, "dual basis check needs deg s = wideg s");
    std::vector<std::vector<Series>> G(d, std::vector<Series>(d));
    long top = 1;
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) {
            G[i][j] = exact_polynomial(t.power_sum(i + j));
            top = std::max(top, G[i][j].hi());
        }
    // the entries are exact polynomials: widen so products keep every term
    for (auto& row : G)
        for (auto& x : row) x = x.padded(d * top + 1);
    Series delta = exact_polynomial(determinant(G));
    if (delta.is_zero()) raise(ErrorKind::DiscriminantIndistinguishableFromZero, "det of the trace form");
    auto adj = adjugate(G);

    const long M = t.modulus();
    LaurentInversePlan pl = plan_laurent_inverse(delta, M);
    long hy = t.y_window() / 2;
    LaurentInverse inv = invert_laurent(pl, hy + pl.k);
    // e_i^* = sum_k phi(adj_ik / delta) X^k
    std::vector<Series> dual;
    for (long i = 0; i < d; ++i) {
        std::optional<Series> ei;
        for (long k = 0; k < d; ++k) {
            Series a = exact_polynomial(adj[i][k]);
            Series g = inv.exact_high ? exact_mul(a, inv.inv, hy) : (a.padded(inv.inv.hi() - inv.inv.lo()) * inv.inv);
            g = g.restricted(g.lo(), std::min(g.hi(), hy)).trimmed_low();
            Series term = phi_laurent(m, g).shifted(k);
            ei = ei ? *ei + term : term;
        }
        dual.push_back(*ei);
    }
    DualBasisReport rep;
    rep.deficiency = Valuation::AtLeast(Rational(1000000));
    rep.pass = true;
    rep.modulus = M;
    rep.residuals.assign(d, std::vector<Series>(d));
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) {
            Series x = dual[i].shifted(j);
            Series r = t.psi_laurent(x);
            if (i == j) r = r - Series::constant(K, FieldElement::from_integer(K, 1, M), std::max(r.hi(), 1L), M);
            rep.residuals[i][j] = r;
            rep.deficiency = worse(rep.deficiency, residual_valuation(r));
            rep.modulus = std::min(rep.modulus, r.modulus());
            rep.pass = rep.pass && r.is_zero();
        }
    return rep;
}

}  // namespace robba
