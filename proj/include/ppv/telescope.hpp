#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppv/linalg.hpp"
#include "ppv/ore.hpp"
#include "ppv/tower.hpp"

namespace ppv {

struct Options {
    int nmax = 12;                    // cap on cyclic orders reported by the log-derivative test
    int mmax = 8;                     // cap on the integer-relation search
    bool optimize_squarefree = false; // clear by the exact lcm of denominators instead of d-powers
};

/// Execution trace kept alongside every result: stages attempted, per-stage
/// system sizes and bounds, and the structural parameters of the run.
struct StageTrace {
    int N = 0;
    int rows = 0;
    int cols = 0;
    int S = -2;  // exponential case only (-2: not applicable)
    int T = -1;  // exponential case only
};

struct Trace {
    std::vector<StageTrace> stages;
    std::map<std::string, long> params;
};

/// Minimal monic L in d/dt with L(eta) = d/dx f, plus the witness f.
struct RationalCert {
    RatX eta;
    OpT L;
    RatX f;
    Trace trace;
};

/// Minimal monic L with sum a_i R_i = d/dx h + p h for the compatible pair
/// (p, q), where R_0 = 1 and R_{i+1} = dR_i/dt + q R_i.
struct ExponentialCert {
    RatX p, q;
    OpT L;
    RatX h;
    Trace trace;
};

namespace detail {

/// Multiply every contribution by the clearing polynomial and lay out the
/// x-coefficients as rows of an exact linear system. The clearer is a
/// polynomial multiple of every denominator, so each product reduces to one
/// exact division -- no gcd needed.
inline MatT clear_to_rows(const std::vector<RatX>& contribs, const PolyX& clearer) {
    std::vector<PolyX> cleared;
    cleared.reserve(contribs.size());
    int maxdeg = -1;
    for (const RatX& c : contribs) {
        auto [q, r] = divmod(c.num * clearer, c.den);
        require_internal(r.is_zero_p(), "clearing polynomial did not clear a contribution");
        maxdeg = std::max(maxdeg, q.deg());
        cleared.push_back(std::move(q));
    }
    MatT rows;
    for (int r = 0; r <= maxdeg; ++r) {
        VecT row(contribs.size(), RatT());
        for (size_t j = 0; j < cleared.size(); ++j) row[j] = cleared[j].coeff(r);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline PolyX lcm_of_dens(const std::vector<RatX>& contribs) {
    PolyX l = PolyX::one();
    for (const RatX& c : contribs)
        if (!c.is_zero_f()) l = lcm(l, c.den);
    return l;
}

/// A stage contribution held as (poly + num / d^k) / W^c, where d is the
/// squarefree kernel and W(t) collects every coefficient denominator in
/// sight, so poly and num have denominator-free coefficients throughout.
/// With the denominators symbolic, the derivative chain and the clearing
/// step are pure polynomial arithmetic -- no gcd is ever taken.
struct PoweredContrib {
    PolyX poly;
    PolyX num;
    int c = 0;
    int k = 0;
};

inline RatX powered_to_ratx(const PoweredContrib& pc, const PolyX& d, const RatT& w) {
    RatX f(pc.poly);
    if (!pc.num.is_zero_p()) f = f + RatX(pc.num, pow(d, pc.k));
    if (pc.c > 0) {
        RatT s = RatT(Rat(1));
        for (int i = 0; i < pc.c; ++i) s = s * w;
        f = f / embed(s);
    }
    return f;
}

/// Number of times w divides f exactly (capped).
inline int w_valuation(const PolyT& f, const PolyT& w, int cap) {
    PolyT cur = f;
    int v = 0;
    while (v < cap) {
        auto [q, r] = divmod(cur, w);
        if (!r.is_zero_p()) break;
        cur = std::move(q);
        ++v;
    }
    return v;
}

/// Clear every contribution by W^a d^kclear (a = max c) and lay out the
/// x-coefficients as rows; the result is the generic cleared system with
/// every row scaled by a power of W, and the common W-power of each row is
/// divided back out at the end. All entries stay denominator-free.
inline MatT powered_to_rows(const std::vector<PoweredContrib>& contribs, const PolyX& d,
                            const PolyT& w, int kclear) {
    int a = 0;
    for (const PoweredContrib& pc : contribs) a = std::max(a, pc.c);
    // dhat = w * d has denominator-free coefficients
    PolyX dhat = map_coeffs(d, [&](const RatT& e) { return e * RatT(w); });
    std::vector<PolyX> dp(kclear + 1);
    dp[0] = PolyX::one();
    for (int i = 1; i <= kclear; ++i) dp[i] = dp[i - 1] * dhat;
    std::vector<PolyT> wp(a + kclear + 1);
    wp[0] = PolyT::one();
    for (int i = 1; i <= a + kclear; ++i) wp[i] = wp[i - 1] * w;
    auto scale_w = [&](const PolyX& f, int e) {
        if (e == 0) return f;
        return map_coeffs(f, [&](const RatT& x) { return x * RatT(wp[e]); });
    };
    std::vector<PolyX> cleared;
    cleared.reserve(contribs.size());
    int maxdeg = -1;
    for (const PoweredContrib& pc : contribs) {
        PolyX q;
        if (!pc.poly.is_zero_p()) q = scale_w(pc.poly, a - pc.c) * dp[kclear];
        if (!pc.num.is_zero_p()) {
            require_internal(pc.k <= kclear, "clearing power too small for a contribution");
            q = q + scale_w(pc.num, a - pc.c + pc.k) * dp[kclear - pc.k];
        }
        maxdeg = std::max(maxdeg, q.deg());
        cleared.push_back(std::move(q));
    }
    MatT rows;
    for (int r = 0; r <= maxdeg; ++r) {
        VecT row(contribs.size(), RatT());
        for (size_t j = 0; j < cleared.size(); ++j) row[j] = cleared[j].coeff(r);
        rows.push_back(std::move(row));
    }
    // strip the common W-power of each row (row scaling)
    if (w.deg() > 0) {
        const int cap = a + kclear;
        for (VecT& row : rows) {
            int v = cap;
            for (const RatT& e : row) {
                if (e.is_zero_f()) continue;
                v = std::min(v, w_valuation(e.num, w, v));
                if (v == 0) break;
            }
            if (v == 0 || v == cap) continue;
            for (RatT& e : row) {
                if (e.is_zero_f()) continue;
                PolyT n = e.num;
                for (int i = 0; i < v; ++i) n = exact_div(n, w);
                e = RatT::reduced(std::move(n), e.den);
            }
        }
    }
    return rows;
}

}  // namespace detail

/// The homogeneous stage-N system for the rational primitive: columns are
/// [alpha_0..alpha_N | beta_0..beta_{s+1} | xi_{1,0}..xi_{n+N-1,M-1}] and the
/// rows say that sum alpha_i (d/dt)^i eta - d/dx f vanishes identically.
struct RationalStage {
    MatT A;
    int cols = 0;
    int n_alpha = 0;  // alpha columns come first
    int n_beta = 0;
    int s = -1;       // polynomial-part degree of eta (-1 if none)
    int M = 0;        // deg of the squarefree kernel d
    int n = 0;        // largest pole multiplicity
    PolyX d;
};

inline RationalStage build_rational_system(const RatX& eta, int N, const Options& opts) {
    RationalStage st;
    ProperSplit ps = proper_split(eta);
    st.s = ps.poly.deg();
    if (ps.frac.is_zero_f()) {
        st.d = PolyX::one();
        st.n = 0;
    } else {
        SquarefreeKernel sk = squarefree_kernel(ps.frac.den);
        st.d = sk.d;
        st.n = sk.n;
    }
    st.M = st.d.deg();
    st.n_alpha = N + 1;
    st.n_beta = st.s + 2;

    const PolyX& d = st.d;
    const PolyX ddx = deriv_x(d);
    const PolyX ddt = deriv_t(d);
    std::vector<detail::PoweredContrib> contribs;
    // alpha columns: (d/dt)^i eta, carried over d^(n+i)
    detail::PoweredContrib a;
    a.poly = ps.poly;
    if (!ps.frac.is_zero_f()) {
        a.num = ps.frac.num * exact_div(pow(d, st.n), ps.frac.den);
        a.k = st.n;
    }
    for (int i = 0; i <= N; ++i) {
        contribs.push_back(a);
        if (i < N) {
            detail::PoweredContrib nx;
            nx.poly = deriv_t(a.poly);
            if (!a.num.is_zero_p()) {
                nx.num = deriv_t(a.num) * d - PolyX(ratt(a.k)) * a.num * ddt;
                nx.k = a.k + 1;
            }
            a = std::move(nx);
        }
    }
    // beta columns: -(d/dx) x^j = -j x^(j-1)
    for (int j = 0; j <= st.s + 1; ++j) {
        detail::PoweredContrib b;
        if (j > 0) b.poly = PolyX() - shift_up(PolyX(ratt(j)), j - 1);
        contribs.push_back(std::move(b));
    }
    // xi columns: -(d/dx)(x^l / d^k) = (k x^l d' - l x^(l-1) d) / d^(k+1)
    int kmax = st.n + N - 1;
    for (int k = 1; k <= kmax; ++k) {
        for (int l = 0; l < st.M; ++l) {
            detail::PoweredContrib xi;
            xi.num = PolyX(ratt(k)) * shift_up(ddx, l);
            if (l > 0) xi.num = xi.num - PolyX(ratt(l)) * shift_up(d, l - 1);
            xi.k = k + 1;
            contribs.push_back(std::move(xi));
        }
    }
    st.cols = static_cast<int>(contribs.size());
    if (opts.optimize_squarefree) {
        std::vector<RatX> rx;
        rx.reserve(contribs.size());
        for (const auto& c : contribs) rx.push_back(detail::powered_to_ratx(c, d));
        st.A = detail::clear_to_rows(rx, detail::lcm_of_dens(rx));
    } else {
        st.A = detail::powered_to_rows(contribs, d, st.n + N);
    }
    return st;
}

/// Assemble the witness f from a stage solution.
inline RatX rational_witness(const RationalStage& st, const VecT& sol) {
    RatX f;
    for (int j = 0; j <= st.s + 1; ++j)
        f = f + embed(sol[st.n_alpha + j]) * powx(ratx_x(), j);
    int idx = st.n_alpha + st.n_beta;
    int kmax = st.n + (st.n_alpha - 1) - 1;
    for (int k = 1; k <= kmax; ++k) {
        PolyX num;
        for (int l = 0; l < st.M; ++l) {
            num = num + shift_up(PolyX(sol[idx]), l);
            ++idx;
        }
        f = f + RatX(num) * powx(RatX(st.d), -k);
    }
    return f;
}

inline bool check_rational_cert(const RationalCert& c) {
    return apply_t(c.L, c.eta) - deriv_x(c.f) == RatX();
}

/// Minimal telescoper for the primitive of a rational function: the unique
/// monic L of least order with L(eta) = d/dx f for rational f, plus one such
/// witness. The zero input yields the unit operator with witness 0.
inline RationalCert primitive_of_rational(const RatX& eta, const Options& opts = {}) {
    RationalCert out;
    out.eta = eta;
    if (eta.is_zero_f()) {
        out.L = OpT::one();
        out.f = RatX();
        out.trace.params["degenerate"] = 1;
        return out;
    }
    // The order never exceeds the number of distinct poles (the residues span
    // at most an M-dimensional space), so the stage loop is capped by M.
    ProperSplit ps = proper_split(eta);
    int cap = 1;
    if (!ps.frac.is_zero_f()) cap = squarefree_kernel(ps.frac.den).d.deg() + 1;
    for (int N = 0; N < cap + 1; ++N) {
        RationalStage st = build_rational_system(eta, N, opts);
        StageTrace t;
        t.N = N;
        t.rows = static_cast<int>(st.A.size());
        t.cols = st.cols;
        out.trace.stages.push_back(t);
        auto sol = solve_with_unit_pivot(st.A, st.cols, N, {});
        if (sol) {
            OpT L;
            L.c.assign(N + 1, RatT());
            for (int i = 0; i <= N; ++i) L.c[i] = (*sol)[i];
            L.normalize();
            out.L = L;
            out.f = rational_witness(st, *sol);
            out.trace.params["order"] = N;
            out.trace.params["M"] = st.M;
            out.trace.params["n"] = st.n;
            out.trace.params["s"] = st.s;
            require_internal(check_rational_cert(out), "telescoper certificate failed to verify");
            return out;
        }
    }
    require_internal(false, "bound cap violated");
    return out;  // unreachable
}

// --- Exponential case -------------------------------------------------------

/// R_0 = 1, R_{i+1} = dR_i/dt + q R_i (so R_i plays the role of the i-th
/// derivative of the exponential divided by the exponential).
inline std::vector<RatX> r_sequence(const RatX& q, int N) {
    std::vector<RatX> r;
    r.reserve(N + 1);
    r.push_back(RatX(ratt(1)));
    for (int i = 1; i <= N; ++i) r.push_back(deriv_t(r.back()) + q * r.back());
    return r;
}

/// Shared structural data and the stage-N bounds for the exponential case.
struct ExpBounds {
    PolyX d;     // squarefree kernel of den(p) * den(q)
    int m = 0;   // deg d
    int nu = 0;  // smallest k with d^k p and d^k q polynomial
    int n = 0;   // max(deg p0, deg q0, nu) with deg 0 = 0
    int M = 0;   // order bound m*n + n + 1
    int S = -1;  // polynomial-part degree bound at stage N (-1: none allowed)
    int T = 0;   // pole-order bound at stage N
    int Mult = 0;
    long T_res = 0;
};

inline ExpBounds bounds_exponential(const RatX& p, const RatX& q, int N) {
    ExpBounds b;
    ProperSplit pp = proper_split(p), qp = proper_split(q);
    PolyX den_prod = p.den * q.den;
    b.d = den_prod.deg() > 0 ? squarefree_part(den_prod) : PolyX::one();
    b.m = b.d.deg();
    b.nu = std::max(b.m > 0 ? clear_count(b.d, p) : 0, b.m > 0 ? clear_count(b.d, q) : 0);
    b.n = std::max({pp.poly.deg_conv(), qp.poly.deg_conv(), b.nu});
    b.M = b.m * b.n + b.n + 1;

    std::vector<RatX> rs = r_sequence(q, N);
    int stilde = 0;
    int mult = 0;
    for (const RatX& ri : rs) {
        ProperSplit rp = proper_split(ri);
        stilde = std::max(stilde, rp.poly.deg_conv());
        if (b.m > 0) mult = std::max(mult, clear_count(b.d, ri));
    }
    b.Mult = mult;
    b.S = pp.poly.is_zero_p() ? stilde + 1 : stilde - pp.poly.deg();
    if (b.S < -1) b.S = -1;

    // Poles of the certificate can also appear, with integer order, where the
    // residue of p at one of its simple poles inside d is a positive integer.
    b.T_res = 0;
    if (b.m > 0 && p.den.deg() > 0) {
        PolyX g1 = gcd_x(b.d, p.den);
        if (g1.deg() > 0) {
            PolyX g2 = gcd(g1, gcd(p.den, derivative(p.den)));
            PolyX d1 = g2.deg() > 0 ? exact_div(g1, g2) : g1;
            if (d1.deg() > 0) {
                Poly<RatT> rr = residue_resultant_on(p, d1);
                for (const auto& [root, mlt] : integer_roots_z(rr))
                    if (root > 0 && root > b.T_res) b.T_res = root.get_si();
            }
        }
    }
    b.T = std::max({0, b.Mult - 1, static_cast<int>(b.T_res)});
    return b;
}

/// The homogeneous stage-N system for the exponential primitive: columns are
/// [a_0..a_N | beta_0..beta_S | xi_{1,0}..xi_{T,m-1}], rows say that
/// sum a_i R_i - (d/dx h + p h) vanishes identically.
struct ExponentialStage {
    MatT A;
    int cols = 0;
    int n_a = 0;
    int n_beta = 0;
    ExpBounds bounds;
};

inline ExponentialStage build_exponential_system(const RatX& p, const RatX& q, int N,
                                                 const Options& opts) {
    ExponentialStage st;
    st.bounds = bounds_exponential(p, q, N);
    const ExpBounds& b = st.bounds;
    st.n_a = N + 1;
    st.n_beta = b.S + 1;

    std::vector<RatX> contribs;
    std::vector<RatX> rs = r_sequence(q, N);
    for (const RatX& ri : rs) contribs.push_back(ri);
    auto h_col = [&](const RatX& basis) { return RatX() - (deriv_x(basis) + p * basis); };
    for (int j = 0; j <= b.S; ++j) contribs.push_back(h_col(powx(ratx_x(), j)));
    for (int k = 1; k <= b.T; ++k) {
        RatX dk = powx(RatX(b.d), -k);
        for (int l = 0; l < b.m; ++l) contribs.push_back(h_col(powx(ratx_x(), l) * dk));
    }
    st.cols = static_cast<int>(contribs.size());
    PolyX clearer;
    if (opts.optimize_squarefree) {
        clearer = detail::lcm_of_dens(contribs);
    } else {
        int c = std::max(b.Mult, b.T + b.nu);
        clearer = b.m > 0 ? pow(b.d, c) : PolyX::one();
    }
    st.A = detail::clear_to_rows(contribs, clearer);
    return st;
}

inline RatX exponential_witness(const ExponentialStage& st, const VecT& sol) {
    const ExpBounds& b = st.bounds;
    RatX h;
    for (int j = 0; j <= b.S; ++j) h = h + embed(sol[st.n_a + j]) * powx(ratx_x(), j);
    int idx = st.n_a + st.n_beta;
    for (int k = 1; k <= b.T; ++k) {
        PolyX num;
        for (int l = 0; l < b.m; ++l) {
            num = num + shift_up(PolyX(sol[idx]), l);
            ++idx;
        }
        h = h + RatX(num) * powx(RatX(b.d), -k);
    }
    return h;
}

inline bool check_exponential_cert(const ExponentialCert& c) {
    std::vector<RatX> rs = r_sequence(c.q, c.L.ord());
    RatX lhs;
    for (int i = 0; i <= c.L.ord(); ++i) lhs = lhs + embed(c.L.coeff(i)) * rs[i];
    return lhs - (deriv_x(c.h) + c.p * c.h) == RatX();
}

/// Minimal telescoper for the primitive of a (hyper)exponential integrand
/// described by its two logarithmic derivatives p (in x) and q (in t), which
/// must satisfy the compatibility d/dt p = d/dx q. Returns the unique monic L
/// of least order with sum a_i R_i = d/dx h + p h.
inline ExponentialCert primitive_of_exponential(const RatX& p, const RatX& q,
                                                const Options& opts = {}) {
    if (!(deriv_t(p) == deriv_x(q)))
        fail("domain", "p,q not integrable");
    ExponentialCert out;
    out.p = p;
    out.q = q;
    int cap = bounds_exponential(p, q, 0).M;
    for (int N = 0; N <= cap; ++N) {
        ExponentialStage st = build_exponential_system(p, q, N, opts);
        StageTrace t;
        t.N = N;
        t.rows = static_cast<int>(st.A.size());
        t.cols = st.cols;
        t.S = st.bounds.S;
        t.T = st.bounds.T;
        out.trace.stages.push_back(t);
        auto sol = solve_with_unit_pivot(st.A, st.cols, N, {});
        if (sol) {
            OpT L;
            L.c.assign(N + 1, RatT());
            for (int i = 0; i <= N; ++i) L.c[i] = (*sol)[i];
            L.normalize();
            out.L = L;
            out.h = exponential_witness(st, *sol);
            out.trace.params["order"] = N;
            out.trace.params["m"] = st.bounds.m;
            out.trace.params["n"] = st.bounds.n;
            out.trace.params["nu"] = st.bounds.nu;
            out.trace.params["M"] = st.bounds.M;
            require_internal(check_exponential_cert(out), "exponential certificate failed to verify");
            return out;
        }
    }
    require_internal(false, "bound cap violated");
    return out;  // unreachable
}

}  // namespace ppv
