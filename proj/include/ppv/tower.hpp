#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppv/error.hpp"
#include "ppv/poly.hpp"
#include "ppv/polyalg.hpp"
#include "ppv/ratfunc.hpp"
#include "ppv/rational.hpp"

namespace ppv {

/// The coefficient tower: rationals Q, then Q(t), then Q(t)[x] and Q(t)(x).
/// Two commuting derivations act on the top level: d/dx (the main variable)
/// and d/dt (coefficient-wise).
using PolyT = Poly<Rat>;
using RatT = RatFunc<Rat>;
using PolyX = Poly<RatT>;
using RatX = RatFunc<RatT>;

namespace detail {

/// Integer-primitive image of a rational-coefficient polynomial: content
/// stripped, positive leading coefficient, ascending order. Empty for zero.
inline std::vector<Int> z_primitive(const PolyT& f) {
    Int den(1);
    for (const Rat& c : f.c) den = lcm(den, Int(c.get_den()));
    std::vector<Int> out;
    out.reserve(f.c.size());
    Int cont(0);
    for (const Rat& c : f.c) {
        Rat scaled = c * Rat(den);
        out.push_back(Int(scaled.get_num()));
        cont = gcd(cont, out.back());
    }
    if (sgn(cont) != 0)
        for (Int& v : out) v /= cont;
    if (!out.empty() && sgn(out.back()) < 0)
        for (Int& v : out) v = -v;
    return out;
}

/// Pseudo-remainder lc(g)^(deg f - deg g + 1) * f mod g over Z, trailing
/// zeros trimmed.
inline std::vector<Int> z_prem(std::vector<Int> f, const std::vector<Int>& g) {
    const Int& lg = g.back();
    const int n = static_cast<int>(g.size()) - 1;
    while (static_cast<int>(f.size()) - 1 >= n) {
        Int top = f.back();
        for (Int& v : f) v *= lg;
        int k = static_cast<int>(f.size()) - 1;
        for (int i = 0; i <= n; ++i) f[k - n + i] -= top * g[i];
        // the leading term cancelled by construction
        while (!f.empty() && sgn(f.back()) == 0) f.pop_back();
    }
    return f;
}

inline void z_make_primitive(std::vector<Int>& f) {
    Int cont(0);
    for (const Int& v : f) cont = gcd(cont, v);
    if (sgn(cont) != 0)
        for (Int& v : f) v /= cont;
    if (!f.empty() && sgn(f.back()) < 0)
        for (Int& v : f) v = -v;
}

/// 31-bit primes for modular gcd images (products of two residues fit in 64
/// bits). Found once by downward trial division from 2^31 - 1.
inline const std::vector<std::uint64_t>& gcd_primes() {
    static const std::vector<std::uint64_t> ps = [] {
        std::vector<std::uint64_t> out;
        for (std::uint64_t c = (1ULL << 31) - 1; out.size() < 128; c -= 2) {
            bool prime = c % 3 != 0;
            for (std::uint64_t d = 5; prime && d * d <= c; d += 6)
                if (c % d == 0 || c % (d + 2) == 0) prime = false;
            if (prime) out.push_back(c);
        }
        return out;
    }();
    return ps;
}

inline std::uint64_t powmod31(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

inline std::uint64_t residue31(const Int& a, std::uint64_t p) {
    Int m = a % Int(static_cast<unsigned long>(p));
    if (m < 0) m += Int(static_cast<unsigned long>(p));
    return m.get_ui();
}

/// Monic gcd image of two integer polynomials modulo p. Returns false when p
/// divides either leading coefficient (degree would drop).
inline bool modgcd_image(const std::vector<Int>& f, const std::vector<Int>& g, std::uint64_t p,
                         std::vector<std::uint64_t>& out) {
    if (residue31(f.back(), p) == 0 || residue31(g.back(), p) == 0) return false;
    std::vector<std::uint64_t> a(f.size()), b(g.size());
    for (size_t i = 0; i < f.size(); ++i) a[i] = residue31(f[i], p);
    for (size_t i = 0; i < g.size(); ++i) b[i] = residue31(g[i], p);
    auto trim = [](std::vector<std::uint64_t>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    while (!b.empty()) {
        // a mod b in F_p
        std::uint64_t inv = powmod31(b.back(), p - 2, p);
        while (a.size() >= b.size()) {
            std::uint64_t c = a.back() * inv % p;
            size_t off = a.size() - b.size();
            if (c != 0)
                for (size_t i = 0; i + 1 < b.size(); ++i)
                    a[off + i] = (a[off + i] + p - c * b[i] % p) % p;
            a.pop_back();
            trim(a);
        }
        std::swap(a, b);
    }
    std::uint64_t inv = powmod31(a.back(), p - 2, p);
    for (std::uint64_t& c : a) c = c * inv % p;
    out = std::move(a);
    return true;
}

/// Divisibility of primitive integer polynomials (pseudo-remainder test).
inline bool z_divides(const std::vector<Int>& f, const std::vector<Int>& h) {
    if (h.size() == 1) return true;
    return z_prem(f, h).empty();
}

/// Modular gcd of primitive integer polynomials: images modulo 31-bit primes,
/// normalized by gamma = gcd of the leading coefficients, combined by CRT with
/// symmetric lifting, and certified by exact division. A degree-0 image proves
/// coprimality outright. Returns false if the prime table runs dry (then the
/// caller uses the remainder-sequence path).
inline bool z_gcd_modular(const std::vector<Int>& f, const std::vector<Int>& g,
                          std::vector<Int>& out) {
    Int gamma;
    mpz_gcd(gamma.get_mpz_t(), f.back().get_mpz_t(), g.back().get_mpz_t());
    int d_best = -1;
    Int modulus(1);
    std::vector<Int> acc;  // CRT accumulation of gamma * monic image
    bool had_candidate = false;
    std::vector<Int> candidate;
    for (std::uint64_t p : gcd_primes()) {
        std::vector<std::uint64_t> img;
        if (!modgcd_image(f, g, p, img)) continue;
        int d = static_cast<int>(img.size()) - 1;
        if (d == 0) {
            out.assign(1, Int(1));
            return true;
        }
        if (d_best < 0 || d < d_best) {
            d_best = d;
            modulus = 1;
            acc.assign(d + 1, Int(0));
            had_candidate = false;
        } else if (d > d_best) {
            continue;  // unlucky prime
        }
        std::uint64_t gp = residue31(gamma, p);
        Int P(static_cast<unsigned long>(p));
        if (modulus == 1) {
            for (int i = 0; i <= d; ++i) acc[i] = Int(static_cast<unsigned long>(img[i] * gp % p));
            modulus = P;
        } else {
            // Garner step: adjust acc to also match the new image mod p.
            Int minv;
            mpz_invert(minv.get_mpz_t(), modulus.get_mpz_t(), P.get_mpz_t());
            for (int i = 0; i <= d; ++i) {
                std::uint64_t want = img[i] * gp % p;
                std::uint64_t have = residue31(acc[i], p);
                std::uint64_t delta = (want + p - have) % p;
                Int corr = Int(static_cast<unsigned long>(delta)) * minv % P;
                if (corr < 0) corr += P;
                acc[i] += modulus * corr;
            }
            modulus *= P;
        }
        // Symmetric lift, primitive part, then certify by division.
        std::vector<Int> h(acc);
        Int half = modulus / 2;
        for (Int& c : h) {
            c %= modulus;
            if (c < 0) c += modulus;
            if (c > half) c -= modulus;
        }
        while (!h.empty() && sgn(h.back()) == 0) h.pop_back();
        if (static_cast<int>(h.size()) - 1 != d_best) continue;
        z_make_primitive(h);
        if (had_candidate && h == candidate) {
            // stabilized under a fresh prime: worth the division test
            if (z_divides(f, h) && z_divides(g, h)) {
                out = std::move(h);
                return true;
            }
        }
        candidate = std::move(h);
        had_candidate = true;
    }
    return false;
}

}  // namespace detail

/// Monic gcd in Q[t]. The generic monic-Euclid template suffers exponential
/// coefficient growth on rational coefficients, so the inputs are scaled to
/// primitive integer polynomials first and handled modularly (a single prime
/// image certifies the common coprime case); the primitive remainder sequence
/// over Z stays as the deterministic fallback.
inline PolyT gcd(const PolyT& a, const PolyT& b) {
    if (a.is_zero_p()) return monic(b);
    if (b.is_zero_p()) return monic(a);
    std::vector<Int> f = detail::z_primitive(a), g = detail::z_primitive(b);
    if (f.size() < g.size()) std::swap(f, g);
    if (g.size() == 1) return PolyT::one();
    std::vector<Int> h;
    if (f == g) {
        h = f;
    } else if (!detail::z_gcd_modular(f, g, h)) {
        while (!g.empty()) {
            std::vector<Int> r = detail::z_prem(f, g);
            detail::z_make_primitive(r);
            f = std::move(g);
            g = std::move(r);
        }
        h = std::move(f);
    }
    PolyT out;
    out.c.assign(h.begin(), h.end());
    out.normalize();
    return monic(out);
}

namespace detail {

/// Lift an x-polynomial to Q[t][x]: clear the rational-function denominators
/// of its coefficients against their lcm.
inline std::vector<PolyT> xz_lift(const PolyX& a) {
    PolyT den = PolyT::one();
    for (const RatT& c : a.c) den = lcm(den, c.den);
    std::vector<PolyT> f;
    f.reserve(a.c.size());
    for (const RatT& c : a.c) f.push_back(c.num * exact_div(den, c.den));
    return f;
}

/// Two-level primitive normalization in Q[t][x]: divide out the monic PolyT
/// content, then rescale so the rational coefficients become coprime integers.
inline void xz_normalize(std::vector<PolyT>& f) {
    while (!f.empty() && f.back().is_zero_p()) f.pop_back();
    if (f.empty()) return;
    PolyT cont;
    for (const PolyT& c : f) cont = gcd(cont, c);
    if (cont.deg() > 0)
        for (PolyT& c : f) c = exact_div(c, cont);
    Int den(1), num(0);
    for (const PolyT& c : f)
        for (const Rat& v : c.c) {
            den = lcm(den, Int(v.get_den()));
            num = gcd(num, Int(v.get_num()));
        }
    Rat scale = sgn(num) == 0 ? Rat(1) : Rat(den) / Rat(num);
    if (sgn(f.back().lc()) < 0) scale = -scale;
    if (scale != 1)
        for (PolyT& c : f) c = c * scale;
}

/// Pseudo-remainder in x over Q[t], trailing zeros trimmed.
inline std::vector<PolyT> xz_prem(std::vector<PolyT> f, const std::vector<PolyT>& g) {
    const PolyT& lg = g.back();
    const int n = static_cast<int>(g.size()) - 1;
    while (static_cast<int>(f.size()) - 1 >= n) {
        PolyT top = f.back();
        for (PolyT& v : f) v = v * lg;
        int k = static_cast<int>(f.size()) - 1;
        for (int i = 0; i <= n; ++i) f[k - n + i] = f[k - n + i] - top * g[i];
        while (!f.empty() && f.back().is_zero_p()) f.pop_back();
    }
    return f;
}

/// Monic gcd of two univariate rational-coefficient polynomials given as
/// ascending coefficient vectors, through the integer remainder sequence.
inline std::vector<Rat> q_vec_gcd_monic(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    auto primitive = [](const std::vector<Rat>& p) {
        Int den(1);
        for (const Rat& c : p) den = lcm(den, Int(c.get_den()));
        std::vector<Int> out;
        out.reserve(p.size());
        Int cont(0);
        for (const Rat& c : p) {
            Rat scaled = c * Rat(den);
            out.push_back(Int(scaled.get_num()));
            cont = gcd(cont, out.back());
        }
        if (sgn(cont) != 0)
            for (Int& v : out) v /= cont;
        return out;
    };
    std::vector<Int> f = primitive(a), g = primitive(b);
    if (f.size() < g.size()) std::swap(f, g);
    if (g.empty()) std::swap(f, g);
    while (!g.empty()) {
        std::vector<Int> r = z_prem(f, g);
        z_make_primitive(r);
        f = std::move(g);
        g = std::move(r);
    }
    std::vector<Rat> out;
    out.reserve(f.size());
    for (const Int& v : f) out.push_back(Rat(v) / Rat(f.back()));
    return out;
}

inline int deg_t_of(const std::vector<PolyT>& f) {
    int d = 0;
    for (const PolyT& c : f) d = std::max(d, c.deg());
    return d;
}

/// Brown-style evaluation/interpolation gcd in Q[t][x] for primitive inputs
/// of positive x-degree. Images at rational points of t are normalized by
/// gamma = gcd of the leading coefficients (a known multiple of the gcd's
/// leading coefficient), interpolated, and verified by pseudo-division.
/// Returns nothing if the deterministic node supply is exhausted (the caller
/// falls back to the primitive remainder sequence).
inline std::optional<std::vector<PolyT>> xz_gcd_brown(const std::vector<PolyT>& f,
                                                      const std::vector<PolyT>& g) {
    const PolyT& lcf = f.back();
    const PolyT& lcg = g.back();
    PolyT gamma = gcd(lcf, lcg);
    const int bound = gamma.deg() + std::min(deg_t_of(f), deg_t_of(g));
    const int need = bound + 1;

    std::vector<Rat> nodes;
    std::vector<std::vector<Rat>> images;
    int d_best = -1;
    long max_attempts = 16L * (need + 2);
    for (long step = 0; step < max_attempts; ++step) {
        // 0, 1, -1, 2, -2, ...
        long v = (step + 1) / 2;
        Rat tau = (step % 2 == 1) ? Rat(v) : Rat(-v);
        if (is_zero(eval(lcf, tau)) || is_zero(eval(lcg, tau))) continue;
        std::vector<Rat> fe, ge;
        fe.reserve(f.size());
        ge.reserve(g.size());
        for (const PolyT& c : f) fe.push_back(eval(c, tau));
        for (const PolyT& c : g) ge.push_back(eval(c, tau));
        std::vector<Rat> im = q_vec_gcd_monic(fe, ge);
        int d = static_cast<int>(im.size()) - 1;
        if (d == 0) {
            return std::vector<PolyT>{PolyT::one()};
        }
        if (d_best < 0 || d < d_best) {
            d_best = d;
            nodes.clear();
            images.clear();
        }
        if (d == d_best) {
            Rat scale = eval(gamma, tau);
            for (Rat& c : im) c *= scale;
            nodes.push_back(tau);
            images.push_back(std::move(im));
        }
        if (static_cast<int>(nodes.size()) == need) {
            // Newton interpolation of every x-coefficient
            const int ncoef = d_best + 1;
            std::vector<PolyT> h(ncoef);
            for (int c = 0; c < ncoef; ++c) {
                // divided differences
                std::vector<Rat> dd(need);
                for (int j = 0; j < need; ++j) dd[j] = images[j][c];
                for (int lev = 1; lev < need; ++lev)
                    for (int j = need - 1; j >= lev; --j)
                        dd[j] = (dd[j] - dd[j - 1]) / (nodes[j] - nodes[j - lev]);
                PolyT acc;  // Newton form, highest term first
                for (int j = need - 1; j >= 0; --j) {
                    PolyT shift;
                    shift.c = {-nodes[j], Rat(1)};
                    shift.normalize();
                    acc = acc * shift + PolyT(dd[j]);
                }
                h[c] = acc;
            }
            xz_normalize(h);
            if (!h.empty() && static_cast<int>(h.size()) - 1 == d_best &&
                xz_prem(f, h).empty() && xz_prem(g, h).empty())
                return h;
            // unlucky batch: drop the oldest sample and keep collecting
            nodes.erase(nodes.begin());
            images.erase(images.begin());
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Monic gcd in Q(t)[x]. Field-coefficient Euclid is catastrophically slow
/// here (monic normalization compounds rational-function denominators), so
/// the inputs are lifted to Q[t][x] and handed to the evaluation gcd, with
/// the primitive remainder sequence as a deterministic fallback.
inline PolyX gcd(const PolyX& a, const PolyX& b) {
    if (a.is_zero_p()) return monic(b);
    if (b.is_zero_p()) return monic(a);
    std::vector<PolyT> f = detail::xz_lift(a), g = detail::xz_lift(b);
    detail::xz_normalize(f);
    detail::xz_normalize(g);
    if (f.size() < g.size()) std::swap(f, g);
    if (g.size() == 1) return PolyX::one();
    std::optional<std::vector<PolyT>> h = detail::xz_gcd_brown(f, g);
    if (!h) {
        while (!g.empty()) {
            std::vector<PolyT> r = detail::xz_prem(f, g);
            detail::xz_normalize(r);
            f = std::move(g);
            g = std::move(r);
        }
        h = std::move(f);
    }
    PolyX out;
    out.c.reserve(h->size());
    for (PolyT& ci : *h) out.c.push_back(RatT(std::move(ci)));
    out.normalize();
    return monic(out);
}

inline RatT ratt(long n, long d = 1) { return RatT(rat_of(n, d)); }
inline RatT ratt_t() { return RatT(PolyT::var()); }
inline PolyX polyx_x() { return PolyX::var(); }
inline RatX ratx_x() { return RatX(PolyX::var()); }
inline RatX ratx(long n, long d = 1) { return RatX(RatT(rat_of(n, d))); }
inline RatX embed(const RatT& a) { return RatX(PolyX(a)); }

// --- Derivations ------------------------------------------------------------

inline PolyT deriv_t(const PolyT& p) { return derivative(p); }
inline RatT deriv_t(const RatT& a) {
    return derive(a, [](const PolyT& p) { return derivative(p); });
}
inline PolyX deriv_x(const PolyX& p) { return derivative(p); }
inline PolyX deriv_t(const PolyX& p) {
    return map_coeffs(p, [](const RatT& a) { return deriv_t(a); });
}
inline RatX deriv_x(const RatX& f) {
    return derive(f, [](const PolyX& p) { return derivative(p); });
}
inline RatX deriv_t(const RatX& f) {
    return derive(f, [](const PolyX& p) { return deriv_t(p); });
}

// --- Small conveniences -----------------------------------------------------

inline bool is_constant_x(const RatX& f) { return f.num.deg() <= 0 && f.den.deg() == 0; }

/// Extract the Q(t)-value of an x-constant element.
inline RatT as_ratt(const RatX& f) {
    require_internal(is_constant_x(f), "expected an x-constant rational function");
    return f.num.coeff(0);
}

inline RatX powx(const RatX& f, long e) {
    if (e < 0) {
        require_internal(!f.is_zero_f(), "negative power of zero");
        return powx(RatX(ratt(1)) / f, -e);
    }
    RatX r = RatX(ratt(1));
    RatX b = f;
    long k = e;
    while (k > 0) {
        if (k & 1) r = r * b;
        b = b * b;
        k >>= 1;
    }
    return r;
}

inline PolyX gcd_x(const PolyX& a, const PolyX& b) {
    if (a.is_zero_p() && b.is_zero_p()) fail("domain", "gcd of zeros");
    return gcd(a, b);
}

/// Extended gcd over K[x]: g = s*a + t*b with g monic.
template <class K>
struct XGcd {
    Poly<K> g, s, t;
};

template <class K>
inline XGcd<K> xgcd(const Poly<K>& a, const Poly<K>& b) {
    if (a.is_zero_p() && b.is_zero_p()) fail("domain", "extended gcd of two zero polynomials");
    Poly<K> r0 = a, r1 = b;
    Poly<K> s0 = Poly<K>::one(), s1 = Poly<K>::zero();
    Poly<K> t0 = Poly<K>::zero(), t1 = Poly<K>::one();
    while (!r1.is_zero_p()) {
        auto [q, r] = divmod(r0, r1);
        Poly<K> s2 = s0 - q * s1;
        Poly<K> t2 = t0 - q * t1;
        r0 = r1; r1 = r;
        s0 = s1; s1 = s2;
        t0 = t1; t1 = t2;
    }
    K inv = K(1) / r0.lc();
    return XGcd<K>{r0 * inv, s0 * inv, t0 * inv};
}

// --- Squarefree structure ---------------------------------------------------

/// Squarefree kernel of a nonzero polynomial: the product d of its distinct
/// irreducible factors, together with the largest multiplicity n. Constants
/// give d = 1, n = 0.
struct SquarefreeKernel {
    PolyX d;
    int n = 0;
};

inline SquarefreeKernel squarefree_kernel(const PolyX& D) {
    require_internal(!D.is_zero_p(), "squarefree kernel of zero");
    SquarefreeKernel out;
    out.d = PolyX::one();
    for (const auto& [fac, mult] : squarefree_decomposition(D)) {
        out.d = out.d * fac;
        out.n = std::max(out.n, mult);
    }
    return out;
}

/// Smallest k >= 0 such that d^k * f is a polynomial. Every pole of f must lie
/// on the zero set of d; a pole outside it would make the loop stall, which is
/// reported as an internal error.
inline int clear_count(const PolyX& d, const RatX& f) {
    int k = 0;
    RatX cur = f;
    while (cur.den.deg() > 0) {
        int before = cur.den.deg();
        cur = cur * RatX(d);
        if (cur.den.deg() >= before) fail("domain", "denominator outside d-adic span");
        ++k;
    }
    return k;
}

// --- Proper decomposition ---------------------------------------------------

/// f = poly + frac with deg(num(frac)) < deg(den(frac)).
struct ProperSplit {
    PolyX poly;
    RatX frac;
};

inline ProperSplit proper_split(const RatX& f) {
    auto [q, r] = divmod(f.num, f.den);
    ProperSplit out;
    out.poly = q;
    out.frac = RatX(r, f.den);
    return out;
}

/// Product of the factors of D that appear with multiplicity exactly one.
inline PolyX simple_pole_divisor(const PolyX& D) {
    require_internal(!D.is_zero_p(), "simple pole divisor of zero");
    PolyX sf = squarefree_part(D);
    PolyX rep = gcd(D, derivative(D));
    PolyX g = gcd(sf, rep);
    return g.deg() > 0 ? exact_div(sf, g) : sf;
}

// --- Residues at simple poles (Rothstein-Trager) ----------------------------

/// Resultant whose roots (in the auxiliary variable z) are exactly the
/// residues of A/D at the roots of the squarefree divisor D1 | D, counted once
/// per pole: Res_x(D1, A1 - z * D1') after splitting off the D1-part A1 of the
/// partial fraction. Requires gcd(D1, D/D1) = 1, which holds whenever D1
/// collects complete factors of D.
inline Poly<RatT> residue_resultant_core(const PolyX& A, const PolyX& D, const PolyX& D1) {
    if (D1.deg() == 0) return Poly<RatT>::one();
    PolyX rest = exact_div(D, D1);
    PolyX A1;
    if (rest.deg() == 0) {
        RatT inv = RatT(Rat(1)) / rest.lc();
        A1 = divmod(A * inv, D1).second;
    } else {
        require_internal(gcd(D1, rest).deg() == 0, "simple-pole divisor shares factors with the rest");
        XGcd<RatT> e = xgcd(rest, D1);
        require_internal(e.g.deg() == 0, "non-coprime split in residue computation");
        A1 = divmod(A * e.s, D1).second;
    }
    PolyX d1p = derivative(D1);
    // Lift to polynomials in z: D1 as z-constants, A1 - z*D1' linear in z.
    using ZP = Poly<RatT>;
    Poly<ZP> ax, bx;
    ax.c.resize(D1.deg() + 1);
    for (int i = 0; i <= D1.deg(); ++i) ax.c[i] = ZP(D1.coeff(i));
    ax.normalize();
    int bdeg = std::max(A1.deg(), d1p.deg());
    bx.c.resize(bdeg + 1, ZP());
    for (int i = 0; i <= bdeg; ++i) {
        ZP e;
        e.c = {A1.coeff(i), RatT() - d1p.coeff(i)};
        e.normalize();
        bx.c[i] = e;
    }
    bx.normalize();
    require_internal(!bx.is_zero_p(), "degenerate residue resultant");
    return resultant(ax, bx);
}

/// Residues of f at its simple poles, as the roots of a polynomial in z.
inline Poly<RatT> residue_resultant(const RatX& f) {
    ProperSplit ps = proper_split(f);
    if (ps.frac.is_zero_f()) return Poly<RatT>::one();
    PolyX D = ps.frac.den;
    PolyX D1 = simple_pole_divisor(D);
    return residue_resultant_core(ps.frac.num, D, D1);
}

/// Same, restricted to the poles on a caller-supplied squarefree divisor d1 of
/// the denominator (d1 must collect complete multiplicity-one factors).
inline Poly<RatT> residue_resultant_on(const RatX& f, const PolyX& d1) {
    ProperSplit ps = proper_split(f);
    if (ps.frac.is_zero_f() || d1.deg() == 0) return Poly<RatT>::one();
    return residue_resultant_core(ps.frac.num, ps.frac.den, monic(d1));
}

// --- Exact rational roots of polynomials over Q(t) --------------------------

namespace detail {

/// Horner evaluation of an integer polynomial, exact.
inline Int eval_int_poly(const std::vector<Int>& h, const Int& x) {
    Int r = 0;
    for (size_t i = h.size(); i-- > 0;) r = r * x + h[i];
    return r;
}

inline std::uint64_t mod_reduce(const Int& a, std::uint64_t p) {
    Int m = a % Int(static_cast<unsigned long>(p));
    if (m < 0) m += Int(static_cast<unsigned long>(p));
    return m.get_ui();
}

inline std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

/// Polynomial gcd over F_p, used only to certify squarefreeness mod p.
inline std::vector<std::uint64_t> mod_gcd(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b,
                                          std::uint64_t p) {
    auto trim = [](std::vector<std::uint64_t>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        // a mod b
        std::uint64_t inv = mod_pow(b.back(), p - 2, p);
        while (a.size() >= b.size()) {
            std::uint64_t c = a.back() * inv % p;
            if (c != 0) {
                size_t off = a.size() - b.size();
                for (size_t i = 0; i < b.size(); ++i)
                    a[off + i] = (a[off + i] + p - c * b[i] % p) % p;
            }
            a.pop_back();
            trim(a);
            if (a.size() < b.size()) break;
        }
        std::swap(a, b);
    }
    return a;
}

/// Integer roots of a primitive squarefree integer polynomial, by root finding
/// mod a prime followed by Newton (Hensel) lifting and exact verification.
inline std::vector<Int> int_roots_squarefree(std::vector<Int> h) {
    std::vector<Int> roots;
    while (!h.empty() && h.back() == 0) h.pop_back();
    if (h.size() <= 1) return roots;
    if (h[0] == 0) {
        roots.push_back(Int(0));
        h.erase(h.begin());  // squarefree: the zero root is simple
        while (!h.empty() && h.back() == 0) h.pop_back();
        if (h.size() <= 1) return roots;
    }
    // Cauchy bound on the magnitude of any root.
    Int lead = abs(h.back());
    Int maxc = 0;
    for (const Int& c : h) {
        Int a = abs(c);
        if (a > maxc) maxc = a;
    }
    Int bound = 2 + maxc / lead;

    static const std::uint64_t primes[] = {10007, 10009, 10037, 10039, 10061, 10067, 10069, 10079,
                                           10091, 10093, 10099, 10103, 10111, 10133, 10139, 10141,
                                           10151, 10159, 10163, 10169, 10177, 10181, 10193, 10211};
    for (std::uint64_t p : primes) {
        if (mod_reduce(h.back(), p) == 0) continue;
        std::vector<std::uint64_t> hp(h.size());
        for (size_t i = 0; i < h.size(); ++i) hp[i] = mod_reduce(h[i], p);
        std::vector<std::uint64_t> hpd(hp.size() - 1);
        for (size_t i = 1; i < hp.size(); ++i) hpd[i - 1] = hp[i] * (i % p) % p;
        if (mod_gcd(hp, hpd, p).size() != 1) continue;  // not squarefree mod p
        // Roots mod p by exhaustive evaluation (p ~ 10^4).
        std::vector<std::uint64_t> base_roots;
        for (std::uint64_t r = 0; r < p; ++r) {
            std::uint64_t v = 0;
            for (size_t i = hp.size(); i-- > 0;) v = (v * r + hp[i]) % p;
            if (v == 0) base_roots.push_back(r);
        }
        std::vector<Int> hd(h.size() - 1);
        for (size_t i = 1; i < h.size(); ++i) hd[i - 1] = h[i] * Int(static_cast<unsigned long>(i));
        for (std::uint64_t r0 : base_roots) {
            Int m(static_cast<unsigned long>(p));
            Int r(static_cast<unsigned long>(r0));
            while (m <= 2 * bound) {
                m = m * m;
                Int fp = eval_int_poly(hd, r) % m;
                Int inv;
                if (mpz_invert(inv.get_mpz_t(), fp.get_mpz_t(), m.get_mpz_t()) == 0)
                    require_internal(false, "Newton lifting lost invertibility");
                r = (r - eval_int_poly(h, r) * inv) % m;
                if (r < 0) r += m;
            }
            if (r > m / 2) r -= m;  // center
            if (eval_int_poly(h, r) == 0) roots.push_back(r);
        }
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        return roots;
    }
    fail("unsupported", "could not find a usable prime for integer root isolation");
}

/// All rational roots of a nonzero polynomial over Q.
inline std::vector<Rat> rational_roots_q(const Poly<Rat>& f_in) {
    std::vector<Rat> out;
    if (f_in.deg() <= 0) return out;
    // Squarefree part, then clear to a primitive integer polynomial.
    Poly<Rat> f = f_in;
    Poly<Rat> g = gcd(f, derivative(f));
    if (g.deg() > 0) f = exact_div(f, g);
    Int den_lcm = 1;
    for (const Rat& c : f.c) den_lcm = lcm(den_lcm, c.get_den());
    std::vector<Int> h(f.c.size());
    for (size_t i = 0; i < f.c.size(); ++i) {
        Rat scaled = f.c[i] * Rat(den_lcm);
        require_internal(scaled.get_den() == 1, "denominator clearing failed");
        h[i] = scaled.get_num();
    }
    Int content = 0;
    for (const Int& c : h) content = gcd(content, c);
    if (content > 1)
        for (Int& c : h) c /= content;
    // Rational roots p/q have q | lc; substitute y = lc * z to reduce to the
    // monic integer case.
    Int lead = h.back();
    std::vector<Int> hs(h.size());
    Int scale = 1;
    for (size_t i = h.size(); i-- > 0;) {
        hs[i] = h[i] * scale;
        if (i > 0) scale *= lead;
    }
    for (const Int& y : int_roots_squarefree(hs)) out.emplace_back(Rat(y) / Rat(lead));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Rational (constant) roots of a polynomial in z with coefficients in Q(t),
/// with multiplicities, plus a flag telling whether the polynomial splits
/// completely over Q.
struct QRoots {
    std::vector<std::pair<Rat, int>> roots;
    bool fully_split = false;
};

inline QRoots rational_roots_z(const Poly<RatT>& P_in) {
    require_internal(!P_in.is_zero_p(), "roots of the zero polynomial");
    QRoots out;
    if (P_in.deg() == 0) {
        out.fully_split = true;
        return out;
    }
    // Clear t-denominators: P becomes an element of Q[t][z].
    PolyT den_lcm = PolyT::one();
    for (const RatT& c : P_in.c)
        if (!c.is_zero_f()) den_lcm = lcm(den_lcm, c.den);
    std::vector<PolyT> zc(P_in.c.size());  // zc[i] in Q[t]
    int tdeg = 0;
    for (size_t i = 0; i < P_in.c.size(); ++i) {
        if (P_in.c[i].is_zero_f()) continue;
        zc[i] = P_in.c[i].num * exact_div(den_lcm, P_in.c[i].den);
        tdeg = std::max(tdeg, zc[i].deg());
    }
    // A constant root must kill every t-slice simultaneously, so it is a root
    // of the gcd of the slice polynomials q_j(z) = sum_i coeff(zc[i], j) z^i.
    Poly<Rat> g;
    for (int j = 0; j <= tdeg; ++j) {
        Poly<Rat> qj;
        qj.c.resize(zc.size(), Rat(0));
        for (size_t i = 0; i < zc.size(); ++i) qj.c[i] = zc[i].coeff(j);
        qj.normalize();
        g = gcd(g, qj);
        if (g.deg() == 0 && !g.is_zero_p()) break;
    }
    require_internal(!g.is_zero_p(), "slice gcd vanished for a nonzero polynomial");
    int total = 0;
    for (const Rat& c : detail::rational_roots_q(g)) {
        // Verify against the original polynomial and count the multiplicity.
        Poly<RatT> cur = P_in;
        Poly<RatT> lin;
        lin.c = {RatT(Rat(0)) - RatT(c), RatT(Rat(1))};
        int mult = 0;
        for (;;) {
            auto [q, r] = divmod(cur, lin);
            if (!r.is_zero_p()) break;
            ++mult;
            cur = q;
            if (cur.deg() == 0) break;
        }
        if (mult > 0) {
            out.roots.emplace_back(c, mult);
            total += mult;
        }
    }
    out.fully_split = (total == P_in.deg());
    return out;
}

/// Integer roots with multiplicities (a filtered view of the rational ones).
inline std::vector<std::pair<Int, int>> integer_roots_z(const Poly<RatT>& P) {
    std::vector<std::pair<Int, int>> out;
    for (const auto& [r, m] : rational_roots_z(P).roots)
        if (r.get_den() == 1) out.emplace_back(r.get_num(), m);
    return out;
}

// --- Canonical display form -------------------------------------------------
//
// Internally denominators are monic; for display both sides are scaled to
// integer coefficients, jointly primitive, with a positive leading
// denominator. Rendering and parsing round-trip on this form.

namespace detail {

/// Scale a pair of Q[t] polynomials to integer coefficients, jointly
/// primitive. The denominator is monic on input, so its leading coefficient
/// stays positive.
inline void integer_clear_t(PolyT& num, PolyT& den) {
    Int l = 1;
    for (const Rat& c : num.c) l = lcm(l, c.get_den());
    for (const Rat& c : den.c) l = lcm(l, c.get_den());
    Rat scale{l};
    num = num * scale;
    den = den * scale;
    Int content = 0;
    for (const Rat& c : num.c) content = gcd(content, c.get_num());
    for (const Rat& c : den.c) content = gcd(content, c.get_num());
    if (content > 1) {
        Rat inv = Rat(1) / Rat(content);
        num = num * inv;
        den = den * inv;
    }
}

/// Print an integer-coefficient polynomial in Q[t], terms in descending
/// degree: "2*t^3-4*t+1".
inline std::string print_int_polyt(const PolyT& p) {
    if (p.is_zero_p()) return "0";
    std::string s;
    for (int k = p.deg(); k >= 0; --k) {
        Rat c = p.coeff(k);
        if (ppv::is_zero(c)) continue;
        bool neg = sgn(c) < 0;
        Int a = abs(c.get_num());
        require_internal(c.get_den() == 1, "non-integer coefficient in display form");
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? "-" : "+";
        std::string mag = a.get_str();
        if (k == 0) {
            s += mag;
        } else {
            if (a != 1) s += mag + "*";
            s += (k == 1) ? "t" : "t^" + std::to_string(k);
        }
    }
    return s;
}

/// True when the rendered expression needs parentheses as a numerator
/// (top-level + or - beyond a leading sign).
inline bool has_toplevel_sum(const std::string& s) {
    int depth = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char ch = s[i];
        if (ch == '(') ++depth;
        else if (ch == ')') --depth;
        else if (depth == 0 && i > 0 && (ch == '+' || ch == '-')) return true;
    }
    return false;
}

/// True when the rendered expression needs parentheses as a denominator or as
/// a coefficient factor (any top-level arithmetic besides a power).
inline bool is_compound(const std::string& s) {
    if (has_toplevel_sum(s)) return true;
    int depth = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char ch = s[i];
        if (ch == '(') ++depth;
        else if (ch == ')') --depth;
        else if (depth == 0 && (ch == '*' || ch == '/')) return true;
    }
    return !s.empty() && s[0] == '-';
}

}  // namespace detail

inline std::string render_ratt(const RatT& a) {
    if (a.is_zero_f()) return "0";
    PolyT num = a.num, den = a.den;
    detail::integer_clear_t(num, den);
    std::string ns = detail::print_int_polyt(num);
    if (den.deg() == 0 && den.coeff(0) == 1) return ns;
    std::string ds = detail::print_int_polyt(den);
    if (detail::has_toplevel_sum(ns)) ns = "(" + ns + ")";
    if (detail::is_compound(ds)) ds = "(" + ds + ")";
    return ns + "/" + ds;
}

namespace detail {

/// Print a Q(t)[x] polynomial whose coefficients are integer-coefficient
/// t-polynomials, terms in descending x-degree.
inline std::string print_int_polyx(const PolyX& p) {
    if (p.is_zero_p()) return "0";
    std::string s;
    for (int k = p.deg(); k >= 0; --k) {
        RatT c = p.coeff(k);
        if (ppv::is_zero(c)) continue;
        require_internal(c.den.deg() == 0 && c.den.coeff(0) == 1,
                         "non-polynomial coefficient in display form");
        PolyT ct = c.num;
        if (k == 0) {
            // The t-terms of the constant coefficient sit at top level, so
            // print them with their own signs instead of extracting one.
            std::string cs = print_int_polyt(ct);
            if (s.empty() || cs[0] == '-')
                s += cs;
            else
                s += "+" + cs;
            continue;
        }
        bool neg = sgn(ct.lc()) < 0;
        PolyT mag = neg ? PolyT() - ct : ct;
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? "-" : "+";
        std::string cs = print_int_polyt(mag);
        std::string xs = (k == 1) ? "x" : "x^" + std::to_string(k);
        if (cs == "1") {
            s += xs;
        } else {
            if (has_toplevel_sum(cs)) cs = "(" + cs + ")";
            s += cs + "*" + xs;
        }
    }
    return s;
}

}  // namespace detail

inline std::string render_ratx(const RatX& f) {
    if (f.is_zero_f()) return "0";
    // Clear t-denominators of every coefficient, then rational contents.
    PolyT lt = PolyT::one();
    for (const RatT& c : f.num.c)
        if (!c.is_zero_f()) lt = lcm(lt, c.den);
    for (const RatT& c : f.den.c)
        if (!c.is_zero_f()) lt = lcm(lt, c.den);
    RatT scale{PolyT(lt)};
    PolyX num = f.num * scale;
    PolyX den = f.den * scale;
    Int il = 1;
    auto visit_l = [&](const PolyX& p) {
        for (const RatT& c : p.c)
            for (const Rat& q : c.num.c) il = lcm(il, q.get_den());
    };
    visit_l(num);
    visit_l(den);
    num = num * RatT(Rat(il));
    den = den * RatT(Rat(il));
    Int content = 0;
    auto visit_c = [&](const PolyX& p) {
        for (const RatT& c : p.c)
            for (const Rat& q : c.num.c) content = gcd(content, q.get_num());
    };
    visit_c(num);
    visit_c(den);
    if (content > 1) {
        RatT inv{Rat(1) / Rat(content)};
        num = num * inv;
        den = den * inv;
    }
    // Positive leading denominator.
    RatT dl = den.lc();
    if (sgn(dl.num.lc()) < 0) {
        num = PolyX() - num;
        den = PolyX() - den;
    }
    std::string ns = detail::print_int_polyx(num);
    if (den.deg() == 0) {
        RatT d0 = den.coeff(0);
        if (d0.num.deg() == 0 && d0.num.coeff(0) == 1) return ns;
    }
    std::string ds = detail::print_int_polyx(den);
    if (detail::has_toplevel_sum(ns)) ns = "(" + ns + ")";
    if (detail::is_compound(ds)) ds = "(" + ds + ")";
    return ns + "/" + ds;
}

}  // namespace ppv
