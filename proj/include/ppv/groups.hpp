#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppv/intersect.hpp"
#include "ppv/odesolve.hpp"
#include "ppv/telescope.hpp"

namespace ppv {

// --- Group descriptors ------------------------------------------------------
//
// Multiplicative subgroups of the constants are either the n-th roots of
// unity Mu(n) or the kernel Gm(K0;L) of L applied to logarithmic derivatives,
// written LogDeriv(L). Additive subgroups are kernels Ga(K0;L) of L itself,
// written Proper(L); Proper(1) is the trivial group and Proper(0) the full
// additive group.

struct MultGroupDesc {
    enum Kind { Mu, LogDeriv } kind = LogDeriv;
    int n = 1;            // order, for Mu
    OpT L = OpT::one();   // operator, for LogDeriv

    static MultGroupDesc mu(int order) { return {Mu, order, OpT::one()}; }
    static MultGroupDesc logderiv(OpT l) { return {LogDeriv, 1, std::move(l)}; }

    bool operator==(const MultGroupDesc& o) const {
        if (kind != o.kind) return false;
        return kind == Mu ? n == o.n : L == o.L;
    }
    bool operator!=(const MultGroupDesc& o) const { return !(*this == o); }
};

struct AddGroupDesc {
    OpT L = OpT::one();

    static AddGroupDesc proper(OpT l) { return {std::move(l)}; }
    bool operator==(const AddGroupDesc& o) const { return L == o.L; }
    bool operator!=(const AddGroupDesc& o) const { return !(*this == o); }
};

struct GroupDesc {
    enum Kind { UT, DihedralInf, SL2Full, SL2ConstConj, Classical } kind = SL2Full;
    MultGroupDesc A;            // UT and DihedralInf
    AddGroupDesc B;             // UT
    std::string classical_label;  // Classical (used as recovery input)

    static GroupDesc ut(MultGroupDesc a, AddGroupDesc b) {
        GroupDesc g;
        g.kind = UT;
        g.A = std::move(a);
        g.B = std::move(b);
        return g;
    }
    static GroupDesc dihedral(MultGroupDesc a) {
        GroupDesc g;
        g.kind = DihedralInf;
        g.A = std::move(a);
        return g;
    }
    static GroupDesc sl2_full() { return GroupDesc{}; }
    static GroupDesc sl2_const_conj() {
        GroupDesc g;
        g.kind = SL2ConstConj;
        return g;
    }
    static GroupDesc classical(std::string label) {
        GroupDesc g;
        g.kind = Classical;
        g.classical_label = std::move(label);
        return g;
    }
};

/// The common parameterized quotient Lambda in the recovered exact sequence.
struct LambdaDesc {
    enum Kind { Trivial, MuL, Multiplicative, Additive } kind = Trivial;
    int l = 1;            // MuL
    OpT L = OpT::one();   // Multiplicative: Gm(K0;L); Additive: Ga(K0;L)
};

struct HomDesc {
    enum Kind { Trivial, Power, OpOnAdditive, OpOnLogDeriv, Component } kind = Trivial;
    long m = 0;           // Power
    OpT L = OpT::one();   // OpOnAdditive / OpOnLogDeriv
    int order = 1;        // Component
};

// --- Logarithmic derivatives ------------------------------------------------

/// Nonzero g with (d/dx g)/g = c, when one exists. A rational function is a
/// logarithmic derivative exactly when it is proper with squarefree
/// denominator and all its residues are integers.
inline std::optional<RatX> logderiv_solve(const RatX& c) {
    if (c.is_zero_f()) return RatX(ratt(1));
    ProperSplit ps = proper_split(c);
    if (!ps.poly.is_zero_p()) return std::nullopt;
    const PolyX& D = c.den;
    if (gcd(D, derivative(D)).deg() > 0) return std::nullopt;
    QRoots res = rational_roots_z(residue_resultant(c));
    if (!res.fully_split) return std::nullopt;
    for (const auto& [r, m] : res.roots)
        if (r.get_den() != 1) return std::nullopt;
    RatX g = RatX(ratt(1));
    PolyX prod = PolyX::one();
    PolyX dp = derivative(D);
    for (const auto& [r, m] : res.roots) {
        PolyX s = gcd_x(D, c.num - dp * RatT(r));
        require_internal(s.deg() > 0, "residue factor extraction failed");
        prod = prod * s;
        g = g * powx(RatX(s), r.get_num().get_si());
    }
    require_internal(prod == D, "residue factors do not exhaust the denominator");
    require_internal(deriv_x(g) / g == c, "logarithmic derivative witness failed to verify");
    return g;
}

/// Minimal n >= 1 with n*u a logarithmic derivative. The test is definitive:
/// non-rational residues, a nonzero polynomial part, or higher-order poles
/// rule every n out. Only the case of a finite answer above nmax is reported
/// as unresolved.
struct LogDerivTest {
    enum Status { Found, DefinitelyNot, NotUpToBound } status = DefinitelyNot;
    int n = 0;
    RatX g;
};

inline LogDerivTest log_derivative_test(const RatX& u, int nmax) {
    LogDerivTest out;
    if (u.is_zero_f()) {
        out.status = LogDerivTest::Found;
        out.n = 1;
        out.g = RatX(ratt(1));
        return out;
    }
    ProperSplit ps = proper_split(u);
    if (!ps.poly.is_zero_p()) return out;
    if (gcd(u.den, derivative(u.den)).deg() > 0) return out;
    QRoots res = rational_roots_z(residue_resultant(u));
    if (!res.fully_split) return out;
    Int l = 1;
    for (const auto& [r, m] : res.roots) l = lcm(l, r.get_den());
    if (l > nmax) {
        out.status = LogDerivTest::NotUpToBound;
        return out;
    }
    int n = static_cast<int>(l.get_si());
    auto g = logderiv_solve(RatX(ratt(n)) * u);
    require_internal(g.has_value(), "scaled input is not a logarithmic derivative");
    out.status = LogDerivTest::Found;
    out.n = n;
    out.g = *g;
    return out;
}

// --- Second-order preprocessing ---------------------------------------------

/// Normal-form potential of the general second-order operator
/// Dx^2 + r1 Dx + r2: substituting y = exp(-1/2 int r1) z reduces it to
/// Dx^2 - r.
inline RatX change_of_variables(const RatX& r1, const RatX& r2) {
    return ratx(1, 4) * r1 * r1 + ratx(1, 2) * deriv_x(r1) - r2;
}

/// Criterion separating the two unimodular cases: the group is conjugate to
/// SL2 over the constants iff Dx^3 Y - 4 r Dx Y - 2 (Dx r) Y = -2 dr/dt has a
/// rational solution.
struct DreyfusResult {
    bool constant_conjugate = false;
    RatX Y;
};

inline DreyfusResult dreyfus_test(const RatX& r) {
    std::vector<RatX> coeffs = {ratx(-2) * deriv_x(r), ratx(-4) * r, RatX(), ratx(1)};
    RationalSolutions sols = rational_solutions(coeffs, ratx(-2) * deriv_t(r));
    DreyfusResult out;
    out.constant_conjugate = sols.solvable;
    if (sols.solvable) out.Y = sols.particular;
    return out;
}

/// Witness h with Dx h - 2u h = 1, if any: then the second classical solution
/// lies in the Picard-Vessiot field of the first (y2/y1 has derivative
/// y1^{-2} = (h y1^{-2})' up to constants), so the classical group is diagonal
/// rather than full triangular.
inline std::optional<RatX> classical_B_trivial(const RatX& u) {
    RationalSolutions sols = rational_solutions({ratx(-2) * u, ratx(1)}, ratx(1));
    if (!sols.solvable) return std::nullopt;
    return sols.particular;
}

// --- Upper-triangular case --------------------------------------------------

/// Parameterized group of Dx^2 - r when a rational Riccati solution u
/// (Dx u + u^2 = r) certifies the triangular shape. The result is
/// UT(A, B) = { [a, b; 0, 1/a] : a in A, b in B }.
struct UTResult {
    MultGroupDesc A;
    AddGroupDesc B;
    RatX u, r;
    // Certificates for the route taken:
    std::optional<std::pair<int, RatX>> cyclic;  // (n, g): n·u = g'/g
    std::optional<RationalCert> a_cert;          // telescoper for dt u
    std::optional<RatX> v;                       // d/dx v = dt u (finite-A path)
    std::optional<RatX> b_classical_witness;     // h: Dx h - 2u h = 1
    std::optional<RationalCert> b_rational;      // telescoper for y1^{-2} in K
    std::optional<ExponentialCert> b_exponential;
};

inline UTResult upper_triangular_group(const RatX& u, const RatX& r, const Options& opts = {}) {
    if (!(deriv_x(u) + u * u - r == RatX()))
        fail("domain", "u is not a Riccati solution");
    UTResult out;
    out.u = u;
    out.r = r;

    LogDerivTest ld = log_derivative_test(u, opts.nmax);
    if (ld.status == LogDerivTest::NotUpToBound)
        fail("unsupported", "cyclic order of the diagonal part exceeds nmax");
    bool finite_a = (ld.status == LogDerivTest::Found);

    RationalCert ac = primitive_of_rational(deriv_t(u), opts);
    out.a_cert = ac;
    if (finite_a) {
        out.cyclic = std::make_pair(ld.n, ld.g);
        out.A = MultGroupDesc::mu(ld.n);
        require_internal(ac.L.is_one_op(), "finite diagonal part with nontrivial telescoper");
    } else {
        out.A = MultGroupDesc::logderiv(ac.L);
        if (!ac.L.is_one_op()) {
            // The connected diagonal part already separates the two classical
            // solutions; B is trivial iff the classical group is diagonal.
            auto h = classical_B_trivial(u);
            if (h) {
                out.b_classical_witness = h;
                out.B = AddGroupDesc::proper(OpT::one());
            } else {
                out.B = AddGroupDesc::proper(OpT::zero());
            }
            return out;
        }
    }

    // Here the diagonal group is finite or constant, so the off-diagonal part
    // carries the whole parameterized structure. v is an antiderivative
    // certificate for dt u.
    out.v = ac.f;
    if (finite_a && ld.n <= 2) {
        // y1^2 is rational: its inverse square is y1^{-2} = 1/g2.
        RatX g2 = (ld.n == 1) ? ld.g * ld.g : ld.g;
        RationalCert bc = primitive_of_rational(RatX(ratt(1)) / g2, opts);
        out.b_rational = bc;
        out.B = AddGroupDesc::proper(bc.L);
    } else {
        ExponentialCert bc =
            primitive_of_exponential(ratx(-2) * u, ratx(-2) * (*out.v), opts);
        out.b_exponential = bc;
        out.B = AddGroupDesc::proper(bc.L);
    }
    return out;
}

// --- Infinite dihedral case -------------------------------------------------

/// Parameterized group of Dx^2 - r when the classical group is dihedral,
/// certified by the trace phi = u + u^sigma of the quadratic Riccati
/// solutions. The discriminant w with K(u) = K(sqrt(w)) must satisfy
/// Dx w = 2 phi w together with the defining relation of the minimal
/// polynomial; the two sign conventions for the discriminant are tried in
/// order (+ first).
struct DihedralResult {
    MultGroupDesc A;
    RatX r, phi, w;
    char sign = '-';
    std::optional<ExponentialCert> a_cert;  // telescoper for dt sqrt(w) / sqrt(w)
};

inline DihedralResult dihedral_group(const RatX& r, const RatX& phi, const Options& opts = {}) {
    DihedralResult out;
    out.r = r;
    out.phi = phi;
    RatX half_dphi = ratx(1, 2) * deriv_x(phi);
    RatX base = ratx(1, 4) * phi * phi - r;
    auto valid = [&](const RatX& w) {
        if (w.is_zero_f()) return false;
        RatX rel = RatX() - half_dphi + base + ratx(1, 4) * w;
        if (!(rel == RatX())) return false;
        return deriv_x(w) - ratx(2) * phi * w == RatX();
    };
    RatX wplus = ratx(4) * r - ratx(2) * deriv_x(phi) - phi * phi;
    RatX wminus = ratx(4) * r + ratx(2) * deriv_x(phi) - phi * phi;
    if (valid(wplus)) {
        out.w = wplus;
        out.sign = '+';
    } else if (valid(wminus)) {
        out.w = wminus;
        out.sign = '-';
    } else {
        fail("domain", "φ inconsistent with r");
    }

    RatX dtw = deriv_t(out.w);
    if (dtw.is_zero_f()) {
        out.A = MultGroupDesc::logderiv(OpT::one());
        return out;
    }
    // sqrt(w) has dt sqrt(w)/sqrt(w) = dt w / (2 w); the group of the
    // hyperexponential element eta = dt(sqrt w) is computed from its two
    // logarithmic derivatives.
    RatX p = deriv_x(dtw) / dtw - deriv_x(out.w) / (ratx(2) * out.w);
    RatX q = deriv_t(dtw) / dtw - dtw / (ratx(2) * out.w);
    ExponentialCert ec = primitive_of_exponential(p, q, opts);
    out.a_cert = ec;
    out.A = MultGroupDesc::logderiv(ec.L);
    return out;
}

// --- Integer relations and radicals ----------------------------------------

/// Smallest m1 >= 1 (up to mmax) such that m1*u - (m2/2)*r1 is a logarithmic
/// derivative for some integer m2, with the witness f. Candidates for m2 come
/// from structural pins plus a bounded scan; every candidate is verified
/// exactly, so a returned triple is always correct.
struct IntegerRelation {
    long m1 = 0, m2 = 0;
    RatX f;
};

inline std::optional<IntegerRelation> integer_relation(const RatX& u, const RatX& r1, int mmax) {
    PolyX ppu = proper_split(u).poly;
    PolyX ppr = proper_split(r1).poly;
    for (long m1 = 1; m1 <= mmax; ++m1) {
        std::vector<long> cands;
        // A logarithmic derivative has no polynomial part, so the polynomial
        // parts of the combination must cancel; that pins m2 when either one
        // is nonzero.
        if (ppr.is_zero_p() && !ppu.is_zero_p()) continue;
        if (!ppr.is_zero_p()) {
            RatX ratio = (ratx(2 * m1) * RatX(ppu)) / RatX(ppr);
            if (!is_constant_x(ratio)) continue;
            RatT lam = as_ratt(ratio);
            if (lam.den.deg() != 0 || lam.num.deg() > 0) continue;
            Rat v = lam.num.coeff(0);
            if (v.get_den() != 1) continue;
            cands.push_back(v.get_num().get_si());
        } else {
            cands.push_back(0);
            if (!r1.is_zero_f()) {
                RatX ratio = u / r1;
                if (is_constant_x(ratio)) {
                    RatT lam = as_ratt(ratio);
                    if (lam.den.deg() == 0 && lam.num.deg() <= 0) {
                        Rat v = lam.num.coeff(0) * 2 * m1;
                        if (v.get_den() == 1) cands.push_back(v.get_num().get_si());
                    }
                }
                for (long s = 1; s <= 16; ++s) {
                    cands.push_back(s);
                    cands.push_back(-s);
                }
            }
        }
        std::sort(cands.begin(), cands.end(), [](long a, long b) {
            long aa = a < 0 ? -a : a, ab = b < 0 ? -b : b;
            if (aa != ab) return aa < ab;
            return a > b;  // positive before negative
        });
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        for (long m2 : cands) {
            RatX comb = ratx(m1) * u - ratx(m2, 2) * r1;
            auto f = logderiv_solve(comb);
            if (f) return IntegerRelation{m1, m2, *f};
        }
    }
    return std::nullopt;
}

namespace detail {

/// h with h^l = c*g for a constant c in Q(t), when the x-factor multiplicities
/// of g all vanish mod l. Constants are absorbed because the ground constants
/// are algebraically closed.
inline std::optional<RatX> lth_power_core(const RatX& g, int l) {
    require_internal(!g.is_zero_f() && l >= 2, "radical test needs nonzero input and l >= 2");
    RatX h = RatX(ratt(1));
    for (int side = 0; side < 2; ++side) {
        const PolyX& p = side == 0 ? g.num : g.den;
        if (p.deg() == 0) continue;
        for (const auto& [fac, mult] : squarefree_decomposition(p)) {
            if (mult % l != 0) return std::nullopt;
            int e = (mult / l) * (side == 0 ? 1 : -1);
            h = h * powx(RatX(fac), e);
        }
    }
    RatX c = g / powx(h, l);
    require_internal(is_constant_x(c), "radical cofactor is not constant");
    return h;
}

}  // namespace detail

/// Public radical test for square and cube subfields.
inline std::optional<RatX> lth_power_test(const RatX& g, int l) {
    if (l != 2 && l != 3) fail("domain", "radical test is exposed for l = 2 and l = 3 only");
    if (g.is_zero_f()) fail("domain", "radical test of the zero function");
    return detail::lth_power_core(g, l);
}

/// Kummer test: the degree-l cyclic extensions K(gammaD^{1/l}) and
/// K(gammaE^{1/l}) coincide iff gammaD * gammaE^{-j} is an l-th power (up to
/// constants) for some j coprime to l.
inline std::optional<int> kummer_match(const RatX& gammaD, const RatX& gammaE, int l) {
    for (int j = 1; j < l; ++j) {
        if (std::gcd(j, l) != 1) continue;
        if (detail::lth_power_core(gammaD * powx(gammaE, -j), l)) return j;
    }
    return std::nullopt;
}

// --- Finite common quotients ------------------------------------------------

/// Classifying label for the classical projective image used by the finite
/// quotient table.
enum class ClassicalLabel { Connected, A5, Dihedral, S4, A4, CyclicUT };

struct FiniteLambda {
    int l = 1;                  // order of the common quotient Mu(l)
    std::optional<int> j;       // Kummer exponent matching the two subfields
    long d_exponent = 0;        // power map on the first factor (n/l or 0)
    long e_exponent = 0;        // power map on the second factor (m/l)
};

/// Largest common cyclic quotient of the two groups in the finite case:
/// the first group is described by its classical label (and cyclic order n
/// when its diagonal is Mu(n)), the second is Mu(m) generated by a radical
/// with witness gammaE. gammaD generates the distinguished subfield on the
/// first side (the discriminant, or the radical of the diagonal).
inline FiniteLambda finite_lambda(ClassicalLabel label, int m, int n,
                                  const std::optional<RatX>& gammaD, const RatX& gammaE) {
    FiniteLambda out;
    auto try_l = [&](int l) {
        if (l < 2 || m % l != 0 || !gammaD) return false;
        auto j = kummer_match(*gammaD, gammaE, l);
        if (!j) return false;
        out.l = l;
        out.j = j;
        out.e_exponent = m / l;
        return true;
    };
    switch (label) {
        case ClassicalLabel::Connected:
        case ClassicalLabel::A5:
            break;  // no finite cyclic quotient in common
        case ClassicalLabel::Dihedral:
        case ClassicalLabel::S4:
            try_l(2);
            break;
        case ClassicalLabel::A4:
            try_l(3);
            break;
        case ClassicalLabel::CyclicUT: {
            int g = std::gcd(m, n);
            for (int l = g; l >= 2; --l) {
                if (g % l != 0) continue;
                if (try_l(l)) {
                    out.d_exponent = n / l;
                    break;
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace ppv
