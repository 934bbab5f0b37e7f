#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppv/groups.hpp"

namespace ppv {

inline const char* classical_label_name(ClassicalLabel l) {
    switch (l) {
        case ClassicalLabel::Connected: return "connected";
        case ClassicalLabel::A5: return "A5";
        case ClassicalLabel::Dihedral: return "dihedral";
        case ClassicalLabel::S4: return "S4";
        case ClassicalLabel::A4: return "A4";
        case ClassicalLabel::CyclicUT: return "cyclic";
    }
    return "connected";
}

inline std::optional<ClassicalLabel> classical_label_from(const std::string& s) {
    if (s == "connected") return ClassicalLabel::Connected;
    if (s == "A5") return ClassicalLabel::A5;
    if (s == "dihedral") return ClassicalLabel::Dihedral;
    if (s == "S4") return ClassicalLabel::S4;
    if (s == "A4") return ClassicalLabel::A4;
    if (s == "cyclic") return ClassicalLabel::CyclicUT;
    return std::nullopt;
}

/// Generator of a distinguished cyclic subfield on the classical side:
/// K(gamma^{1/l}) is the fixed field of the kernel of the order-l quotient.
struct SubfieldWitness {
    int l = 2;
    RatX gamma;
};

/// How the projective (classical) group of the normalized operator is
/// certified: a rational Riccati solution (triangular case), the trace of the
/// two conjugate Riccati solutions (dihedral case), a finite label with its
/// subfield witnesses, or nothing beyond irreducibility (SL2 cases, settled
/// by the cubic-resolvent criterion).
struct RiccatiData {
    enum Kind { U, Phi, Sl2, Finite } kind = Sl2;
    RatX value;  // u for U, phi for Phi
    ClassicalLabel label = ClassicalLabel::Connected;  // Finite
    int cyclic_n = 0;                                  // Finite, cyclic label
    std::vector<SubfieldWitness> witnesses;            // Finite
};

/// The group of the original operator Dx^2 + r1 Dx + r2 is the fiber product
/// of D (group of the normalized operator Dx^2 - r) and E (group of the
/// exponential factor with logarithmic derivative -r1/2) over their largest
/// common quotient Lambda, twisted by nu (the power of the exponential factor
/// that D and E share).
struct RecoverResult {
    RatX r1, r2, r;
    GroupDesc D;
    MultGroupDesc E;
    LambdaDesc lambda;
    HomDesc phi;  // D -> Lambda
    HomDesc psi;  // E -> Lambda
    int nu = 2;

    // Certificates for the routes taken.
    std::optional<UTResult> ut;
    std::optional<DihedralResult> dihedral;
    std::optional<DreyfusResult> dreyfus;
    std::optional<RatX> gammaD;                    // distinguished subfield generator of D
    std::optional<std::pair<int, RatX>> e_cyclic;  // (m, gammaE)
    std::optional<RationalCert> e_cert;            // infinite-E telescoper
    std::optional<IntegerRelation> relation;
    std::optional<IntersectionResult> common;
    std::optional<FiniteLambda> finite;
};

namespace detail {

/// Map the two intersection factor operators back to the caller's sides.
struct SidedFactors {
    OpT first, second, common;
};

inline SidedFactors sided(const IntersectionResult& ir) {
    SidedFactors s;
    s.common = ir.Lpp;
    if (ir.swapped) {
        s.first = ir.L2p;
        s.second = ir.L1p;
    } else {
        s.first = ir.L1p;
        s.second = ir.L2p;
    }
    return s;
}

}  // namespace detail

inline RecoverResult recover_original(const RatX& r1, const RatX& r2, const RiccatiData& data,
                                      const Options& opts = {}) {
    RecoverResult out;
    out.r1 = r1;
    out.r2 = r2;
    out.r = change_of_variables(r1, r2);

    // The group D of the normalized operator, by the certified route.
    ClassicalLabel label = ClassicalLabel::Connected;
    int cyclic_n = 0;
    std::optional<RatX> gammaD;
    switch (data.kind) {
        case RiccatiData::U: {
            out.ut = upper_triangular_group(data.value, out.r, opts);
            out.D = GroupDesc::ut(out.ut->A, out.ut->B);
            if (out.ut->A.kind == MultGroupDesc::Mu) {
                label = ClassicalLabel::CyclicUT;
                cyclic_n = out.ut->A.n;
                gammaD = out.ut->cyclic->second;
            }
            break;
        }
        case RiccatiData::Phi: {
            out.dihedral = dihedral_group(out.r, data.value, opts);
            out.D = GroupDesc::dihedral(out.dihedral->A);
            label = ClassicalLabel::Dihedral;
            gammaD = out.dihedral->w;
            break;
        }
        case RiccatiData::Sl2: {
            out.dreyfus = dreyfus_test(out.r);
            out.D = out.dreyfus->constant_conjugate ? GroupDesc::sl2_const_conj()
                                                    : GroupDesc::sl2_full();
            break;
        }
        case RiccatiData::Finite: {
            out.D = GroupDesc::classical(classical_label_name(data.label));
            label = data.label;
            cyclic_n = data.cyclic_n;
            int want = 0;
            if (label == ClassicalLabel::Dihedral || label == ClassicalLabel::S4) want = 2;
            if (label == ClassicalLabel::A4) want = 3;
            for (const SubfieldWitness& w : data.witnesses)
                if (want == 0 || w.l == want) {
                    gammaD = w.gamma;
                    break;
                }
            break;
        }
    }

    out.gammaD = gammaD;

    // The group E of the exponential factor exp(-1/2 int r1).
    RatX e_ld = ratx(-1, 2) * r1;
    LogDerivTest et = log_derivative_test(e_ld, opts.nmax);
    if (et.status == LogDerivTest::NotUpToBound)
        fail("unsupported", "cyclic order of the exponential factor exceeds nmax");
    bool e_finite = (et.status == LogDerivTest::Found);
    if (e_finite) {
        out.E = MultGroupDesc::mu(et.n);
        out.e_cyclic = std::make_pair(et.n, et.g);
        out.nu = (et.n % 2 == 1) ? 1 : 2;
    } else {
        RationalCert ec = primitive_of_rational(deriv_t(e_ld), opts);
        out.e_cert = ec;
        out.E = MultGroupDesc::logderiv(ec.L);
        out.nu = 2;
    }

    // Largest common quotient Lambda with the maps from both sides.
    if (e_finite) {
        FiniteLambda fl = finite_lambda(label, et.n, cyclic_n, gammaD, et.g);
        out.finite = fl;
        if (fl.l > 1) {
            out.lambda.kind = LambdaDesc::MuL;
            out.lambda.l = fl.l;
            if (label == ClassicalLabel::CyclicUT) {
                out.phi.kind = HomDesc::Power;
                out.phi.m = fl.d_exponent;
            } else {
                out.phi.kind = HomDesc::Component;
                out.phi.order = fl.l;
            }
            out.psi.kind = HomDesc::Power;
            out.psi.m = fl.e_exponent;
        }
        return out;
    }

    // E is infinite (and divisible), so only a UT-shaped D can share a
    // nontrivial quotient with it.
    if (out.D.kind != GroupDesc::UT) return out;
    const UTResult& ut = *out.ut;
    if (ut.A.kind == MultGroupDesc::Mu && ut.A.n <= 2) {
        // y1^2 is rational, so the off-diagonal coordinate y2/y1 has rational
        // integrand 1/g2; its additive structure is compared with the
        // logarithmic coordinate of E by intersecting the two telescopers.
        RatX g2 = (ut.A.n == 1) ? ut.cyclic->second * ut.cyclic->second : ut.cyclic->second;
        IntersectionResult ir =
            intersect_primitives(RatX(ratt(1)) / g2, deriv_t(e_ld), opts);
        out.common = ir;
        detail::SidedFactors sf = detail::sided(ir);
        if (!sf.common.is_one_op()) {
            out.lambda.kind = LambdaDesc::Additive;
            out.lambda.L = sf.common;
            out.phi.kind = HomDesc::OpOnAdditive;
            out.phi.L = sf.first;
            out.psi.kind = HomDesc::OpOnLogDeriv;
            out.psi.L = sf.second;
        }
        return out;
    }
    if (ut.A.kind == MultGroupDesc::Mu) return out;  // Mu(n), n >= 3: nothing shared

    // A is infinite multiplicative. A power relation between y1 and the
    // exponential factor makes Lambda the whole group Gm(K0; L_A); otherwise
    // the shared structure lives on the logarithmic coordinates.
    auto rel = integer_relation(data.value, r1, opts.mmax);
    if (rel) {
        out.relation = rel;
        require_internal(ut.a_cert && ut.a_cert->L == out.e_cert->L,
                         "power-related diagonal and exponential groups with distinct operators");
        out.lambda.kind = LambdaDesc::Multiplicative;
        out.lambda.L = ut.a_cert->L;
        out.phi.kind = HomDesc::Power;
        out.phi.m = rel->m1;
        out.psi.kind = HomDesc::Power;
        out.psi.m = rel->m2;
        return out;
    }
    IntersectionResult ir =
        intersect_primitives(deriv_t(data.value), deriv_t(e_ld), opts);
    out.common = ir;
    detail::SidedFactors sf = detail::sided(ir);
    if (!sf.common.is_one_op()) {
        out.lambda.kind = LambdaDesc::Additive;
        out.lambda.L = sf.common;
        out.phi.kind = HomDesc::OpOnLogDeriv;
        out.phi.L = sf.first;
        out.psi.kind = HomDesc::OpOnLogDeriv;
        out.psi.L = sf.second;
    }
    return out;
}

}  // namespace ppv
