#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "ppv/linalg.hpp"
#include "ppv/ore.hpp"
#include "ppv/tower.hpp"

namespace ppv {

/// All rational solutions of an inhomogeneous linear ODE in d/dx with
/// coefficients in Q(t)(x), as an affine space: one particular solution (free
/// variables zeroed) plus a basis of the homogeneous rational solutions.
struct RationalSolutions {
    bool solvable = false;
    RatX particular;
    std::vector<RatX> kernel;
};

namespace detail {

constexpr int kInfMult = std::numeric_limits<int>::max() / 4;

/// Split the squarefree polynomial P into pieces by the multiplicity of its
/// factors inside B (B = 0 means infinite multiplicity everywhere).
inline std::vector<std::pair<PolyX, int>> split_by_multiplicity(const PolyX& P, const PolyX& B) {
    std::vector<std::pair<PolyX, int>> out;
    if (B.is_zero_p()) {
        out.emplace_back(P, kInfMult);
        return out;
    }
    PolyX cur = P;
    PolyX C = B;
    int k = 0;
    while (cur.deg() > 0) {
        PolyX g = gcd(cur, C);
        if (g.deg() < cur.deg()) {
            PolyX low = exact_div(cur, g.deg() > 0 ? g : PolyX::one());
            out.emplace_back(monic(low), k);
        }
        if (g.deg() == 0) break;
        cur = monic(g);
        C = exact_div(C, g);
        ++k;
    }
    return out;
}

/// Falling factorial evaluated at -z: (-z)(-z-1)...(-z-j+1), as a z-polynomial.
inline Poly<RatT> fall_neg(int j) {
    Poly<RatT> r = Poly<RatT>::one();
    for (int i = 0; i < j; ++i) {
        Poly<RatT> lin;
        lin.c = {RatT(Rat(-i)), RatT(Rat(-1))};
        lin.normalize();
        r = r * lin;
    }
    return r;
}

/// Resultant in x of the squarefree piece against an x-polynomial with
/// z-polynomial coefficients.
inline Poly<RatT> indicial_resultant(const PolyX& piece, const std::vector<Poly<RatT>>& zcoeffs) {
    using ZP = Poly<RatT>;
    Poly<ZP> ax;
    ax.c.resize(piece.deg() + 1);
    for (int i = 0; i <= piece.deg(); ++i) ax.c[i] = ZP(piece.coeff(i));
    ax.normalize();
    Poly<ZP> bx;
    bx.c = zcoeffs;
    bx.normalize();
    if (bx.is_zero_p()) return ZP();
    return resultant(ax, bx);
}

inline long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace detail

/// coeffs are the operator coefficients B_0..B_rho (ascending powers of
/// d/dx); orders above three are rejected. The leading coefficient must be
/// nonzero after trimming.
inline RationalSolutions rational_solutions(std::vector<RatX> coeffs, const RatX& rhs_in) {
    while (!coeffs.empty() && coeffs.back().is_zero_f()) coeffs.pop_back();
    if (coeffs.empty()) fail("domain", "zero operator in rational-solution search");
    const int rho = static_cast<int>(coeffs.size()) - 1;
    if (rho > 3) fail("unsupported", "rational-solution search supports order at most three");

    RationalSolutions out;
    if (rho == 0) {
        out.solvable = true;
        out.particular = rhs_in / coeffs[0];
        return out;
    }

    // Clear all denominators: multiply the equation through by their lcm.
    PolyX common = PolyX::one();
    for (const RatX& c : coeffs)
        if (!c.is_zero_f()) common = lcm(common, c.den);
    if (!rhs_in.is_zero_f()) common = lcm(common, rhs_in.den);
    std::vector<PolyX> B(rho + 1);
    for (int j = 0; j <= rho; ++j) {
        RatX v = coeffs[j] * RatX(common);
        require_internal(v.is_poly(), "denominator clearing failed");
        B[j] = v.num;
    }
    RatX grat = rhs_in * RatX(common);
    require_internal(grat.is_poly(), "denominator clearing failed");
    PolyX G = grat.num;

    // Universal denominator: poles can only sit on the zero set of the
    // leading coefficient. Stratify it by the multiplicity profile across all
    // coefficients and the right-hand side, then bound the pole order on each
    // piece by degree matching and by the integer roots of the indicial
    // equation.
    PolyX E = PolyX::one();
    if (B[rho].deg() > 0) {
        std::vector<std::pair<PolyX, std::vector<int>>> pieces;
        pieces.emplace_back(squarefree_part(B[rho]), std::vector<int>{});
        for (int j = 0; j <= rho + 1; ++j) {
            const PolyX& ref = (j <= rho) ? B[j] : G;
            std::vector<std::pair<PolyX, std::vector<int>>> next;
            for (auto& [piece, prof] : pieces) {
                for (auto& [sub, mult] : detail::split_by_multiplicity(piece, ref)) {
                    auto p2 = prof;
                    p2.push_back(mult);
                    next.emplace_back(sub, std::move(p2));
                }
            }
            pieces = std::move(next);
        }
        for (auto& [piece, prof] : pieces) {
            int sigma_g = prof[rho + 1];
            int kappa = detail::kInfMult;
            for (int j = 0; j <= rho; ++j)
                if (prof[j] < detail::kInfMult) kappa = std::min(kappa, prof[j] - j);
            int T = 0;
            if (sigma_g < detail::kInfMult) T = std::max(T, kappa - sigma_g);
            // Indicial equation on the dominant terms.
            std::vector<Poly<RatT>> zc;  // x-power -> z-polynomial
            for (int j = 0; j <= rho; ++j) {
                if (prof[j] >= detail::kInfMult || prof[j] - j != kappa) continue;
                PolyX lead = B[j];
                Rat factorial = 1;
                for (int sderiv = 0; sderiv < prof[j]; ++sderiv) {
                    lead = derivative(lead);
                    factorial *= sderiv + 1;
                }
                lead = lead * RatT(Rat(1) / factorial);
                Poly<RatT> fj = detail::fall_neg(j);
                if (static_cast<int>(zc.size()) <= lead.deg()) zc.resize(lead.deg() + 1);
                for (int i = 0; i <= lead.deg(); ++i) {
                    for (int w = 0; w <= fj.deg(); ++w) {
                        if (static_cast<int>(zc[i].c.size()) <= w) zc[i].c.resize(w + 1, RatT());
                        zc[i].c[w] = zc[i].c[w] + lead.coeff(i) * fj.coeff(w);
                    }
                }
            }
            for (auto& z : zc) z.normalize();
            Poly<RatT> ind = detail::indicial_resultant(piece, zc);
            if (!ind.is_zero_p() && ind.deg() > 0)
                for (const auto& [root, m] : integer_roots_z(ind))
                    if (root >= 1 && root > T) T = static_cast<int>(root.get_si());
            if (T > 0) E = E * pow(piece, T);
        }
    }

    // Substitute Y = Z/E and clear: Btil_i = sum_j C(j,i) B_j E^{rho+1} (1/E)^(j-i).
    std::vector<RatX> invE_derivs(rho + 1);
    invE_derivs[0] = RatX(PolyX::one()) / RatX(E);
    for (int k = 1; k <= rho; ++k) invE_derivs[k] = deriv_x(invE_derivs[k - 1]);
    RatX Epow = powx(RatX(E), rho + 1);
    std::vector<PolyX> Bt(rho + 1);
    for (int i = 0; i <= rho; ++i) {
        RatX acc;
        for (int j = i; j <= rho; ++j)
            acc = acc + ratx(detail::binom(j, i)) * RatX(B[j]) * invE_derivs[j - i];
        RatX v = acc * Epow;
        require_internal(v.is_poly(), "universal denominator substitution failed");
        Bt[i] = v.num;
    }
    RatX gt = RatX(G) * Epow;
    require_internal(gt.is_poly(), "universal denominator substitution failed");
    PolyX Gt = gt.num;

    // Degree bound for the polynomial unknown Z.
    int delta = std::numeric_limits<int>::min();
    for (int i = 0; i <= rho; ++i)
        if (!Bt[i].is_zero_p()) delta = std::max(delta, Bt[i].deg() - i);
    require_internal(delta > std::numeric_limits<int>::min(), "vanishing transformed operator");
    int sbound = -1;
    if (!Gt.is_zero_p()) sbound = std::max(sbound, Gt.deg() - delta);
    Poly<RatT> phi;
    for (int i = 0; i <= rho; ++i) {
        if (Bt[i].is_zero_p() || Bt[i].deg() - i != delta) continue;
        Poly<RatT> fi = falling_factorial<RatT>(i);
        phi = phi + Poly<RatT>(Bt[i].lc()) * fi;
    }
    if (!phi.is_zero_p() && phi.deg() > 0)
        for (const auto& [root, m] : integer_roots_z(phi))
            if (root >= 0 && root > sbound) sbound = static_cast<int>(root.get_si());

    // Exact affine solve on the coefficients of Z.
    if (sbound < 0) {
        if (Gt.is_zero_p()) {
            out.solvable = true;
            out.particular = RatX();
        }
        return out;
    }
    std::vector<PolyX> cols(sbound + 1);
    int maxdeg = Gt.deg();
    for (int w = 0; w <= sbound; ++w) {
        PolyX acc;
        PolyX xw = shift_up(PolyX::one(), w);
        for (int i = 0; i <= rho; ++i) {
            acc = acc + Bt[i] * xw;
            xw = derivative(xw);
        }
        cols[w] = acc;
        maxdeg = std::max(maxdeg, acc.deg());
    }
    MatT A;
    VecT rhs;
    for (int r = 0; r <= maxdeg; ++r) {
        VecT row(sbound + 1, RatT());
        for (int w = 0; w <= sbound; ++w) row[w] = cols[w].coeff(r);
        A.push_back(std::move(row));
        rhs.push_back(Gt.coeff(r));
    }
    auto assemble = [&](const VecT& z) {
        PolyX zp;
        zp.c.assign(z.begin(), z.end());
        zp.normalize();
        return RatX(zp, E);
    };
    auto part = solve(A, rhs);
    if (part) {
        out.solvable = true;
        out.particular = assemble(*part);
        require_internal(apply_x(coeffs, out.particular) - rhs_in == RatX(),
                         "rational solution failed to verify");
    }
    for (const VecT& v : nullspace(A, sbound + 1)) {
        RatX y = assemble(v);
        require_internal(apply_x(coeffs, y) == RatX(), "kernel solution failed to verify");
        out.kernel.push_back(std::move(y));
    }
    return out;
}

}  // namespace ppv
