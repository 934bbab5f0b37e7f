#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "ppv/tower.hpp"

namespace ppv {

/// Dense matrices over Q(t), row-major. All elimination is deterministic:
/// columns are scanned left to right and the first nonzero entry at or below
/// the working row becomes the pivot, so identical inputs give identical
/// reduced forms, kernels, and chosen solutions.
using MatT = std::vector<std::vector<RatT>>;
using VecT = std::vector<RatT>;

struct Rref {
    MatT m;
    std::vector<int> pivot_cols;  // one per pivot row, ascending
    int rank = 0;
};

inline Rref rref(MatT m) {
    Rref out;
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m[0].size()) : 0;
    for (const auto& r : m) require_internal(static_cast<int>(r.size()) == cols, "ragged matrix");
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pr = -1;
        for (int i = row; i < rows; ++i)
            if (!m[i][col].is_zero_f()) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(m[row], m[pr]);
        RatT inv = RatT(Rat(1)) / m[row][col];
        for (int j = col; j < cols; ++j) m[row][j] = inv * m[row][j];
        for (int i = 0; i < rows; ++i) {
            if (i == row || m[i][col].is_zero_f()) continue;
            RatT f = m[i][col];
            for (int j = col; j < cols; ++j) m[i][j] = m[i][j] - f * m[row][j];
        }
        out.pivot_cols.push_back(col);
        ++row;
    }
    out.rank = row;
    out.m = std::move(m);
    return out;
}

inline int rank(const MatT& m) { return rref(m).rank; }

/// Basis of the right kernel of m (with the given column count, so empty
/// matrices are allowed). Free variables are set to 1 one at a time, in
/// ascending column order.
inline std::vector<VecT> nullspace(const MatT& m, int cols) {
    Rref r = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (int p : r.pivot_cols)
        if (p < cols) is_pivot[p] = true;
    std::vector<VecT> basis;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        VecT v(cols, RatT());
        v[f] = RatT(Rat(1));
        for (size_t pr = 0; pr < r.pivot_cols.size(); ++pr)
            v[r.pivot_cols[pr]] = RatT() - r.m[pr][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

namespace detail {

/// Augmented rows scaled to integer-coefficient polynomials in t (row scaling
/// leaves solution sets and consistency untouched).
struct ClearedRows {
    std::vector<std::vector<PolyT>> rows;  // each of length cols + 1
    std::vector<int> rowdeg;
};

inline ClearedRows clear_solve_rows(const MatT& a, const VecT& b) {
    ClearedRows out;
    const int rows = static_cast<int>(a.size());
    out.rows.reserve(rows);
    out.rowdeg.reserve(rows);
    for (int i = 0; i < rows; ++i) {
        PolyT l = PolyT::one();
        for (const RatT& e : a[i])
            if (!e.is_zero_f()) l = lcm(l, e.den);
        if (!b[i].is_zero_f()) l = lcm(l, b[i].den);
        std::vector<PolyT> row;
        row.reserve(a[i].size() + 1);
        for (const RatT& e : a[i]) row.push_back(e.num * exact_div(l, e.den));
        row.push_back(b[i].num * exact_div(l, b[i].den));
        // rational coefficients -> primitive integers
        Int den(1), num(0);
        for (const PolyT& p : row)
            for (const Rat& c : p.c) {
                den = lcm(den, Int(c.get_den()));
                num = gcd(num, Int(c.get_num()));
            }
        if (sgn(num) != 0) {
            Rat scale = Rat(den) / Rat(num);
            if (scale != 1)
                for (PolyT& p : row) p = p * scale;
        }
        int d = 0;
        for (const PolyT& p : row) d = std::max(d, p.deg());
        out.rowdeg.push_back(d);
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline Int eval_at_int(const PolyT& p, const Int& tau) {
    Int r(0);
    for (int i = p.deg(); i >= 0; --i) {
        r *= tau;
        r += Int(p.coeff(i).get_num());
    }
    return r;
}

/// Pivot structure of a rational matrix: first-nonzero column scan, original
/// row indices preserved through the swaps.
struct QElim {
    std::vector<int> pivot_cols;
    std::vector<int> pivot_rows;
};

inline QElim q_structure(std::vector<std::vector<Rat>> m) {
    QElim out;
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m[0].size()) : 0;
    std::vector<int> orig(rows);
    for (int i = 0; i < rows; ++i) orig[i] = i;
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pr = -1;
        for (int i = row; i < rows; ++i)
            if (sgn(m[i][col]) != 0) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(m[row], m[pr]);
        std::swap(orig[row], orig[pr]);
        for (int i = row + 1; i < rows; ++i) {
            if (sgn(m[i][col]) == 0) continue;
            Rat f = m[i][col] / m[row][col];
            for (int j = col; j < cols; ++j) m[i][j] -= f * m[row][j];
        }
        out.pivot_cols.push_back(col);
        out.pivot_rows.push_back(orig[row]);
        ++row;
    }
    return out;
}

// --- Word-sized polynomial arithmetic mod p (31-bit primes) ----------------

using ModPoly = std::vector<std::uint64_t>;  // ascending coefficients, trimmed

inline void mp_trim(ModPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint64_t mp_eval(const ModPoly& a, std::uint64_t x, std::uint64_t p) {
    std::uint64_t r = 0;
    for (size_t i = a.size(); i-- > 0;) r = (r * x + a[i]) % p;
    return r;
}

/// Inverses of 1..n mod p by the standard recurrence.
inline std::vector<std::uint64_t> mp_inverse_table(long n, std::uint64_t p) {
    std::vector<std::uint64_t> inv(n + 1, 0);
    if (n >= 1) inv[1] = 1;
    for (long i = 2; i <= n; ++i) inv[i] = (p - (p / i) * inv[p % i] % p) % p;
    return inv;
}

/// Newton interpolation mod p at signed integer nodes; node differences are
/// inverted through the precomputed table (indexed by |difference|).
inline ModPoly mp_interp(const std::vector<long>& xs, const std::vector<std::uint64_t>& ys,
                         std::uint64_t p, const std::vector<std::uint64_t>& invtab) {
    const size_t m = xs.size();
    std::vector<std::uint64_t> dd = ys;
    for (size_t lev = 1; lev < m; ++lev)
        for (size_t j = m - 1; j >= lev; --j) {
            long diff = xs[j] - xs[j - lev];
            std::uint64_t inv = diff > 0 ? invtab[diff] : p - invtab[-diff];
            dd[j] = (dd[j] + p - dd[j - 1]) % p * inv % p;
        }
    ModPoly poly;
    for (size_t k = m; k-- > 0;) {
        // poly = poly * (x - xs[k]) + dd[k]
        std::uint64_t shift = xs[k] >= 0 ? (p - xs[k] % p) % p : (-xs[k]) % p;
        poly.insert(poly.begin(), 0);
        for (size_t i = 0; i + 1 < poly.size(); ++i)
            poly[i] = (poly[i] + poly[i + 1] * shift) % p;
        poly[0] = (poly[0] + dd[k]) % p;
    }
    mp_trim(poly);
    return poly;
}

/// Cauchy rational-function reconstruction mod p: the extended Euclidean
/// scheme on (node polynomial, interpolant) stopped at the numerator degree
/// threshold (the balanced (m-1)/2 when none is given), yielding num/den with
/// deg num + deg den < #nodes when such a function matches the data. The
/// denominator comes back monic.
inline bool mp_ratrecon(const std::vector<long>& xs, const std::vector<std::uint64_t>& ys,
                        std::uint64_t p, const std::vector<std::uint64_t>& invtab, ModPoly& num,
                        ModPoly& den, long nstop = -1) {
    const long m = static_cast<long>(xs.size());
    ModPoly node{1};
    for (long x : xs) {
        std::uint64_t shift = x >= 0 ? (p - x % p) % p : (-x) % p;
        node.insert(node.begin(), 0);
        for (size_t i = 0; i + 1 < node.size(); ++i)
            node[i] = (node[i] + node[i + 1] * shift) % p;
    }
    ModPoly r0 = node, r1 = mp_interp(xs, ys, p, invtab);
    ModPoly t0, t1{1};
    const long nbound = nstop >= 0 ? nstop : (m - 1) / 2;
    while (static_cast<long>(r1.size()) - 1 > nbound) {
        // r0 = q r1 + r2
        ModPoly r2 = r0, q;
        q.assign(r2.size() - r1.size() + 1, 0);
        std::uint64_t inv = ppv::detail::powmod31(r1.back(), p - 2, p);
        while (r2.size() >= r1.size()) {
            std::uint64_t c = r2.back() * inv % p;
            size_t off = r2.size() - r1.size();
            q[off] = c;
            if (c != 0)
                for (size_t i = 0; i + 1 < r1.size(); ++i)
                    r2[off + i] = (r2[off + i] + p - c * r1[i] % p) % p;
            r2.pop_back();
            mp_trim(r2);
        }
        // t2 = t0 - q t1
        ModPoly t2 = t0;
        if (!t1.empty() && !q.empty()) {
            t2.resize(std::max(t2.size(), q.size() + t1.size() - 1), 0);
            for (size_t i = 0; i < q.size(); ++i) {
                if (q[i] == 0) continue;
                for (size_t j = 0; j < t1.size(); ++j)
                    t2[i + j] = (t2[i + j] + p - q[i] * t1[j] % p) % p;
            }
            mp_trim(t2);
        }
        r0 = std::move(r1);
        r1 = std::move(r2);
        t0 = std::move(t1);
        t1 = std::move(t2);
        if (r1.empty()) break;
    }
    if (t1.empty()) return false;
    if (static_cast<long>(t1.size()) - 1 > m - 1 - nbound) return false;
    std::uint64_t inv = ppv::detail::powmod31(t1.back(), p - 2, p);
    for (std::uint64_t& c : r1) c = c * inv % p;
    for (std::uint64_t& c : t1) c = c * inv % p;
    num = std::move(r1);
    den = std::move(t1);
    return true;
}

/// Dense Gaussian solve of the square augmented system mod p, destroying the
/// input rows; false when the matrix is singular mod p.
inline bool mp_gauss(std::vector<std::vector<std::uint64_t>>& m, std::uint64_t p,
                     std::vector<std::uint64_t>& x) {
    const int r = static_cast<int>(m.size());
    for (int k = 0; k < r; ++k) {
        int pr = -1;
        for (int i = k; i < r; ++i)
            if (m[i][k] != 0) {
                pr = i;
                break;
            }
        if (pr < 0) return false;
        std::swap(m[k], m[pr]);
        std::uint64_t inv = ppv::detail::powmod31(m[k][k], p - 2, p);
        for (int i = k + 1; i < r; ++i) {
            if (m[i][k] == 0) continue;
            std::uint64_t f = m[i][k] * inv % p;
            for (int j = k; j <= r; ++j) m[i][j] = (m[i][j] + p - f * m[k][j] % p) % p;
        }
    }
    x.assign(r, 0);
    for (int k = r - 1; k >= 0; --k) {
        std::uint64_t acc = m[k][r];
        for (int j = k + 1; j < r; ++j) acc = (acc + p - m[k][j] * x[j] % p) % p;
        x[k] = acc * ppv::detail::powmod31(m[k][k], p - 2, p) % p;
    }
    return true;
}

/// Least common multiple of the coefficient denominators of a rational-
/// coefficient polynomial.
inline Int coeff_den_lcm(const PolyT& f) {
    Int l(1);
    for (const Rat& c : f.c) l = lcm(l, Int(c.get_den()));
    return l;
}

/// f scaled by lam (which must clear every denominator) as an integer
/// coefficient vector.
inline std::vector<Int> zvec_scaled(const PolyT& f, const Int& lam) {
    std::vector<Int> v;
    v.reserve(f.c.size());
    for (const Rat& c : f.c) {
        Int s;
        mpz_divexact(s.get_mpz_t(), lam.get_mpz_t(), c.get_den().get_mpz_t());
        v.push_back(Int(c.get_num()) * s);
    }
    while (!v.empty() && sgn(v.back()) == 0) v.pop_back();
    return v;
}

/// acc += a * y (or -= with negate) where a is a polynomial with integer
/// coefficients (denominators 1) and y is an integer coefficient vector; acc
/// must already be large enough. Runs entirely on mpz values, so no rational
/// canonicalization happens per term.
inline void zvec_accmul(std::vector<Int>& acc, const PolyT& a, const std::vector<Int>& y,
                        bool negate) {
    if (y.empty()) return;
    for (size_t i = 0; i < a.c.size(); ++i) {
        const Rat& ai = a.c[i];
        if (sgn(ai) == 0) continue;
        for (size_t j = 0; j < y.size(); ++j) {
            if (negate)
                mpz_submul(acc[i + j].get_mpz_t(), mpq_numref(ai.get_mpq_t()), y[j].get_mpz_t());
            else
                mpz_addmul(acc[i + j].get_mpz_t(), mpq_numref(ai.get_mpq_t()), y[j].get_mpz_t());
        }
    }
}

inline bool zvec_is_zero(const std::vector<Int>& v) {
    for (const Int& c : v)
        if (sgn(c) != 0) return false;
    return true;
}

/// Rational number reconstruction: a/b with |a|, b <= sqrt(M/2) and
/// b u == a (mod M), through the half-extended Euclidean algorithm.
inline bool rat_recon(Int u, const Int& M, Rat& out) {
    u %= M;
    if (u < 0) u += M;
    Int bound;
    {
        Int half = M / 2;
        mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    }
    Int r0 = M, r1 = u, t0 = 0, t1 = 1;
    while (r1 > bound) {
        Int q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (sgn(t1) == 0) return false;
    if (abs(t1) > bound) return false;
    if (sgn(t1) < 0) {
        t1 = -t1;
        r1 = -r1;
    }
    Int g;
    mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
    if (g != 1) return false;
    out = Rat(r1) / Rat(t1);
    return true;
}

/// One reduced solution coordinate mod p.
struct ChainImage {
    ModPoly num, den;  // den monic mod p
};

/// Solve the fixed square subsystem (rows I, columns P, right-hand side from
/// the aug column or the witness row when transposed) at integer nodes mod p,
/// and reconstruct each coordinate as a reduced rational function mod p.
/// Without degree hints, reconstruction is attempted on a prefix and checked
/// against three held-out nodes, growing the node count geometrically up to
/// the minor degree bound; with per-coordinate (deg num, deg den) hints from
/// an earlier prime, exactly deg num + deg den + 2 nodes are collected and
/// the Euclidean stop is pinned to the known numerator degree.
inline bool prime_solve_images(const ClearedRows& cr, const std::vector<int>& I,
                               const std::vector<int>& P, int aug_col, bool transposed, int w,
                               std::uint64_t p, long bound, std::vector<ChainImage>& out,
                               const std::vector<std::pair<int, int>>* hints = nullptr) {
    const int r = static_cast<int>(P.size());
    // reduce the needed polynomial entries mod p once
    std::vector<std::vector<ModPoly>> entry(r, std::vector<ModPoly>(r + 1));
    for (int i = 0; i < r; ++i) {
        for (int q = 0; q < r; ++q) {
            const PolyT& src = transposed ? cr.rows[I[q]][P[i]] : cr.rows[I[i]][P[q]];
            ModPoly& dst = entry[i][q];
            dst.resize(src.c.size());
            for (size_t k = 0; k < src.c.size(); ++k)
                dst[k] = ppv::detail::residue31(Int(src.c[k].get_num()), p);
            mp_trim(dst);
        }
        const PolyT& srhs = transposed ? cr.rows[w][P[i]] : cr.rows[I[i]][aug_col];
        ModPoly& drhs = entry[i][r];
        drhs.resize(srhs.c.size());
        for (size_t k = 0; k < srhs.c.size(); ++k)
            drhs[k] = ppv::detail::residue31(Int(srhs.c[k].get_num()), p);
        mp_trim(drhs);
    }
    long want = 0;  // direct node count when degree hints are available
    if (hints)
        for (const auto& [hn, hd] : *hints) want = std::max(want, static_cast<long>(hn + hd) + 2);
    const long cap = hints ? std::min(bound + 8, want) : bound + 8;
    std::vector<std::uint64_t> invtab = mp_inverse_table(2 * bound + 26, p);
    std::vector<long> xs;
    std::vector<std::vector<std::uint64_t>> vals(r);
    long next_try = 8;
    std::vector<std::vector<std::uint64_t>> m(r, std::vector<std::uint64_t>(r + 1));
    for (long step = 0; step < 2 * bound + 24 && static_cast<long>(xs.size()) < cap; ++step) {
        long v = (step + 1) / 2;
        long tau = step % 2 == 1 ? v : -v;
        std::uint64_t tm = tau >= 0 ? tau % p : (p - (-tau) % p) % p;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j <= r; ++j) m[i][j] = mp_eval(entry[i][j], tm, p);
        std::vector<std::uint64_t> x;
        if (!mp_gauss(m, p, x)) continue;
        xs.push_back(tau);
        for (int q = 0; q < r; ++q) vals[q].push_back(x[q]);
        long n = static_cast<long>(xs.size());
        if (hints) {
            if (n < want) continue;
            bool all_ok = true;
            std::vector<ChainImage> imgs(r);
            for (int q = 0; q < r && all_ok; ++q)
                all_ok = mp_ratrecon(xs, vals[q], p, invtab, imgs[q].num, imgs[q].den,
                                     (*hints)[q].first);
            if (!all_ok) return false;
            out = std::move(imgs);
            return true;
        }
        if (n < next_try + 3 && n < cap) continue;
        next_try = next_try + std::max(4L, next_try / 2);
        // reconstruct on all but the last three nodes, verify on those
        long mfit = n - 3;
        if (mfit < 2) continue;
        std::vector<long> fx(xs.begin(), xs.begin() + mfit);
        bool all_ok = true;
        std::vector<ChainImage> imgs(r);
        for (int q = 0; q < r && all_ok; ++q) {
            std::vector<std::uint64_t> fy(vals[q].begin(), vals[q].begin() + mfit);
            if (!mp_ratrecon(fx, fy, p, invtab, imgs[q].num, imgs[q].den)) {
                all_ok = false;
                break;
            }
            for (long k = mfit; k < n && all_ok; ++k) {
                long tau2 = xs[k];
                std::uint64_t tm2 = tau2 >= 0 ? tau2 % p : (p - (-tau2) % p) % p;
                std::uint64_t dv = mp_eval(imgs[q].den, tm2, p);
                if (dv == 0 || mp_eval(imgs[q].num, tm2, p) != dv * vals[q][k] % p)
                    all_ok = false;
            }
        }
        if (all_ok) {
            out = std::move(imgs);
            return true;
        }
    }
    return false;
}

/// Interpolation-based variant of solve(): the pivot structure is read off a
/// few integer evaluations of t; then, one 31-bit prime at a time, the square
/// pivot subsystem is solved pointwise mod p and each coordinate is rebuilt
/// as a reduced rational function of t mod p; coefficients are lifted to Q by
/// CRT plus rational reconstruction; and the outcome is certified exactly --
/// a checked solution, or a checked row combination proving inconsistency
/// (y'A = 0 with y'b nonzero). Returns false (deciding nothing) whenever the
/// certificates cannot be completed, so the caller falls back to the generic
/// elimination.
inline bool try_solve_interpolated(const ClearedRows& cr, int cols, std::optional<VecT>& result) {
    const int rows = static_cast<int>(cr.rows.size());
    const int aug_col = cols;
    // structure samples
    QElim best;
    size_t best_rank = 0;
    bool have = false;
    for (long t0 : {1L, 2L, 3L, 5L}) {
        std::vector<std::vector<Rat>> m(rows);
        for (int i = 0; i < rows; ++i) {
            m[i].reserve(cols + 1);
            for (int j = 0; j <= cols; ++j) m[i].push_back(Rat(eval_at_int(cr.rows[i][j], Int(t0))));
        }
        QElim q = q_structure(std::move(m));
        if (!have || q.pivot_cols.size() > best_rank) {
            best = std::move(q);
            best_rank = best.pivot_cols.size();
            have = true;
        }
    }
    bool claim_inconsistent = false;
    int w = -1;
    std::vector<int> P, I;
    for (size_t k = 0; k < best.pivot_cols.size(); ++k) {
        if (best.pivot_cols[k] == aug_col) {
            claim_inconsistent = true;
            w = best.pivot_rows[k];
        } else {
            P.push_back(best.pivot_cols[k]);
            I.push_back(best.pivot_rows[k]);
        }
    }
    const int r = static_cast<int>(P.size());

    // Degree bound on the minors: min of the row-sum and column-sum bounds.
    // The inconsistency witness row takes part in the transposed minors, so
    // it counts toward both.
    std::vector<int> brows = I;
    if (claim_inconsistent) brows.push_back(w);
    long brow = 0;
    for (int i : brows) brow += cr.rowdeg[i];
    std::vector<int> colmax(cols + 1, 0);
    for (int i : brows)
        for (int j = 0; j <= cols; ++j) colmax[j] = std::max(colmax[j], cr.rows[i][j].deg());
    long bcol = 0;
    for (int j : P) bcol += colmax[j];
    bcol += colmax[aug_col];
    const long bound = std::min(brow, bcol);

    if (claim_inconsistent && r == 0) {
        // the witness row must itself be 0 = nonzero
        for (int j = 0; j < cols; ++j)
            if (!cr.rows[w][j].is_zero_p()) return false;
        if (cr.rows[w][aug_col].is_zero_p()) return false;
        result = std::nullopt;
        return true;
    }
    if (r == 0) {
        for (int i = 0; i < rows; ++i)
            if (!cr.rows[i][aug_col].is_zero_p()) return false;
        result = VecT(cols, RatT());
        return true;
    }

    // Per-prime images, lifted coefficient-wise.
    std::vector<int> dn, dd;  // degree consensus per coordinate
    std::vector<std::pair<int, int>> hints;
    Int modulus(1);
    std::vector<std::vector<Int>> accn(r), accd(r);  // CRT accumulators
    int mismatch_run = 0;
    int fail_run = 0;
    bool have_prev = false;
    std::vector<RatT> prev;
    for (std::uint64_t p : ppv::detail::gcd_primes()) {
        std::vector<ChainImage> imgs;
        if (!prime_solve_images(cr, I, P, aug_col, claim_inconsistent, w, p, bound, imgs,
                                dn.empty() ? nullptr : &hints)) {
            // repeated failures under hints mean the consensus itself is off
            if (!dn.empty() && ++fail_run >= 3) {
                dn.clear();
                hints.clear();
                fail_run = 0;
            }
            continue;
        }
        fail_run = 0;
        bool same_shape = !dn.empty();
        if (same_shape)
            for (int q = 0; q < r; ++q)
                if (static_cast<int>(imgs[q].num.size()) - 1 != dn[q] ||
                    static_cast<int>(imgs[q].den.size()) - 1 != dd[q])
                    same_shape = false;
        if (!dn.empty() && !same_shape) {
            if (++mismatch_run < 3) continue;
            dn.clear();  // consensus was probably built on an unlucky prime
            hints.clear();
        }
        if (dn.empty()) {
            dn.assign(r, 0);
            dd.assign(r, 0);
            for (int q = 0; q < r; ++q) {
                dn[q] = static_cast<int>(imgs[q].num.size()) - 1;
                dd[q] = static_cast<int>(imgs[q].den.size()) - 1;
                hints.emplace_back(dn[q], dd[q]);
                accn[q].assign(dn[q] + 1, Int(0));
                accd[q].assign(dd[q] + 1, Int(0));
            }
            modulus = 1;
            mismatch_run = 0;
            have_prev = false;
        }
        mismatch_run = 0;
        // Garner step on every coefficient
        Int P_(static_cast<unsigned long>(p));
        Int minv(1);
        if (modulus != 1) mpz_invert(minv.get_mpz_t(), modulus.get_mpz_t(), P_.get_mpz_t());
        auto lift = [&](std::vector<Int>& acc, const ModPoly& img) {
            for (size_t k = 0; k < acc.size(); ++k) {
                std::uint64_t want = k < img.size() ? img[k] : 0;
                if (modulus == 1) {
                    acc[k] = Int(static_cast<unsigned long>(want));
                } else {
                    std::uint64_t haveq = ppv::detail::residue31(acc[k], p);
                    std::uint64_t delta = (want + p - haveq) % p;
                    Int corr = Int(static_cast<unsigned long>(delta)) * minv % P_;
                    if (corr < 0) corr += P_;
                    acc[k] += modulus * corr;
                }
            }
        };
        for (int q = 0; q < r; ++q) {
            lift(accn[q], imgs[q].num);
            lift(accd[q], imgs[q].den);
        }
        modulus *= P_;
        // rational lift of every coefficient
        bool lifted = true;
        std::vector<RatT> cand(r);
        for (int q = 0; q < r && lifted; ++q) {
            PolyT np, dp;
            np.c.resize(dn[q] + 1, Rat(0));
            dp.c.resize(dd[q] + 1, Rat(0));
            for (int k = 0; k <= dn[q] && lifted; ++k) lifted = rat_recon(accn[q][k], modulus, np.c[k]);
            for (int k = 0; k <= dd[q] && lifted; ++k) lifted = rat_recon(accd[q][k], modulus, dp.c[k]);
            if (!lifted) break;
            np.normalize();
            dp.normalize();
            if (dp.is_zero_p()) {
                lifted = false;
                break;
            }
            cand[q] = RatT(std::move(np), std::move(dp));
        }
        if (!lifted) continue;
        if (!(have_prev && cand == prev)) {
            prev = std::move(cand);
            have_prev = true;
            continue;
        }
        // stabilized under a fresh prime: certify exactly
        std::vector<const PolyT*> udens;
        for (const RatT& e : prev) {
            if (e.is_zero_f()) continue;
            bool seen = false;
            for (const PolyT* u : udens)
                if (*u == e.den) {
                    seen = true;
                    break;
                }
            if (!seen) udens.push_back(&e.den);
        }
        PolyT lden = PolyT::one();
        for (const PolyT* u : udens) lden = lcm(lden, *u);
        std::vector<PolyT> X(r);
        for (int q = 0; q < r; ++q)
            X[q] = prev[q].is_zero_f() ? PolyT() : prev[q].num * exact_div(lden, prev[q].den);
        // The cleared rows have integer coefficients, so after scaling X and
        // lden by the common coefficient-denominator lcm the identities below
        // live entirely over the integers (scaling by a positive constant
        // neither creates nor destroys zeroness).
        Int lamstar = coeff_den_lcm(lden);
        for (int q = 0; q < r; ++q) lamstar = lcm(lamstar, coeff_den_lcm(X[q]));
        std::vector<std::vector<Int>> Y(r);
        for (int q = 0; q < r; ++q) Y[q] = zvec_scaled(X[q], lamstar);
        std::vector<Int> lhat = zvec_scaled(lden, lamstar);
        size_t ymax = lhat.size();
        for (const auto& y : Y) ymax = std::max(ymax, y.size());
        size_t rowmax = 1;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j <= cols; ++j) rowmax = std::max(rowmax, cr.rows[i][j].c.size());
        std::vector<Int> acc(rowmax + ymax, Int(0));
        auto reset_acc = [&] {
            for (Int& c : acc) c = 0;
        };
        bool ok = true;
        if (!claim_inconsistent) {
            // for every row: sum_q row[P[q]] * X_q == row[aug] * lden
            for (int i = 0; i < rows && ok; ++i) {
                reset_acc();
                for (int q = 0; q < r; ++q) zvec_accmul(acc, cr.rows[i][P[q]], Y[q], false);
                zvec_accmul(acc, cr.rows[i][aug_col], lhat, true);
                ok = zvec_is_zero(acc);
            }
            if (!ok) continue;
            VecT x(cols, RatT());
            for (int q = 0; q < r; ++q) x[P[q]] = prev[q];
            result = std::move(x);
            return true;
        }
        // y with y[I[q]] = -X_q, y[w] = lden kills every matrix column and
        // hits the constant column with something nonzero
        for (int j = 0; j <= cols && ok; ++j) {
            reset_acc();
            zvec_accmul(acc, cr.rows[w][j], lhat, false);
            for (int q = 0; q < r; ++q) zvec_accmul(acc, cr.rows[I[q]][j], Y[q], true);
            if (j < cols && !zvec_is_zero(acc)) ok = false;
            if (j == cols && zvec_is_zero(acc)) ok = false;
        }
        if (!ok) continue;
        result = std::nullopt;
        return true;
    }
    return false;
}

}  // namespace detail

/// One solution of A x = b with all free variables zero, or nothing if the
/// system is inconsistent. Large systems (by an interpolation-cost proxy) go
/// through the evaluation solver first; its exact certificates make a wrong
/// answer impossible and a failed certificate falls back to plain elimination.
inline std::optional<VecT> solve(const MatT& a, const VecT& b) {
    const int rows = static_cast<int>(a.size());
    require_internal(static_cast<int>(b.size()) == rows, "size mismatch in solve");
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    if (rows == 0) return VecT(cols, RatT());
    {
        detail::ClearedRows cr = detail::clear_solve_rows(a, b);
        std::vector<int> degs = cr.rowdeg;
        std::sort(degs.begin(), degs.end(), std::greater<int>());
        long proxy = 0;
        for (int i = 0; i < std::min(rows, cols); ++i) proxy += degs[i];
        if (proxy >= 60) {
            std::optional<VecT> fast;
            if (detail::try_solve_interpolated(cr, cols, fast)) return fast;
        }
    }
    MatT aug = a;
    for (int i = 0; i < rows; ++i) aug[i].push_back(b[i]);
    Rref r = rref(std::move(aug));
    for (int p : r.pivot_cols)
        if (p == cols) return std::nullopt;  // pivot in the constant column
    VecT x(cols, RatT());
    for (size_t pr = 0; pr < r.pivot_cols.size(); ++pr) x[r.pivot_cols[pr]] = r.m[pr][cols];
    return x;
}

/// One solution of A x = 0 with x[pivot] = 1 and x[z] = 0 for every z in
/// zeroed, free variables zero, or nothing if no such solution exists. The
/// matrix may have zero rows, hence the explicit column count.
inline std::optional<VecT> solve_with_unit_pivot(const MatT& a, int cols, int pivot,
                                                 const std::vector<int>& zeroed) {
    const int rows = static_cast<int>(a.size());
    for (const auto& r : a) require_internal(static_cast<int>(r.size()) == cols, "ragged matrix");
    require_internal(pivot >= 0 && pivot < cols, "pivot out of range");
    std::vector<bool> drop(cols, false);
    drop[pivot] = true;
    for (int z : zeroed) {
        require_internal(z >= 0 && z < cols, "zeroed column out of range");
        require_internal(z != pivot, "pivot column cannot be zeroed");
        drop[z] = true;
    }
    if (rows == 0) {
        VecT full(cols, RatT());
        full[pivot] = RatT(Rat(1));
        return full;
    }
    // Move the pivot column to the right-hand side, drop the zeroed columns.
    std::vector<int> keep;
    for (int j = 0; j < cols; ++j)
        if (!drop[j]) keep.push_back(j);
    MatT sub(rows, VecT(keep.size(), RatT()));
    VecT rhs(rows, RatT());
    for (int i = 0; i < rows; ++i) {
        for (size_t j = 0; j < keep.size(); ++j) sub[i][j] = a[i][keep[j]];
        rhs[i] = RatT() - a[i][pivot];
    }
    auto x = solve(sub, rhs);
    if (!x) return std::nullopt;
    VecT full(cols, RatT());
    full[pivot] = RatT(Rat(1));
    for (size_t j = 0; j < keep.size(); ++j) full[keep[j]] = (*x)[j];
    return full;
}

}  // namespace ppv
