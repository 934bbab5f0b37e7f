#pragma once

#include <random>
#include <vector>

#include "ppv/groups.hpp"
#include "ppv/intersect.hpp"
#include "ppv/parse.hpp"

namespace ppvtest {

using namespace ppv;

/// Deterministic generator shared by the randomized suites; every test that
/// draws from it seeds its own engine so ordering between tests cannot shift
/// the streams.
using Rng = std::mt19937_64;

inline Rat rand_rat(Rng& rng, int span = 9) {
    std::uniform_int_distribution<long> num(-span, span);
    std::uniform_int_distribution<long> den(1, span);
    Rat v(num(rng), den(rng));
    v.canonicalize();  // two-argument mpq construction does not reduce
    return v;
}

inline Rat rand_rat_nonzero(Rng& rng, int span = 9) {
    for (;;) {
        Rat v = rand_rat(rng, span);
        if (v != 0) return v;
    }
}

inline PolyT rand_polyt(Rng& rng, int maxdeg, int span = 5) {
    std::uniform_int_distribution<int> dd(0, maxdeg);
    int d = dd(rng);
    PolyT p;
    p.c.resize(d + 1);
    for (auto& c : p.c) c = rand_rat(rng, span);
    p.c[d] = rand_rat_nonzero(rng, span);
    p.normalize();
    return p;
}

inline RatT rand_ratt(Rng& rng, int maxdeg = 2, int span = 5) {
    PolyT den;
    do {
        den = rand_polyt(rng, maxdeg, span);
    } while (den.is_zero_p());
    return RatT(rand_polyt(rng, maxdeg, span), den);
}

inline RatT rand_ratt_nonzero(Rng& rng, int maxdeg = 2, int span = 5) {
    for (;;) {
        RatT v = rand_ratt(rng, maxdeg, span);
        if (!v.is_zero_f()) return v;
    }
}

inline OpT rand_op(Rng& rng, int maxord, int maxdeg = 1, int span = 3) {
    std::uniform_int_distribution<int> dd(0, maxord);
    int d = dd(rng);
    OpT l;
    l.c.resize(d + 1);
    for (auto& c : l.c) c = rand_ratt(rng, maxdeg, span);
    l.c[d] = rand_ratt_nonzero(rng, maxdeg, span);
    l.normalize();
    return l;
}

/// A sum of at most `terms` simple poles c_i/(x - e_i) with distinct rational
/// shifts e_i in Q(t) and nonzero residues c_i in Q(t). Returns the function
/// together with its residue list.
struct SimplePoleInstance {
    RatX eta;
    std::vector<RatT> residues;
};

inline SimplePoleInstance rand_simple_poles(Rng& rng, int max_terms = 4) {
    std::uniform_int_distribution<int> tt(1, max_terms);
    int k = tt(rng);
    SimplePoleInstance inst;
    std::vector<RatT> shifts;
    for (int i = 0; i < k; ++i) {
        RatT e;
        bool fresh = false;
        while (!fresh) {
            e = rand_ratt(rng, 1, 3);
            fresh = true;
            for (const RatT& s : shifts)
                if (s == e) fresh = false;
        }
        shifts.push_back(e);
        RatT c = rand_ratt_nonzero(rng, 2, 3);
        inst.residues.push_back(c);
        inst.eta = inst.eta + embed(c) / (ratx_x() - embed(e));
    }
    return inst;
}

/// Dimension over Q of the span of a list of rational functions of t. The
/// functions are put over a common denominator and the numerators are ranked
/// on the monomial basis with exact arithmetic.
inline int q_span_dimension(const std::vector<RatT>& fs) {
    PolyT common = PolyT::one();
    for (const RatT& f : fs) common = lcm(common, f.den);
    std::vector<PolyT> nums;
    int maxdeg = -1;
    for (const RatT& f : fs) {
        PolyT n = f.num * exact_div(common, f.den);
        maxdeg = std::max(maxdeg, n.deg());
        nums.push_back(n);
    }
    if (maxdeg < 0) return 0;
    std::vector<std::vector<Rat>> rows;
    for (const PolyT& n : nums) {
        std::vector<Rat> row(maxdeg + 1);
        for (int j = 0; j <= n.deg(); ++j) row[j] = n.coeff(j);
        rows.push_back(row);
    }
    // plain fraction-based elimination over Q
    int rank = 0;
    int cols = maxdeg + 1;
    for (int c = 0; c < cols && rank < (int)rows.size(); ++c) {
        int piv = -1;
        for (int r = rank; r < (int)rows.size(); ++r)
            if (rows[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[rank], rows[piv]);
        for (int r = 0; r < (int)rows.size(); ++r) {
            if (r == rank || rows[r][c] == 0) continue;
            Rat m = rows[r][c] / rows[rank][c];
            for (int j = c; j < cols; ++j) rows[r][j] -= m * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

/// True when the stage-k system admits no solution using at least one of the
/// leading (alpha) unknowns. A homogeneous solution with a nonzero alpha
/// coordinate can be scaled so that coordinate is 1, so pinning each alpha
/// unknown to 1 in turn and asking for a solution covers the whole block;
/// every infeasible answer from solve() is internally certified by an exact
/// row combination y with y'A = 0 and y'b != 0.
inline bool alpha_block_infeasible(const MatT& a, int cols, int n_alpha) {
    for (int j = 0; j < n_alpha; ++j)
        if (solve_with_unit_pivot(a, cols, j, {})) return false;
    return true;
}

/// Fresh rebuild of the stage-k system and a monic order-k solvability check
/// (alpha_k pinned to 1). Orders below k are the business of the stages below
/// k, so a run that re-checks every stage under a returned order covers the
/// full alpha block.
inline bool rational_stage_infeasible(const RatX& eta, int k, const Options& opts = {}) {
    RationalStage st = build_rational_system(eta, k, opts);
    return !solve_with_unit_pivot(st.A, st.cols, k, {});
}

inline bool exponential_stage_infeasible(const RatX& p, const RatX& q, int k,
                                         const Options& opts = {}) {
    ExponentialStage st = build_exponential_system(p, q, k, opts);
    return !solve_with_unit_pivot(st.A, st.cols, k, {});
}

}  // namespace ppvtest
