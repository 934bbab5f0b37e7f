#pragma once

#include <utility>
#include <vector>

#include "ppv/poly.hpp"

namespace ppv {

/// Exact ring division used by the fraction-free determinant. For field
/// entries this is plain division; for polynomial entries it asserts the
/// division leaves no remainder (guaranteed by the Bareiss recurrence).
template <class K>
inline K ring_exact_div(const K& a, const K& b) {
    return a / b;
}
template <class K>
inline Poly<K> ring_exact_div(const Poly<K>& a, const Poly<K>& b) {
    return exact_div(a, b);
}

/// Fraction-free determinant (Bareiss). Works over any integral domain whose
/// exact division is reachable through ring_exact_div; in particular over
/// polynomials, which is how resultants with a free variable are computed
/// without a nested fraction field.
template <class E>
inline E det_bareiss(std::vector<std::vector<E>> m) {
    const size_t n = m.size();
    if (n == 0) return E(1);
    for (auto& row : m) require_internal(row.size() == n, "determinant of non-square matrix");
    E prev(1);
    bool negate = false;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (is_zero(m[k][k])) {
            size_t swap_row = k + 1;
            while (swap_row < n && is_zero(m[swap_row][k])) ++swap_row;
            if (swap_row == n) return E(0);
            std::swap(m[k], m[swap_row]);
            negate = !negate;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                // materialize before dividing: scalar types may hand back lazy
                // expression templates from the arithmetic above
                E num(m[i][j] * m[k][k] - m[i][k] * m[k][j]);
                m[i][j] = ring_exact_div(num, prev);
            }
            m[i][k] = E(0);
        }
        prev = m[k][k];
    }
    E d = m[n - 1][n - 1];
    return negate ? E(0) - d : d;
}

/// Resultant of two univariate polynomials via the Sylvester determinant.
/// Entries may themselves be polynomials (E = Poly<K>), in which case the
/// fraction-free elimination keeps everything polynomial.
template <class E>
inline E resultant(const Poly<E>& a, const Poly<E>& b) {
    if (a.is_zero_p() || b.is_zero_p()) return E(0);
    const int m = a.deg(), n = b.deg();
    if (m == 0) {
        E r(1);
        for (int i = 0; i < n; ++i) r = r * a.lc();
        return r;
    }
    if (n == 0) {
        E r(1);
        for (int i = 0; i < m; ++i) r = r * b.lc();
        return r;
    }
    const int sz = m + n;
    std::vector<std::vector<E>> s(sz, std::vector<E>(sz, E(0)));
    // n shifted rows of a's coefficients (descending), then m rows of b's.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) s[i][i + j] = a.c[m - j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) s[n + i][i + j] = b.c[n - j];
    return det_bareiss(std::move(s));
}

/// Yun squarefree decomposition of a nonzero polynomial over a field of
/// characteristic zero: returns monic pairwise-coprime squarefree factors
/// with their multiplicities, skipping trivial (constant) factors. The
/// product of factor^multiplicity equals the monic part of the input.
template <class K>
inline std::vector<std::pair<Poly<K>, int>> squarefree_decomposition(const Poly<K>& f_in) {
    require_internal(!f_in.is_zero_p(), "squarefree decomposition of zero");
    std::vector<std::pair<Poly<K>, int>> out;
    Poly<K> f = monic(f_in);
    if (f.deg() == 0) return out;
    Poly<K> fp = derivative(f);
    Poly<K> g = gcd(f, fp);
    Poly<K> w = exact_div(f, g);
    Poly<K> y = exact_div(fp, g);
    Poly<K> z = y - derivative(w);
    int i = 1;
    while (w.deg() > 0) {
        Poly<K> gi = gcd(w, z);
        if (gi.deg() > 0) out.emplace_back(gi, i);
        w = exact_div(w, gi);
        y = exact_div(z, gi);
        z = y - derivative(w);
        ++i;
    }
    return out;
}

/// Squarefree part: product of the distinct factors, each to the first power.
template <class K>
inline Poly<K> squarefree_part(const Poly<K>& f) {
    Poly<K> r = Poly<K>::one();
    for (const auto& [fac, mult] : squarefree_decomposition(f)) r = r * fac;
    return r;
}

/// Falling factorial z(z-1)...(z-j+1) as a polynomial in a fresh variable z.
template <class K>
inline Poly<K> falling_factorial(int j) {
    Poly<K> r = Poly<K>::one();
    Poly<K> z = Poly<K>::var();
    for (int i = 0; i < j; ++i) {
        K sh(0);
        for (int s = 0; s < i; ++s) sh = sh + K(1);
        r = r * (z - Poly<K>(sh));
    }
    return r;
}

} // namespace ppv
