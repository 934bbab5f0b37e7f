#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

#include "ppv/rational.hpp"

namespace ppv {

/// Dense univariate polynomial over a field K. Invariant: no trailing zero
/// coefficients, so the zero polynomial has an empty coefficient vector and
/// deg() == -1. Callers that want the "deg 0 = 0" display convention use
/// deg_conv() at the boundary where that convention matters.
template <class K>
struct Poly {
    std::vector<K> c; // c[i] multiplies var^i

    Poly() = default;
    explicit Poly(K k) {
        if (!is_zero(k)) c.push_back(std::move(k));
    }
    Poly(std::initializer_list<K> cs) : c(cs) { normalize(); }

    static Poly zero() { return Poly(); }
    static Poly one() { return Poly(K(1)); }
    static Poly var() { // the polynomial "x" (or t, z, ... depending on use)
        Poly p;
        p.c = {K(0), K(1)};
        return p;
    }

    void normalize() {
        while (!c.empty() && is_zero(c.back())) c.pop_back();
    }

    bool is_zero_p() const { return c.empty(); }
    int deg() const { return static_cast<int>(c.size()) - 1; }
    /// Degree with the zero polynomial counted as degree 0 (display/bound
    /// convention used by the telescoping degree formulas).
    int deg_conv() const { return c.empty() ? 0 : deg(); }

    const K& lc() const { return c.back(); } // only on nonzero
    K coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(c.size())) return K(0);
        return c[i];
    }

    bool operator==(const Poly& o) const { return c == o.c; }
    bool operator!=(const Poly& o) const { return !(*this == o); }
};

template <class K>
inline bool is_zero(const Poly<K>& p) {
    return p.is_zero_p();
}

template <class K>
inline Poly<K> operator+(const Poly<K>& a, const Poly<K>& b) {
    Poly<K> r;
    r.c.resize(std::max(a.c.size(), b.c.size()), K(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = r.c[i] + b.c[i];
    r.normalize();
    return r;
}

template <class K>
inline Poly<K> operator-(const Poly<K>& a) {
    Poly<K> r = a;
    for (auto& k : r.c) k = K(0) - k;
    return r;
}

template <class K>
inline Poly<K> operator-(const Poly<K>& a, const Poly<K>& b) {
    return a + (-b);
}

template <class K>
inline Poly<K> operator*(const Poly<K>& a, const Poly<K>& b) {
    if (a.is_zero_p() || b.is_zero_p()) return Poly<K>();
    Poly<K> r;
    r.c.assign(a.c.size() + b.c.size() - 1, K(0));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (is_zero(a.c[i])) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    }
    r.normalize();
    return r;
}

template <class K>
inline Poly<K> operator*(const Poly<K>& a, const K& k) {
    Poly<K> r = a;
    for (auto& x : r.c) x = x * k;
    r.normalize();
    return r;
}

/// Multiply by var^k.
template <class K>
inline Poly<K> shift_up(const Poly<K>& a, int k) {
    if (a.is_zero_p() || k == 0) return a;
    Poly<K> r;
    r.c.assign(a.c.size() + k, K(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i + k] = a.c[i];
    return r;
}

/// Euclidean division over the coefficient field: a = q*b + r, deg r < deg b.
template <class K>
inline std::pair<Poly<K>, Poly<K>> divmod(const Poly<K>& a, const Poly<K>& b) {
    require_internal(!b.is_zero_p(), "polynomial division by zero");
    Poly<K> q, r = a;
    const int db = b.deg();
    if (r.deg() >= db) q.c.assign(r.deg() - db + 1, K(0));
    while (r.deg() >= db) {
        K f = r.lc() / b.lc();
        int k = r.deg() - db;
        q.c[k] = q.c[k] + f;
        // r -= f * x^k * b, done in place
        for (int i = 0; i <= db; ++i)
            r.c[i + k] = r.c[i + k] - f * b.c[i];
        r.normalize();
    }
    q.normalize();
    return {q, r};
}

template <class K>
inline Poly<K> exact_div(const Poly<K>& a, const Poly<K>& b) {
    auto [q, r] = divmod(a, b);
    require_internal(r.is_zero_p(), "polynomial division expected exact");
    return q;
}

template <class K>
inline Poly<K> monic(const Poly<K>& a) {
    if (a.is_zero_p()) return a;
    K inv = K(1) / a.lc();
    return a * inv;
}

/// Monic gcd via the Euclidean algorithm; remainders are re-normalized each
/// step to keep coefficient growth in check. gcd(0,0) = 0.
template <class K>
inline Poly<K> gcd(const Poly<K>& a, const Poly<K>& b) {
    Poly<K> f = a, g = b;
    while (!g.is_zero_p()) {
        auto r = divmod(f, g).second;
        f = g;
        g = monic(r);
    }
    return monic(f);
}

template <class K>
inline Poly<K> lcm(const Poly<K>& a, const Poly<K>& b) {
    if (a.is_zero_p() || b.is_zero_p()) return Poly<K>();
    return monic(exact_div(a * b, gcd(a, b)));
}

/// Formal derivative with respect to the polynomial's own variable.
template <class K>
inline Poly<K> derivative(const Poly<K>& a) {
    Poly<K> r;
    if (a.c.size() <= 1) return r;
    r.c.resize(a.c.size() - 1);
    for (size_t i = 1; i < a.c.size(); ++i) {
        K m(0);
        for (size_t j = 0; j < i; ++j) m = m + K(1); // i as an element of K
        r.c[i - 1] = a.c[i] * m;
    }
    r.normalize();
    return r;
}

/// Apply fn to every coefficient (used for coefficient-wise derivations).
template <class K, class F>
inline Poly<K> map_coeffs(const Poly<K>& a, F fn) {
    Poly<K> r;
    r.c.reserve(a.c.size());
    for (const auto& k : a.c) r.c.push_back(fn(k));
    r.normalize();
    return r;
}

template <class K>
inline K eval(const Poly<K>& a, const K& x) {
    K r(0);
    for (int i = a.deg(); i >= 0; --i) r = r * x + a.c[i];
    return r;
}

template <class K>
inline Poly<K> pow(const Poly<K>& a, int e) {
    require_internal(e >= 0, "negative polynomial power");
    Poly<K> r = Poly<K>::one();
    for (int i = 0; i < e; ++i) r = r * a;
    return r;
}

} // namespace ppv
