#pragma once

#include "ppv/poly.hpp"

namespace ppv {

/// Field of fractions of Poly<K>, kept in canonical form: gcd(num, den) = 1
/// and den monic (so equality is coefficient-wise equality of num and den).
template <class K>
struct RatFunc {
    Poly<K> num, den;

    RatFunc() : num(), den(Poly<K>::one()) {}
    RatFunc(int n) : num(Poly<K>(K(n))), den(Poly<K>::one()) {}
    explicit RatFunc(K k) : num(Poly<K>(std::move(k))), den(Poly<K>::one()) {}
    explicit RatFunc(Poly<K> n) : num(std::move(n)), den(Poly<K>::one()) {}
    RatFunc(Poly<K> n, Poly<K> d) : num(std::move(n)), den(std::move(d)) { canonicalize(); }

    /// Construct from a pair the caller knows to be coprime already; only the
    /// monic-denominator normalization is applied. The arithmetic operators
    /// use this to skip redundant gcds (cross-cancelled products and sums of
    /// reduced fractions are reduced).
    static RatFunc reduced(Poly<K> n, Poly<K> d) {
        require_internal(!d.is_zero_p(), "rational function with zero denominator");
        RatFunc r;
        if (n.is_zero_p()) return r;
        if (!(d.lc() == K(1))) {
            K inv = K(1) / d.lc();
            n = n * inv;
            d = d * inv;
        }
        r.num = std::move(n);
        r.den = std::move(d);
        return r;
    }

    void canonicalize() {
        require_internal(!den.is_zero_p(), "rational function with zero denominator");
        if (num.is_zero_p()) {
            den = Poly<K>::one();
            return;
        }
        Poly<K> g = gcd(num, den);
        if (g.deg() > 0) {
            num = exact_div(num, g);
            den = exact_div(den, g);
        }
        K inv = K(1) / den.lc();
        num = num * inv;
        den = den * inv;
    }

    bool is_zero_f() const { return num.is_zero_p(); }
    bool is_poly() const { return den.deg() == 0; }

    bool operator==(const RatFunc& o) const { return num == o.num && den == o.den; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }
};

template <class K>
inline bool is_zero(const RatFunc<K>& a) {
    return a.is_zero_f();
}

/// Sum with cross-cancellation: for reduced inputs, after dividing the common
/// factor g out of the denominators only g itself can cancel against the new
/// numerator, so one small gcd replaces a full-size one.
template <class K>
inline RatFunc<K> operator+(const RatFunc<K>& a, const RatFunc<K>& b) {
    if (a.is_zero_f()) return b;
    if (b.is_zero_f()) return a;
    Poly<K> g = gcd(a.den, b.den);
    if (g.deg() == 0)
        return RatFunc<K>::reduced(a.num * b.den + b.num * a.den, a.den * b.den);
    Poly<K> ad = exact_div(a.den, g);
    Poly<K> bd = exact_div(b.den, g);
    Poly<K> t = a.num * bd + b.num * ad;
    if (t.is_zero_p()) return RatFunc<K>();
    Poly<K> g2 = gcd(t, g);
    if (g2.deg() > 0) {
        t = exact_div(t, g2);
        g = exact_div(g, g2);
    }
    return RatFunc<K>::reduced(std::move(t), ad * bd * g);
}

template <class K>
inline RatFunc<K> operator-(const RatFunc<K>& a) {
    RatFunc<K> r = a;
    r.num = -r.num;
    return r;
}

template <class K>
inline RatFunc<K> operator-(const RatFunc<K>& a, const RatFunc<K>& b) {
    return a + (-b);
}

/// Product with cross-cancellation (num against the other den), which keeps
/// the gcds at the size of the inputs instead of the size of the product.
template <class K>
inline RatFunc<K> operator*(const RatFunc<K>& a, const RatFunc<K>& b) {
    if (a.is_zero_f() || b.is_zero_f()) return RatFunc<K>();
    Poly<K> g1 = gcd(a.num, b.den);
    Poly<K> g2 = gcd(b.num, a.den);
    const Poly<K>& an = g1.deg() > 0 ? exact_div(a.num, g1) : a.num;
    const Poly<K>& bn = g2.deg() > 0 ? exact_div(b.num, g2) : b.num;
    const Poly<K>& ad = g2.deg() > 0 ? exact_div(a.den, g2) : a.den;
    const Poly<K>& bd = g1.deg() > 0 ? exact_div(b.den, g1) : b.den;
    return RatFunc<K>::reduced(an * bn, ad * bd);
}

template <class K>
inline RatFunc<K> operator/(const RatFunc<K>& a, const RatFunc<K>& b) {
    require_internal(!b.is_zero_f(), "division by zero rational function");
    if (a.is_zero_f()) return RatFunc<K>();
    // b is reduced, so swapping num and den gives a reduced inverse.
    return a * RatFunc<K>::reduced(b.den, b.num);
}

/// Derivative of a reduced fraction n/d: with g = gcd(d, d') and rad = d/g,
/// the quotient rule collapses to (n'*rad - n*(d'/g)) / (d*rad). For the
/// main-variable derivative that pair is already reduced; a coefficient-wise
/// derivation can leave a factor from derivation-constant parts of d, so the
/// canonicalizing constructor still runs (cheap when there is nothing to do).
template <class K, class DF>
inline RatFunc<K> derive(const RatFunc<K>& a, DF poly_derive) {
    Poly<K> dn = poly_derive(a.num);
    if (a.den.deg() == 0) return RatFunc<K>(std::move(dn));
    Poly<K> dd = poly_derive(a.den);
    Poly<K> g = gcd(a.den, dd);
    if (g.deg() == 0)
        return RatFunc<K>(dn * a.den - a.num * dd, a.den * a.den);
    Poly<K> rad = exact_div(a.den, g);
    Poly<K> ddr = exact_div(dd, g);
    return RatFunc<K>(dn * rad - a.num * ddr, a.den * rad);
}

} // namespace ppv
