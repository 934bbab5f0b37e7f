#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ppv/tower.hpp"

namespace ppv {

/// Linear differential operator in d/dt with coefficients in Q(t):
/// L = sum c[i] * Dt^i. Multiplication carries the twist Dt*a = a*Dt + a'.
struct OpT {
    std::vector<RatT> c;  // ascending powers of Dt

    OpT() = default;
    explicit OpT(RatT a) : c{std::move(a)} { normalize(); }

    void normalize() {
        while (!c.empty() && c.back().is_zero_f()) c.pop_back();
    }

    int ord() const { return static_cast<int>(c.size()) - 1; }  // -1 for the zero operator
    bool is_zero_op() const { return c.empty(); }
    bool is_one_op() const { return ord() == 0 && c[0] == RatT(Rat(1)); }

    RatT coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(c.size())) ? c[i] : RatT();
    }
    RatT lc() const {
        require_internal(!c.empty(), "leading coefficient of the zero operator");
        return c.back();
    }

    static OpT zero() { return OpT(); }
    static OpT one() { return OpT(RatT(Rat(1))); }
    static OpT dt() {
        OpT l;
        l.c = {RatT(), RatT(Rat(1))};
        return l;
    }

    bool operator==(const OpT& o) const { return c == o.c; }
    bool operator!=(const OpT& o) const { return !(*this == o); }
};

inline OpT operator+(const OpT& a, const OpT& b) {
    OpT r;
    r.c.resize(std::max(a.c.size(), b.c.size()), RatT());
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
    r.normalize();
    return r;
}

inline OpT operator-(const OpT& a, const OpT& b) {
    OpT r;
    r.c.resize(std::max(a.c.size(), b.c.size()), RatT());
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
    r.normalize();
    return r;
}

inline OpT operator*(const RatT& a, const OpT& l) {
    OpT r = l;
    for (RatT& ci : r.c) ci = a * ci;
    r.normalize();
    return r;
}

/// Left composition with Dt: Dt o L.
inline OpT dt_compose(const OpT& l) {
    OpT r;
    r.c.resize(l.c.size() + 1, RatT());
    for (size_t j = 0; j < r.c.size(); ++j) {
        RatT v;
        if (j > 0) v = v + l.coeff(static_cast<int>(j) - 1);
        v = v + deriv_t(l.coeff(static_cast<int>(j)));
        r.c[j] = v;
    }
    r.normalize();
    return r;
}

/// Operator product a o b (apply b first).
inline OpT operator*(const OpT& a, const OpT& b) {
    OpT r;
    OpT shifted = b;  // Dt^i o b
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i].is_zero_f()) r = r + a.c[i] * shifted;
        if (i + 1 < a.c.size()) shifted = dt_compose(shifted);
    }
    return r;
}

inline OpT monic(const OpT& l) {
    require_internal(!l.is_zero_op(), "monic form of the zero operator");
    RatT inv = RatT(Rat(1)) / l.lc();
    return inv * l;
}

inline RatT apply_t(const OpT& l, const RatT& f) {
    RatT r;
    RatT d = f;
    for (size_t i = 0; i < l.c.size(); ++i) {
        r = r + l.c[i] * d;
        if (i + 1 < l.c.size()) d = deriv_t(d);
    }
    return r;
}

inline RatX apply_t(const OpT& l, const RatX& f) {
    RatX r;
    RatX d = f;
    for (size_t i = 0; i < l.c.size(); ++i) {
        r = r + embed(l.c[i]) * d;
        if (i + 1 < l.c.size()) d = deriv_t(d);
    }
    return r;
}

/// Right division: a = q o b + r with ord(r) < ord(b).
inline std::pair<OpT, OpT> right_divide(const OpT& a, const OpT& b) {
    if (b.is_zero_op()) fail("domain", "division by zero operator");
    OpT q, r = a;
    while (!r.is_zero_op() && r.ord() >= b.ord()) {
        int k = r.ord() - b.ord();
        OpT mono;
        mono.c.assign(k + 1, RatT());
        mono.c[k] = r.lc() / b.lc();
        q = q + mono;
        r = r - mono * b;
    }
    return {q, r};
}

/// Apply an operator in d/dx given by its coefficient list (ascending powers)
/// to a rational function.
inline RatX apply_x(const std::vector<RatX>& coeffs, const RatX& f) {
    RatX r;
    RatX d = f;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        r = r + coeffs[i] * d;
        if (i + 1 < coeffs.size()) d = deriv_x(d);
    }
    return r;
}

// --- Rendering --------------------------------------------------------------

/// Canonical display form, e.g. "Dt^2 + ((2*t-1)/(t^2-t))*Dt - 1/(4*t^2-4*t)"
/// with the UTF-8 symbol for Dt. The zero operator renders as "0".
inline std::string render_op_t(const OpT& l) {
    static const std::string DT = "∂t";
    if (l.is_zero_op()) return "0";
    std::string s;
    for (int j = l.ord(); j >= 0; --j) {
        RatT cj = l.coeff(j);
        if (cj.is_zero_f()) continue;
        bool neg = sgn(cj.num.lc()) < 0;
        RatT mag = neg ? -cj : cj;
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        std::string ms = render_ratt(mag);
        if (j == 0) {
            s += ms;
        } else {
            std::string ds = (j == 1) ? DT : DT + "^" + std::to_string(j);
            if (ms == "1") {
                s += ds;
            } else {
                if (detail::is_compound(ms)) ms = "(" + ms + ")";
                s += ms + "*" + ds;
            }
        }
    }
    return s;
}

}  // namespace ppv
