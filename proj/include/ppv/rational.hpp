#pragma once

#include <gmpxx.h>

#include <string>

#include "ppv/error.hpp"

namespace ppv {

/// Exact rational numbers. GMP keeps mpq_class values canonical (reduced,
/// positive denominator) as long as they are built through arithmetic; the
/// two-argument constructor does NOT reduce, so every numerator/denominator
/// construction must go through rat_of or canonicalize explicitly.
using Rat = mpq_class;
using Int = mpz_class;

inline bool is_zero(const Rat& a) { return sgn(a) == 0; }
inline Rat rat_of(long n, long d = 1) {
    Rat v(n, d);
    v.canonicalize();
    return v;
}

inline std::string to_string(const Rat& a) { return a.get_str(); }

/// Parse a decimal integer literal (no sign) into an Int.
inline Int int_from_digits(const std::string& s) {
    if (s.empty()) fail("parse", "empty integer literal");
    return Int(s, 10);
}

inline bool is_one(const Rat& a) { return a == 1; }

} // namespace ppv
