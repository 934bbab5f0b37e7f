#pragma once

#include <string>
#include <type_traits>
#include <vector>

#include "ppv/ore.hpp"
#include "ppv/tower.hpp"

namespace ppv {

// Expression grammar over the variables x and t:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' uint)?
//   base   := 'x' | 't' | integer | '(' expr ')' | '-' factor
// Whitespace is insignificant. Exponents are unsigned integer literals, so
// "x^(-1)" is rejected. Operator strings additionally allow the symbol for
// d/dt as an atom.

namespace detail {

enum class Tok { Int, X, T, Dt, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Lexer {
    const std::string& s;
    size_t pos = 0;
    Tok tok = Tok::End;
    std::string text;   // digits for Tok::Int
    size_t tok_pos = 0; // byte offset of the current token

    explicit Lexer(const std::string& src) : s(src) { advance(); }

    [[noreturn]] void error(const std::string& msg) const {
        fail("parse", msg + " at position " + std::to_string(tok_pos));
    }

    void advance() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r'))
            ++pos;
        tok_pos = pos;
        if (pos >= s.size()) {
            tok = Tok::End;
            return;
        }
        char ch = s[pos];
        switch (ch) {
            case '+': tok = Tok::Plus; ++pos; return;
            case '-': tok = Tok::Minus; ++pos; return;
            case '*': tok = Tok::Star; ++pos; return;
            case '/': tok = Tok::Slash; ++pos; return;
            case '^': tok = Tok::Caret; ++pos; return;
            case '(': tok = Tok::LParen; ++pos; return;
            case ')': tok = Tok::RParen; ++pos; return;
            case 'x': tok = Tok::X; ++pos; return;
            case 't': tok = Tok::T; ++pos; return;
            default: break;
        }
        if (ch >= '0' && ch <= '9') {
            size_t start = pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
            text = s.substr(start, pos - start);
            tok = Tok::Int;
            return;
        }
        // UTF-8 partial derivative symbol followed by 't'; '@t' is accepted
        // as an ASCII alias for shell-friendly input.
        if (static_cast<unsigned char>(ch) == 0xE2 && pos + 2 < s.size() &&
            static_cast<unsigned char>(s[pos + 1]) == 0x88 &&
            static_cast<unsigned char>(s[pos + 2]) == 0x82) {
            if (pos + 3 >= s.size() || s[pos + 3] != 't')
                fail("parse", "expected 't' after the derivative symbol at position " +
                                  std::to_string(pos));
            pos += 4;
            tok = Tok::Dt;
            return;
        }
        if (ch == '@') {
            if (pos + 1 >= s.size() || s[pos + 1] != 't')
                fail("parse", "expected 't' after '@' at position " + std::to_string(pos));
            pos += 2;
            tok = Tok::Dt;
            return;
        }
        fail("parse", std::string("unexpected character '") + ch + "' at position " +
                          std::to_string(pos));
    }

    unsigned long take_uint() {
        if (tok != Tok::Int) error("exponent must be an unsigned integer literal");
        Int v = int_from_digits(text);
        if (v > 1000) error("exponent too large");
        unsigned long u = v.get_ui();
        advance();
        return u;
    }
};

/// Parse-time value for operator strings: an operator polynomial evaluated
/// commutatively. Plain expressions only ever produce order-zero values.
struct OpVal {
    OpT op;

    bool constant() const { return op.is_zero_op() || op.ord() == 0; }
    RatT ratt() const { return op.coeff(0); }
};

template <class V>
struct ExprParser;

/// Evaluation policy for plain x/t expressions.
struct RatXPolicy {
    using Value = RatX;
    static Value from_int(const Int& n) { return RatX(RatT(Rat(n))); }
    static Value var_x(Lexer&) { return ratx_x(); }
    static Value var_t(Lexer&) { return embed(ratt_t()); }
    static Value dt(Lexer& lx) {
        lx.error("the derivative symbol is not allowed here");
    }
    static Value add(const Value& a, const Value& b, Lexer&) { return a + b; }
    static Value sub(const Value& a, const Value& b, Lexer&) { return a - b; }
    static Value neg(const Value& a, Lexer&) { return RatX() - a; }
    static Value mul(const Value& a, const Value& b, Lexer&) { return a * b; }
    static Value div(const Value& a, const Value& b, Lexer& lx) {
        if (b.is_zero_f()) lx.error("division by zero");
        return a / b;
    }
    static Value pow(const Value& a, unsigned long e, Lexer&) {
        return powx(a, static_cast<long>(e));
    }
};

/// Evaluation policy for operator strings.
struct OpPolicy {
    using Value = OpVal;
    static Value from_int(const Int& n) { return OpVal{OpT(RatT(Rat(n)))}; }
    static Value var_t(Lexer&) { return OpVal{OpT(ratt_t())}; }
    static Value dt(Lexer&) { return OpVal{OpT::dt()}; }
    static Value add(const Value& a, const Value& b, Lexer&) { return OpVal{a.op + b.op}; }
    static Value sub(const Value& a, const Value& b, Lexer&) { return OpVal{a.op - b.op}; }
    static Value neg(const Value& a, Lexer&) { return OpVal{OpT::zero() - a.op}; }
    static Value mul(const Value& a, const Value& b, Lexer& lx) {
        if (!a.constant() && !b.constant())
            lx.error("nonlinear use of the derivative symbol");
        if (a.constant()) return OpVal{a.ratt() * b.op};
        return OpVal{b.ratt() * a.op};
    }
    static Value div(const Value& a, const Value& b, Lexer& lx) {
        if (!b.constant()) lx.error("the derivative symbol cannot appear in a denominator");
        RatT d = b.ratt();
        if (d.is_zero_f()) lx.error("division by zero");
        return OpVal{(RatT(Rat(1)) / d) * a.op};
    }
    static Value pow(const Value& a, unsigned long e, Lexer& lx) {
        if (a.constant()) {
            RatT r{Rat(1)};
            for (unsigned long i = 0; i < e; ++i) r = r * a.ratt();
            return OpVal{OpT(r)};
        }
        // Only a bare derivative symbol may be raised to a power.
        if (a.op.ord() >= 1 && a.op.coeff(a.op.ord()) == RatT(Rat(1))) {
            bool pure = true;
            for (int i = 0; i < a.op.ord(); ++i)
                if (!a.op.coeff(i).is_zero_f()) pure = false;
            if (pure && a.op.ord() == 1) {
                OpT l;
                l.c.assign(e + 1, RatT());
                l.c[e] = RatT(Rat(1));
                l.normalize();
                return OpVal{l};
            }
        }
        lx.error("unsupported power of an operator expression");
    }
};

template <class Policy>
typename Policy::Value parse_expr(Lexer& lx);

template <class Policy>
typename Policy::Value parse_factor(Lexer& lx);

template <class Policy>
typename Policy::Value parse_base(Lexer& lx) {
    using V = typename Policy::Value;
    switch (lx.tok) {
        case Tok::X: {
            lx.advance();
            if constexpr (std::is_same_v<Policy, OpPolicy>)
                lx.error("'x' is not allowed in an operator in d/dt");
            else
                return Policy::var_x(lx);
        }
        case Tok::T: lx.advance(); return Policy::var_t(lx);
        case Tok::Dt: lx.advance(); return Policy::dt(lx);
        case Tok::Int: {
            Int v = int_from_digits(lx.text);
            lx.advance();
            return Policy::from_int(v);
        }
        case Tok::LParen: {
            lx.advance();
            V v = parse_expr<Policy>(lx);
            if (lx.tok != Tok::RParen) lx.error("expected ')'");
            lx.advance();
            return v;
        }
        case Tok::Minus: {
            lx.advance();
            V v = parse_factor<Policy>(lx);
            return Policy::neg(v, lx);
        }
        default: lx.error("expected a value");
    }
}

template <class Policy>
typename Policy::Value parse_factor(Lexer& lx) {
    auto v = parse_base<Policy>(lx);
    if (lx.tok == Tok::Caret) {
        lx.advance();
        unsigned long e = lx.take_uint();
        return Policy::pow(v, e, lx);
    }
    return v;
}

template <class Policy>
typename Policy::Value parse_term(Lexer& lx) {
    auto v = parse_factor<Policy>(lx);
    while (lx.tok == Tok::Star || lx.tok == Tok::Slash) {
        bool mul = (lx.tok == Tok::Star);
        lx.advance();
        auto w = parse_factor<Policy>(lx);
        v = mul ? Policy::mul(v, w, lx) : Policy::div(v, w, lx);
    }
    return v;
}

template <class Policy>
typename Policy::Value parse_expr(Lexer& lx) {
    auto v = parse_term<Policy>(lx);
    while (lx.tok == Tok::Plus || lx.tok == Tok::Minus) {
        bool add = (lx.tok == Tok::Plus);
        lx.advance();
        auto w = parse_term<Policy>(lx);
        v = add ? Policy::add(v, w, lx) : Policy::sub(v, w, lx);
    }
    return v;
}

}  // namespace detail

/// Parse an expression in x and t into a rational function.
inline RatX parse_ratx(const std::string& s) {
    detail::Lexer lx(s);
    RatX v = detail::parse_expr<detail::RatXPolicy>(lx);
    if (lx.tok != detail::Tok::End) lx.error("unexpected trailing input");
    return v;
}

/// Parse an expression that must not involve x.
inline RatT parse_ratt(const std::string& s) {
    RatX v = parse_ratx(s);
    if (!is_constant_x(v)) fail("parse", "expected an expression in t only: " + s);
    return as_ratt(v);
}

/// Parse an operator in d/dt from its canonical display form.
inline OpT parse_op_t(const std::string& s) {
    detail::Lexer lx(s);
    detail::OpVal v = detail::parse_expr<detail::OpPolicy>(lx);
    if (lx.tok != detail::Tok::End) lx.error("unexpected trailing input");
    return v.op;
}

}  // namespace ppv
