#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace ppv;
using ppvtest::Rng;

TEST_CASE("rational function field axioms hold on random elements") {
    Rng rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        RatT a = ppvtest::rand_ratt(rng), b = ppvtest::rand_ratt(rng), c = ppvtest::rand_ratt(rng);
        REQUIRE(a + b == b + a);
        REQUIRE(a * b == b * a);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a - a == RatT());
        if (!b.is_zero_f()) REQUIRE(a / b * b == a);
    }
}

TEST_CASE("rational functions are kept in lowest terms with monic denominator") {
    RatT a(PolyT{Rat(0), Rat(2)}, PolyT{Rat(0), Rat(0), Rat(4)});  // 2t / 4t^2
    REQUIRE(a.num == PolyT{Rat(1, 2)});
    REQUIRE(a.den == PolyT::var());

    RatT b(PolyT{Rat(-1), Rat(0), Rat(1)}, PolyT{Rat(1), Rat(1)});  // (t^2-1)/(t+1)
    REQUIRE(b.den == PolyT::one());
    REQUIRE(b.num == PolyT{Rat(-1), Rat(1)});
}

TEST_CASE("polynomial gcd and lcm satisfy the product identity") {
    Rng rng(431);
    for (int trial = 0; trial < 40; ++trial) {
        PolyT a = ppvtest::rand_polyt(rng, 3), b = ppvtest::rand_polyt(rng, 3);
        PolyT g = gcd(a, b), l = lcm(a, b);
        REQUIRE(divmod(a, g).second.is_zero_p());
        REQUIRE(divmod(b, g).second.is_zero_p());
        REQUIRE(divmod(l, a).second.is_zero_p());
        REQUIRE(divmod(l, b).second.is_zero_p());
        REQUIRE(monic(g * l) == monic(a * b));
    }
}

TEST_CASE("derivation on Q(t) is a derivation") {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        RatT a = ppvtest::rand_ratt(rng), b = ppvtest::rand_ratt(rng);
        REQUIRE(deriv_t(a + b) == deriv_t(a) + deriv_t(b));
        REQUIRE(deriv_t(a * b) == deriv_t(a) * b + a * deriv_t(b));
    }
    REQUIRE(deriv_t(ratt_t()) == RatT(Rat(1)));
    REQUIRE(deriv_t(RatT(Rat(7, 3))).is_zero_f());
}

TEST_CASE("squarefree decomposition rebuilds its input") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        PolyT a = ppvtest::rand_polyt(rng, 2, 3);
        PolyT b = ppvtest::rand_polyt(rng, 1, 3);
        PolyT f = a * a * b;
        if (f.deg() == 0) continue;
        PolyT rebuilt = PolyT::one();
        for (const auto& [fac, mult] : squarefree_decomposition(f)) {
            REQUIRE(gcd(fac, derivative(fac)).deg() == 0);
            rebuilt = rebuilt * pow(fac, mult);
        }
        REQUIRE(rebuilt == monic(f));
    }
}

TEST_CASE("resultant vanishes exactly on common factors") {
    PolyT x = PolyT::var();
    PolyT a = (x - PolyT{Rat(1)}) * (x - PolyT{Rat(2)});
    PolyT b = (x - PolyT{Rat(2)}) * (x - PolyT{Rat(3)});
    PolyT c = (x - PolyT{Rat(4)});
    REQUIRE(resultant(a, b) == Rat(0));
    REQUIRE(resultant(a, c) != Rat(0));
}

TEST_CASE("t-level parser and renderer agree") {
    for (const char* s : {"0", "1", "-3/4", "t", "t^2 - 1", "(t^2-1)/(t+2)", "1/(2*t)"}) {
        RatT v = parse_ratt(s);
        REQUIRE(parse_ratt(render_ratt(v)) == v);
    }
    REQUIRE(parse_ratt("(t+1)*(t-1)") == parse_ratt("t^2-1"));
    REQUIRE_THROWS_AS(parse_ratt("x"), Error);
    REQUIRE_THROWS_AS(parse_ratt("t+"), Error);
}
