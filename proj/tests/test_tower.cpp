#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace ppv;
using ppvtest::Rng;

TEST_CASE("bivariate gcd is monic and divides both inputs") {
    PolyX a = parse_ratx("(x-t)*(x+1)*(x+1)").num;
    PolyX b = parse_ratx("(x-t)*(x+2)").num;
    PolyX g = gcd_x(a, b);
    REQUIRE(g == parse_ratx("x-t").num);
    REQUIRE(gcd_x(a, PolyX()) == monic(a));

    auto both_zero = []() { gcd_x(PolyX(), PolyX()); };
    REQUIRE_THROWS_MATCHES(both_zero(), Error, Catch::Matchers::Message("gcd of zeros"));
}

TEST_CASE("extended gcd produces a valid Bezout identity") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        PolyX a = (ratx_x() - embed(ppvtest::rand_ratt(rng, 1))).num;
        PolyX b = (ratx_x() * ratx_x() - embed(ppvtest::rand_ratt(rng, 1))).num;
        XGcd<RatT> e = xgcd(a, b);
        REQUIRE(e.s * a + e.t * b == e.g);
    }
}

TEST_CASE("squarefree kernel extracts support and maximal multiplicity") {
    PolyX D = parse_ratx("x^3*(x-t)").num;
    SquarefreeKernel sk = squarefree_kernel(D);
    REQUIRE(sk.d == parse_ratx("x*(x-t)").num);
    REQUIRE(sk.n == 3);
}

TEST_CASE("clear count is the d-adic valuation of the denominator") {
    PolyX d = parse_ratx("x*(x-t)").num;
    REQUIRE(clear_count(d, parse_ratx("1/x")) == 1);
    REQUIRE(clear_count(d, parse_ratx("1/(x^2*(x-t))")) == 2);
    REQUIRE(clear_count(d, parse_ratx("x+t")) == 0);

    auto outside = [&]() { clear_count(d, parse_ratx("1/(x-1)")); };
    REQUIRE_THROWS_MATCHES(outside(), Error,
                           Catch::Matchers::Message("denominator outside d-adic span"));
}

TEST_CASE("proper split separates polynomial part from proper fraction") {
    RatX f = parse_ratx("x^2 + t + 1/(x-t)");
    ProperSplit ps = proper_split(f);
    REQUIRE(ps.poly == parse_ratx("x^2+t").num);
    REQUIRE(RatX(ps.poly) + ps.frac == f);
    REQUIRE(ps.frac.num.deg() < ps.frac.den.deg());
}

TEST_CASE("residue resultant has roots at the residues") {
    // 2/x + 3/(x-1): residues 2 and 3
    RatX f = parse_ratx("2/x + 3/(x-1)");
    QRoots roots = rational_roots_z(residue_resultant(f));
    REQUIRE(roots.fully_split);
    std::vector<Rat> vals;
    for (const auto& [r, m] : roots.roots) vals.push_back(r);
    REQUIRE_THAT(vals, Catch::Matchers::UnorderedEquals(std::vector<Rat>{Rat(2), Rat(3)}));

    // residue depending on t: t/(x-1) has residue t, which is not in Q
    QRoots tdep = rational_roots_z(residue_resultant(parse_ratx("t/(x-1)")));
    REQUIRE(!tdep.fully_split);
}

TEST_CASE("rational root extraction handles multiplicities and denominators") {
    // (y - 1/2)^2 (y + 3) as a polynomial with constant coefficients
    Poly<RatT> p;
    {
        Poly<RatT> y = Poly<RatT>::var();
        Poly<RatT> half = Poly<RatT>(ratt(1, 2));
        p = (y - half) * (y - half) * (y + Poly<RatT>(ratt(3)));
    }
    QRoots roots = rational_roots_z(p);
    REQUIRE(roots.fully_split);
    REQUIRE(roots.roots.size() == 2);
    for (const auto& [r, m] : roots.roots) {
        if (r == Rat(1, 2)) REQUIRE(m == 2);
        if (r == Rat(-3)) REQUIRE(m == 1);
    }

    auto ints = integer_roots_z(p);
    REQUIRE(ints.size() == 1);
    REQUIRE(ints[0].first == Int(-3));
}

TEST_CASE("x-level parser and renderer agree") {
    Rng rng(2718);
    for (const char* s :
         {"0", "x", "t*x^2 - 1/(x-t)", "(x^2+t^2*x+t)/(x^3+t*x)", "-x/(2*t*(t-1)) - 1/(2*t)",
          "(2*x-3)/(3*x+2)", "1/2 + t/x^4"}) {
        RatX v = parse_ratx(s);
        REQUIRE(parse_ratx(render_ratx(v)) == v);
    }
    for (int trial = 0; trial < 60; ++trial) {
        RatX v = embed(ppvtest::rand_ratt(rng)) +
                 embed(ppvtest::rand_ratt(rng)) * ratx_x() +
                 embed(ppvtest::rand_ratt(rng)) / (ratx_x() - embed(ppvtest::rand_ratt(rng, 1)));
        REQUIRE(parse_ratx(render_ratx(v)) == v);
    }
}

TEST_CASE("parser rejects malformed input") {
    REQUIRE_THROWS_AS(parse_ratx("x +"), Error);
    REQUIRE_THROWS_AS(parse_ratx("(x"), Error);
    REQUIRE_THROWS_AS(parse_ratx("x^y"), Error);
    REQUIRE_THROWS_AS(parse_ratx("x^100000"), Error);
    REQUIRE_THROWS_AS(parse_ratx("2x"), Error);  // explicit '*' required
    REQUIRE_THROWS_AS(parse_ratx("1/0"), Error);
}

TEST_CASE("derivations on Q(t)(x) commute") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        RatX f = embed(ppvtest::rand_ratt(rng)) / (ratx_x() - embed(ppvtest::rand_ratt(rng, 1))) +
                 embed(ppvtest::rand_ratt(rng)) * ratx_x();
        REQUIRE(deriv_t(deriv_x(f)) == deriv_x(deriv_t(f)));
        RatX g = ratx_x() * f + ratx(1);
        REQUIRE(deriv_x(f * g) == deriv_x(f) * g + f * deriv_x(g));
    }
    REQUIRE(deriv_x(ratx_x()) == ratx(1));
    REQUIRE(deriv_t(ratx_x()).is_zero_f());
}
