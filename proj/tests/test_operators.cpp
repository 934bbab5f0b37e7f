#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace ppv;
using ppvtest::Rng;

TEST_CASE("operator composition satisfies the skew commutation rule") {
    OpT dt = OpT::dt();
    RatT t = ratt_t();
    // Dt * a = a * Dt + a'
    OpT lhs = dt * OpT(RatT(t * t));
    OpT rhs = OpT(RatT(t * t)) * dt + OpT(deriv_t(RatT(t * t)));
    REQUIRE(lhs == rhs);
}

TEST_CASE("operator ring axioms hold on random elements") {
    Rng rng(314159);
    for (int trial = 0; trial < 30; ++trial) {
        OpT a = ppvtest::rand_op(rng, 2), b = ppvtest::rand_op(rng, 2), c = ppvtest::rand_op(rng, 2);
        REQUIRE(a + b == b + a);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE((a + b) * c == a * c + b * c);
        REQUIRE(a * OpT::one() == a);
        REQUIRE(OpT::one() * a == a);
        REQUIRE((a * OpT::zero()).is_zero_op());
    }
}

TEST_CASE("application is a module action") {
    Rng rng(161803);
    for (int trial = 0; trial < 30; ++trial) {
        OpT a = ppvtest::rand_op(rng, 2), b = ppvtest::rand_op(rng, 2);
        RatT f = ppvtest::rand_ratt(rng), g = ppvtest::rand_ratt(rng);
        REQUIRE(apply_t(a * b, f) == apply_t(a, apply_t(b, f)));
        REQUIRE(apply_t(a + b, f) == apply_t(a, f) + apply_t(b, f));
        REQUIRE(apply_t(a, f + g) == apply_t(a, f) + apply_t(a, g));
    }
    REQUIRE(apply_t(OpT::dt(), RatT(PolyT::var())) == RatT(Rat(1)));
}

TEST_CASE("application extends coefficientwise to Q(t)(x)") {
    Rng rng(577);
    OpT a = ppvtest::rand_op(rng, 2);
    RatX f = parse_ratx("t/(x-t) + x^2/(t+2)");
    // against the defining expansion sum a_i (d/dt)^i f
    RatX expect;
    RatX der = f;
    for (int i = 0; i <= a.ord(); ++i) {
        expect = expect + embed(a.coeff(i)) * der;
        der = deriv_t(der);
    }
    REQUIRE(apply_t(a, f) == expect);
}

TEST_CASE("right division round trips on random operators") {
    Rng rng(271828);
    int trials = 0;
    while (trials < 200) {
        OpT a = ppvtest::rand_op(rng, 3);
        OpT b = ppvtest::rand_op(rng, 2);
        if (b.is_zero_op()) continue;
        ++trials;
        auto [q, r] = right_divide(a, b);
        REQUIRE(q * b + r == a);
        REQUIRE(r.ord() < b.ord());
    }
}

TEST_CASE("right division by an exact right factor has zero remainder") {
    Rng rng(8128);
    for (int trial = 0; trial < 40; ++trial) {
        OpT q = ppvtest::rand_op(rng, 2);
        OpT b = ppvtest::rand_op(rng, 2);
        if (b.is_zero_op()) continue;
        auto [q2, r2] = right_divide(q * b, b);
        REQUIRE(r2.is_zero_op());
        REQUIRE(q2 == q);
    }
}

TEST_CASE("right division by zero is rejected") {
    auto div0 = []() { right_divide(OpT::dt(), OpT::zero()); };
    REQUIRE_THROWS_MATCHES(div0(), Error, Catch::Matchers::Message("division by zero operator"));
}

TEST_CASE("monic normalization divides by the leading coefficient") {
    OpT l = OpT(ratt(2)) * OpT::dt() + OpT(ratt(3));
    OpT m = monic(l);
    REQUIRE(m.lc() == RatT(Rat(1)));
    REQUIRE(OpT(ratt(2)) * m == l);
}

TEST_CASE("operator parser accepts both spellings of the derivation") {
    OpT a = parse_op_t("∂t^2 + ((2*t-1)/(t^2-t))*∂t + 1/(4*t^2-4*t)");
    OpT b = parse_op_t("@t^2 + ((2*t-1)/(t^2-t))*@t + 1/(4*t^2-4*t)");
    REQUIRE(a == b);
    REQUIRE(a.ord() == 2);
    REQUIRE(parse_op_t(render_op_t(a)) == a);
    REQUIRE(parse_op_t("1").is_one_op());
    REQUIRE(parse_op_t("0").is_zero_op());
    REQUIRE_THROWS_AS(parse_op_t("@x"), Error);
}

TEST_CASE("x-level application of an operator in d/dx") {
    // (Dx^2 - t) applied to x^2: 2 - t x^2
    RatX got = apply_x({ratx(0) - embed(ratt_t()), ratx(0), ratx(1)}, parse_ratx("x^2"));
    REQUIRE(got == parse_ratx("2 - t*x^2"));
}
