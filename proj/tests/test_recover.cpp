#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ppv/recover.hpp"

using namespace ppv;

namespace {

RiccatiData with_u(const RatX& u) {
    RiccatiData d;
    d.kind = RiccatiData::U;
    d.value = u;
    return d;
}

}  // namespace

TEST_CASE("fiber product over a shared multiplicative quotient") {
    // y'' + r1 y' + r2 y with a power relation between the diagonal of the
    // triangular part and the exponential factor.
    RecoverResult rr =
        recover_original(parse_ratx("-2*t/x"), parse_ratx("2*t/x^2"), with_u(parse_ratx("t/x")));
    REQUIRE(rr.r == parse_ratx("(t^2-t)/x^2"));
    REQUIRE(rr.D.kind == GroupDesc::UT);
    REQUIRE(rr.D.A == MultGroupDesc::logderiv(parse_op_t("@t")));
    REQUIRE(rr.D.B == AddGroupDesc::proper(OpT::one()));
    REQUIRE(rr.E == MultGroupDesc::logderiv(parse_op_t("@t")));
    REQUIRE(rr.lambda.kind == LambdaDesc::Multiplicative);
    REQUIRE(rr.lambda.L == parse_op_t("@t"));
    REQUIRE(rr.phi.kind == HomDesc::Power);
    REQUIRE(rr.phi.m == 1);
    REQUIRE(rr.psi.kind == HomDesc::Power);
    REQUIRE(rr.psi.m == -1);
    REQUIRE(rr.nu == 2);
    REQUIRE(rr.relation.has_value());

    // the original operator annihilates the product witness x = y1 * F
    RatX zero = apply_x({rr.r2, rr.r1, ratx(1)}, ratx_x());
    REQUIRE(zero.is_zero_f());
}

TEST_CASE("trivial quotient when the exponential factor is a root of unity") {
    // r1 = 0: the exponential factor is trivial, E = Mu(1), and nothing is
    // shared regardless of D.
    RatX r2 = parse_ratx("-x+t");
    RecoverResult rr = recover_original(RatX(), r2, RiccatiData{});
    REQUIRE(rr.r == parse_ratx("x-t"));
    REQUIRE(rr.E == MultGroupDesc::mu(1));
    REQUIRE(rr.nu == 1);
    REQUIRE(rr.lambda.kind == LambdaDesc::Trivial);
    REQUIRE(rr.D.kind == GroupDesc::SL2ConstConj);
    REQUIRE(rr.dreyfus.has_value());
    REQUIRE(rr.dreyfus->Y == parse_ratx("-1"));
}

TEST_CASE("sl2 cases never share with an infinite exponential group") {
    RatX r1 = parse_ratx("-3/x");
    // r = x - t again after undoing the change of variables
    RatX r2 = change_of_variables(r1, RatX()) - parse_ratx("x-t");
    RecoverResult rr = recover_original(r1, r2, RiccatiData{});
    REQUIRE(rr.r == parse_ratx("x-t"));
    REQUIRE(rr.D.kind == GroupDesc::SL2ConstConj);
    REQUIRE(rr.E == MultGroupDesc::mu(2));
    REQUIRE(rr.e_cyclic.has_value());
    REQUIRE(rr.e_cyclic->second == parse_ratx("x^3"));
    REQUIRE(rr.nu == 2);
    REQUIRE(rr.lambda.kind == LambdaDesc::Trivial);
}

TEST_CASE("additive quotient through the intersection of telescopers") {
    // D = UT(Mu(2), ...) with rational square y1^2 = x, E infinite: the shared
    // structure lives on the additive coordinates and is found by intersecting
    // the two telescopers.
    RatX u = parse_ratx("1/(2*x)");
    RatX r = deriv_x(u) + u * u;
    RatX r1 = parse_ratx("-2*t/x");
    // choose r2 so that the change of variables lands exactly on r
    RatX r2 = change_of_variables(r1, RatX()) - r;
    RecoverResult rr = recover_original(r1, r2, with_u(u));
    REQUIRE(rr.D.kind == GroupDesc::UT);
    REQUIRE(rr.D.A == MultGroupDesc::mu(2));
    REQUIRE(rr.E == MultGroupDesc::logderiv(parse_op_t("@t")));
    REQUIRE(rr.common.has_value());
    REQUIRE(rr.lambda.kind == LambdaDesc::Additive);
    REQUIRE(rr.lambda.L == parse_op_t("@t"));
    REQUIRE(rr.phi.kind == HomDesc::OpOnAdditive);
    REQUIRE(rr.psi.kind == HomDesc::OpOnLogDeriv);
    REQUIRE(rr.nu == 2);
}

TEST_CASE("large finite diagonal shares nothing with an infinite exponential") {
    RatX u = parse_ratx("1/(3*x)");  // Mu(3) diagonal
    RatX r = deriv_x(u) + u * u;
    RatX r1 = parse_ratx("-2*t/x");
    RatX r2 = change_of_variables(r1, RatX()) - r;
    RecoverResult rr = recover_original(r1, r2, with_u(u));
    REQUIRE(rr.D.A == MultGroupDesc::mu(3));
    REQUIRE(rr.lambda.kind == LambdaDesc::Trivial);
}

TEST_CASE("logarithmic coordinates meet when no power relation exists") {
    // u = t/x against the exponential factor of r1 = -2t^2/x: no power of t/x
    // differs from a multiple of t^2/x by a logarithmic derivative, but the
    // t-logarithms of both sides are annihilated by a common operator.
    RatX u = parse_ratx("t/x");
    RatX r = deriv_x(u) + u * u;
    RatX r1 = parse_ratx("-2*t^2/x");
    RatX r2 = change_of_variables(r1, RatX()) - r;
    RecoverResult rr = recover_original(r1, r2, with_u(u));
    REQUIRE(rr.D.kind == GroupDesc::UT);
    REQUIRE(rr.D.A == MultGroupDesc::logderiv(parse_op_t("@t")));
    REQUIRE(rr.E == MultGroupDesc::logderiv(parse_op_t("@t - 1/t")));
    REQUIRE(!rr.relation.has_value());
    REQUIRE(rr.common.has_value());
    REQUIRE(rr.lambda.kind == LambdaDesc::Additive);
    REQUIRE(rr.lambda.L == parse_op_t("@t"));
    REQUIRE(rr.phi.kind == HomDesc::OpOnLogDeriv);
    REQUIRE(rr.phi.L.is_one_op());
    REQUIRE(rr.psi.kind == HomDesc::OpOnLogDeriv);
    REQUIRE(rr.psi.L == parse_op_t("1/(2*t)"));
}

TEST_CASE("finite classical group with a matching quadratic subfield") {
    RiccatiData data;
    data.kind = RiccatiData::Finite;
    data.label = ClassicalLabel::Dihedral;
    data.witnesses = {{2, parse_ratx("t*x")}};
    // r1 = -1/x: exponential factor x^{1/2}, E = Mu(2) with gammaE = x.
    RatX r1 = parse_ratx("-1/x");
    RecoverResult rr = recover_original(r1, RatX(), data);
    REQUIRE(rr.D.kind == GroupDesc::Classical);
    REQUIRE(rr.D.classical_label == "dihedral");
    REQUIRE(rr.E == MultGroupDesc::mu(2));
    REQUIRE(rr.finite.has_value());
    REQUIRE(rr.lambda.kind == LambdaDesc::MuL);
    REQUIRE(rr.lambda.l == 2);
    REQUIRE(rr.phi.kind == HomDesc::Component);
    REQUIRE(rr.phi.order == 2);
    REQUIRE(rr.psi.kind == HomDesc::Power);
    REQUIRE(rr.psi.m == 1);
    REQUIRE(rr.nu == 2);  // the exponential factor x^{1/2} has even order
}

TEST_CASE("cyclic triangular group against a cyclic exponential factor") {
    RiccatiData data;
    data.kind = RiccatiData::Finite;
    data.label = ClassicalLabel::CyclicUT;
    data.cyclic_n = 4;
    data.witnesses = {{2, parse_ratx("x*(x-1)^2")}};
    RatX r1 = parse_ratx("-1/x");  // gammaE = x, m = 2
    RecoverResult rr = recover_original(r1, RatX(), data);
    REQUIRE(rr.E == MultGroupDesc::mu(2));
    REQUIRE(rr.finite.has_value());
    REQUIRE(rr.lambda.kind == LambdaDesc::MuL);
    REQUIRE(rr.lambda.l == 2);
    REQUIRE(rr.phi.kind == HomDesc::Power);
    REQUIRE(rr.phi.m == 2);  // n / l = 4 / 2
    REQUIRE(rr.psi.kind == HomDesc::Power);
    REQUIRE(rr.psi.m == 1);  // m / l = 2 / 2
}

TEST_CASE("exponential factors beyond the cyclic bound are refused") {
    Options opts;
    opts.nmax = 5;
    auto blocked = [&]() {
        recover_original(parse_ratx("2/(7*x)"), RatX(), RiccatiData{}, opts);
    };
    REQUIRE_THROWS_MATCHES(
        blocked(), Error,
        Catch::Matchers::Message("cyclic order of the exponential factor exceeds nmax"));
}
