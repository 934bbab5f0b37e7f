#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ppv/jsonio.hpp"

using namespace ppv;

namespace {

json request(const std::string& mode, std::initializer_list<std::pair<std::string, std::string>> exprs) {
    json req;
    req["mode"] = mode;
    json in = json::object();
    for (const auto& [k, v] : exprs) in[k] = v;
    req["inputs"] = std::move(in);
    return req;
}

}  // namespace

TEST_CASE("documents carry mode, inputs, result, certificates and trace") {
    json doc = run_document(request("telescope-rational", {{"eta", "2*t/(x^2+t)"}}));
    REQUIRE(doc["mode"] == "telescope-rational");
    REQUIRE(doc["schema"] == "1");
    REQUIRE(doc["inputs"]["eta"] == "2*t/(x^2+t)");
    REQUIRE(doc["result"]["operator"] == "∂t - 1/(2*t)");
    REQUIRE(doc["result"]["order"] == 1);
    REQUIRE(doc["result"]["f"] == "-x/(x^2+t)");
    REQUIRE(doc["certificates"].size() == 1);
    REQUIRE(doc["certificates"][0]["type"] == "telescoper-rational");
    REQUIRE(doc["trace"]["stages"].size() == 2);
    REQUIRE(verify_document(doc).ok);
}

TEST_CASE("documents are byte-for-byte deterministic") {
    json req = request("intersect",
                       {{"eta1", "(x^2+t^2*x+t)/(x^3+t*x)"}, {"eta2", "2*t/(x^2+t)"}});
    REQUIRE(run_document(req).dump() == run_document(req).dump());
}

TEST_CASE("every front-end mode emits a self-verifying document") {
    std::vector<json> reqs;
    reqs.push_back(request("telescope-rational", {{"eta", "t/x"}}));
    reqs.push_back(request("telescope-exponential", {{"p", "-1/(2*x)"}, {"q", "-1/(2*t)"}}));
    reqs.push_back(
        request("intersect", {{"eta1", "(x^2+t^2*x+t)/(x^3+t*x)"}, {"eta2", "2*t/(x^2+t)"}}));
    reqs.push_back(request("group-ut", {{"u", "t/x"}, {"r", "(t^2-t)/x^2"}}));
    reqs.push_back(
        request("group-dihedral", {{"r", "t/(4*x) - 3/(16*x^2)"}, {"phi", "-1/(2*x)"}}));
    reqs.push_back(request("dreyfus", {{"r", "x-t"}}));
    {
        json req = request("group-recover", {{"r1", "-2*t/x"}, {"r2", "2*t/x^2"}});
        req["inputs"]["riccati"] = {{"u", "t/x"}};
        reqs.push_back(req);
    }
    for (const json& req : reqs) {
        json doc = run_document(req);
        CAPTURE(doc["mode"].get<std::string>());
        REQUIRE(doc.contains("result"));
        VerifyReport rep = verify_document(doc);
        for (const std::string& n : rep.notes) UNSCOPED_INFO(n);
        REQUIRE(rep.ok);
        REQUIRE(!doc["certificates"].empty());
    }
}

TEST_CASE("the recover document names both groups and the quotient maps") {
    json req = request("group-recover", {{"r1", "-2*t/x"}, {"r2", "2*t/x^2"}});
    req["inputs"]["riccati"] = {{"u", "t/x"}};
    json doc = run_document(req);
    REQUIRE(doc["result"]["D"]["kind"] == "ut");
    REQUIRE(doc["result"]["D"]["A"]["kind"] == "logderiv");
    REQUIRE(doc["result"]["D"]["A"]["operator"] == "∂t");
    REQUIRE(doc["result"]["D"]["B"]["operator"] == "1");
    REQUIRE(doc["result"]["E"]["kind"] == "logderiv");
    REQUIRE(doc["result"]["lambda"]["kind"] == "multiplicative");
    REQUIRE(doc["result"]["lambda"]["operator"] == "∂t");
    REQUIRE(doc["result"]["phi"] == json({{"kind", "power"}, {"m", 1}}));
    REQUIRE(doc["result"]["psi"] == json({{"kind", "power"}, {"m", -1}}));
    REQUIRE(doc["result"]["nu"] == 2);
}

TEST_CASE("verification rejects tampered certificates") {
    json doc = run_document(request("telescope-rational", {{"eta", "2*t/(x^2+t)"}}));
    SECTION("sign flip in the witness") {
        doc["certificates"][0]["f"] = "x/(x^2+t)";
        REQUIRE(!verify_document(doc).ok);
    }
    SECTION("wrong operator") {
        doc["certificates"][0]["operator"] = "∂t";
        REQUIRE(!verify_document(doc).ok);
    }
    SECTION("non-monic operator") {
        doc["certificates"][0]["operator"] = "2*∂t - 1/t";
        REQUIRE(!verify_document(doc).ok);
    }
    SECTION("unknown certificate type") {
        doc["certificates"][0]["type"] = "mystery";
        VerifyReport rep = verify_document(doc);
        REQUIRE(!rep.ok);
        REQUIRE_THAT(rep.notes.at(0), Catch::Matchers::ContainsSubstring("unknown type"));
    }
    SECTION("malformed expression") {
        doc["certificates"][0]["eta"] = "2*t/(x^2+";
        VerifyReport rep = verify_document(doc);
        REQUIRE(!rep.ok);
        REQUIRE_THAT(rep.notes.at(0), Catch::Matchers::ContainsSubstring("malformed"));
    }
    SECTION("missing certificate array") {
        doc.erase("certificates");
        REQUIRE(!verify_document(doc).ok);
    }
    SECTION("empty certificate array verifies vacuously, with a warning") {
        doc["certificates"] = json::array();
        VerifyReport rep = verify_document(doc);
        REQUIRE(rep.ok);
        REQUIRE_THAT(rep.notes.at(0), Catch::Matchers::ContainsSubstring("nothing was verified"));
    }
}

TEST_CASE("tampered group certificates are rejected too") {
    json req = request("group-ut", {{"u", "t/x"}, {"r", "(t^2-t)/x^2"}});
    json doc = run_document(req);
    REQUIRE(verify_document(doc).ok);
    bool touched = false;
    for (json& c : doc["certificates"]) {
        if (c["type"] == "riccati") {
            c["u"] = "t/x + 1";
            touched = true;
        }
    }
    REQUIRE(touched);
    REQUIRE(!verify_document(doc).ok);
}

TEST_CASE("unknown modes and missing inputs fail with input errors") {
    REQUIRE_THROWS_AS(run_document(request("no-such-mode", {})), Error);
    try {
        run_document(request("telescope-rational", {}));
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == "input");
    }
    try {
        run_document(request("telescope-rational", {{"eta", "1/(x"}}));
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == "parse");
    }
}

TEST_CASE("option overrides reach the computation") {
    json req = request("group-recover", {{"r1", "2/(7*x)"}, {"r2", "0"}});
    req["inputs"]["riccati"] = {{"sl2", true}};
    req["options"] = {{"nmax", 5}};
    try {
        run_document(req);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(e.code() == "unsupported");
    }
    req["options"] = {{"nmax", 12}};
    json doc = run_document(req);
    REQUIRE(doc["result"]["E"]["kind"] == "mu");
    REQUIRE(doc["result"]["E"]["n"] == 7);
}
