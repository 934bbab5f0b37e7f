#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ppv/parse.hpp"
#include "ppv/recover.hpp"

namespace ppv {

using json = nlohmann::ordered_json;

// --- Descriptor serialization -----------------------------------------------

inline json mult_group_json(const MultGroupDesc& a) {
    json j;
    if (a.kind == MultGroupDesc::Mu) {
        j["kind"] = "mu";
        j["n"] = a.n;
    } else {
        j["kind"] = "logderiv";
        j["operator"] = render_op_t(a.L);
    }
    return j;
}

inline json add_group_json(const AddGroupDesc& b) {
    json j;
    j["kind"] = "proper";
    j["operator"] = render_op_t(b.L);
    return j;
}

inline json group_json(const GroupDesc& g) {
    json j;
    switch (g.kind) {
        case GroupDesc::UT:
            j["kind"] = "ut";
            j["A"] = mult_group_json(g.A);
            j["B"] = add_group_json(g.B);
            break;
        case GroupDesc::DihedralInf:
            j["kind"] = "dihedral";
            j["A"] = mult_group_json(g.A);
            break;
        case GroupDesc::SL2Full: j["kind"] = "sl2-full"; break;
        case GroupDesc::SL2ConstConj: j["kind"] = "sl2-constant-conjugate"; break;
        case GroupDesc::Classical:
            j["kind"] = "classical";
            j["label"] = g.classical_label;
            break;
    }
    return j;
}

inline json lambda_json(const LambdaDesc& l) {
    json j;
    switch (l.kind) {
        case LambdaDesc::Trivial: j["kind"] = "trivial"; break;
        case LambdaDesc::MuL:
            j["kind"] = "mu";
            j["l"] = l.l;
            break;
        case LambdaDesc::Multiplicative:
            j["kind"] = "multiplicative";
            j["operator"] = render_op_t(l.L);
            break;
        case LambdaDesc::Additive:
            j["kind"] = "additive";
            j["operator"] = render_op_t(l.L);
            break;
    }
    return j;
}

inline json hom_json(const HomDesc& h) {
    json j;
    switch (h.kind) {
        case HomDesc::Trivial: j["kind"] = "trivial"; break;
        case HomDesc::Power:
            j["kind"] = "power";
            j["m"] = h.m;
            break;
        case HomDesc::OpOnAdditive:
            j["kind"] = "op-on-additive";
            j["operator"] = render_op_t(h.L);
            break;
        case HomDesc::OpOnLogDeriv:
            j["kind"] = "op-on-logderiv";
            j["operator"] = render_op_t(h.L);
            break;
        case HomDesc::Component:
            j["kind"] = "component";
            j["order"] = h.order;
            break;
    }
    return j;
}

inline json trace_json(const Trace& t) {
    json stages = json::array();
    for (const StageTrace& s : t.stages) {
        json e;
        e["N"] = s.N;
        e["rows"] = s.rows;
        e["cols"] = s.cols;
        if (s.S != -2) e["S"] = s.S;
        if (s.T != -1) e["T"] = s.T;
        stages.push_back(std::move(e));
    }
    json params = json::object();
    for (const auto& [k, v] : t.params) params[k] = v;
    json out;
    out["stages"] = std::move(stages);
    out["params"] = std::move(params);
    return out;
}

// --- Certificate records ----------------------------------------------------
//
// Every certificate is a self-contained identity over Q(t)(x) that the
// verifier can replay from the strings alone.

inline json cert_telescoper_rational(const RationalCert& c) {
    json j;
    j["type"] = "telescoper-rational";
    j["eta"] = render_ratx(c.eta);
    j["operator"] = render_op_t(c.L);
    j["f"] = render_ratx(c.f);
    return j;
}

inline json cert_telescoper_exponential(const ExponentialCert& c) {
    json j;
    j["type"] = "telescoper-exponential";
    j["p"] = render_ratx(c.p);
    j["q"] = render_ratx(c.q);
    j["operator"] = render_op_t(c.L);
    j["h"] = render_ratx(c.h);
    return j;
}

inline json cert_intersection(const IntersectionResult& ir) {
    json j;
    j["type"] = "intersection";
    j["eta1"] = render_ratx(ir.c1.eta);
    j["eta2"] = render_ratx(ir.c2.eta);
    j["L1"] = render_op_t(ir.c1.L);
    j["L2"] = render_op_t(ir.c2.L);
    j["L1p"] = render_op_t(ir.L1p);
    j["L2p"] = render_op_t(ir.L2p);
    j["Lpp"] = render_op_t(ir.Lpp);
    j["f"] = render_ratx(ir.f);
    j["omega"] = ir.omega;
    j["swapped"] = ir.swapped;
    return j;
}

inline json cert_riccati(const RatX& u, const RatX& r) {
    json j;
    j["type"] = "riccati";
    j["u"] = render_ratx(u);
    j["r"] = render_ratx(r);
    return j;
}

inline json cert_log_derivative(int n, const RatX& u, const RatX& g) {
    json j;
    j["type"] = "log-derivative";
    j["n"] = n;
    j["u"] = render_ratx(u);
    j["g"] = render_ratx(g);
    return j;
}

inline json cert_dreyfus(const RatX& r, const RatX& Y) {
    json j;
    j["type"] = "dreyfus";
    j["r"] = render_ratx(r);
    j["Y"] = render_ratx(Y);
    return j;
}

inline json cert_discriminant(const RatX& r, const RatX& phi, const RatX& w, char sign) {
    json j;
    j["type"] = "discriminant";
    j["r"] = render_ratx(r);
    j["phi"] = render_ratx(phi);
    j["w"] = render_ratx(w);
    j["sign"] = std::string(1, sign);
    return j;
}

inline json cert_integer_relation(const RatX& u, const RatX& r1, const IntegerRelation& rel) {
    json j;
    j["type"] = "integer-relation";
    j["u"] = render_ratx(u);
    j["r1"] = render_ratx(r1);
    j["m1"] = rel.m1;
    j["m2"] = rel.m2;
    j["f"] = render_ratx(rel.f);
    return j;
}

inline json cert_power(const RatX& g, int l, const RatX& h) {
    json j;
    j["type"] = "power";
    j["g"] = render_ratx(g);
    j["l"] = l;
    j["h"] = render_ratx(h);
    return j;
}

inline json cert_rational_solution(const std::vector<RatX>& coeffs, const RatX& rhs,
                                   const RatX& Y) {
    json j;
    j["type"] = "rational-solution";
    json cs = json::array();
    for (const RatX& c : coeffs) cs.push_back(render_ratx(c));
    j["coeffs"] = std::move(cs);
    j["rhs"] = render_ratx(rhs);
    j["Y"] = render_ratx(Y);
    return j;
}

// --- Verification -----------------------------------------------------------

struct VerifyReport {
    bool ok = true;
    std::vector<std::string> notes;
};

/// Replay every certificate identity from its serialized strings with fresh
/// arithmetic. Structural claims that have no witness (minimality, absence of
/// solutions) are covered by the test suite, not here.
inline VerifyReport verify_document(const json& doc) {
    VerifyReport rep;
    if (!doc.contains("certificates") || !doc["certificates"].is_array()) {
        rep.ok = false;
        rep.notes.push_back("document has no certificate array");
        return rep;
    }
    const json& certs = doc["certificates"];
    if (certs.empty()) {
        rep.notes.push_back("no certificates present; nothing was verified");
        return rep;
    }
    auto sx = [](const json& v) { return parse_ratx(v.get<std::string>()); };
    auto sop = [](const json& v) { return parse_op_t(v.get<std::string>()); };
    int idx = 0;
    for (const json& c : certs) {
        std::string where = "certificate " + std::to_string(idx);
        ++idx;
        try {
            std::string type = c.at("type").get<std::string>();
            bool good = false;
            if (type == "telescoper-rational") {
                RationalCert rc;
                rc.eta = sx(c.at("eta"));
                rc.L = sop(c.at("operator"));
                rc.f = sx(c.at("f"));
                good = !rc.L.is_zero_op() && rc.L.lc() == RatT(Rat(1)) && check_rational_cert(rc);
            } else if (type == "telescoper-exponential") {
                ExponentialCert ec;
                ec.p = sx(c.at("p"));
                ec.q = sx(c.at("q"));
                ec.L = sop(c.at("operator"));
                ec.h = sx(c.at("h"));
                good = !ec.L.is_zero_op() && ec.L.lc() == RatT(Rat(1)) &&
                       deriv_t(ec.p) == deriv_x(ec.q) && check_exponential_cert(ec);
            } else if (type == "intersection") {
                RatX eta1 = sx(c.at("eta1")), eta2 = sx(c.at("eta2")), f = sx(c.at("f"));
                OpT L1 = sop(c.at("L1")), L2 = sop(c.at("L2"));
                OpT L1p = sop(c.at("L1p")), L2p = sop(c.at("L2p")), Lpp = sop(c.at("Lpp"));
                int omega = c.at("omega").get<int>();
                good = !L1p.is_zero_op() && L1p.lc() == RatT(Rat(1)) && L1p.ord() == omega &&
                       apply_t(L1p, eta1) - apply_t(L2p, eta2) - deriv_x(f) == RatX();
                if (good) {
                    auto [q, r] = right_divide(L1, L1p);
                    good = r.is_zero_op() && q == Lpp;
                }
                if (good && !L2p.is_zero_op()) good = monic(Lpp * L2p) == L2;
            } else if (type == "riccati") {
                RatX u = sx(c.at("u")), r = sx(c.at("r"));
                good = deriv_x(u) + u * u - r == RatX();
            } else if (type == "log-derivative") {
                int n = c.at("n").get<int>();
                RatX u = sx(c.at("u")), g = sx(c.at("g"));
                good = n >= 1 && !g.is_zero_f() && deriv_x(g) / g == ratx(n) * u;
            } else if (type == "dreyfus") {
                RatX r = sx(c.at("r")), Y = sx(c.at("Y"));
                RatX lhs = deriv_x(deriv_x(deriv_x(Y))) - ratx(4) * r * deriv_x(Y) -
                           ratx(2) * deriv_x(r) * Y;
                good = lhs + ratx(2) * deriv_t(r) == RatX();
            } else if (type == "discriminant") {
                RatX r = sx(c.at("r")), phi = sx(c.at("phi")), w = sx(c.at("w"));
                std::string sign = c.at("sign").get<std::string>();
                good = (sign == "+" || sign == "-") && !w.is_zero_f();
                if (good) {
                    RatX expected = (sign == "+")
                                        ? ratx(4) * r - ratx(2) * deriv_x(phi) - phi * phi
                                        : ratx(4) * r + ratx(2) * deriv_x(phi) - phi * phi;
                    good = w == expected && deriv_x(w) - ratx(2) * phi * w == RatX() &&
                           ratx(1, 4) * w + ratx(1, 4) * phi * phi -
                                   ratx(1, 2) * deriv_x(phi) - r ==
                               RatX();
                }
            } else if (type == "integer-relation") {
                RatX u = sx(c.at("u")), r1 = sx(c.at("r1")), f = sx(c.at("f"));
                long m1 = c.at("m1").get<long>(), m2 = c.at("m2").get<long>();
                good = m1 >= 1 && !f.is_zero_f() &&
                       deriv_x(f) / f == ratx(m1) * u - ratx(m2, 2) * r1;
            } else if (type == "power") {
                RatX g = sx(c.at("g")), h = sx(c.at("h"));
                int l = c.at("l").get<int>();
                good = l >= 2 && !g.is_zero_f() && !h.is_zero_f() &&
                       is_constant_x(g / powx(h, l));
            } else if (type == "rational-solution") {
                std::vector<RatX> coeffs;
                for (const json& e : c.at("coeffs")) coeffs.push_back(sx(e));
                RatX rhs = sx(c.at("rhs")), Y = sx(c.at("Y"));
                good = apply_x(coeffs, Y) - rhs == RatX();
            } else {
                rep.ok = false;
                rep.notes.push_back(where + " has unknown type '" + type + "'");
                continue;
            }
            if (!good) {
                rep.ok = false;
                rep.notes.push_back(where + " (" + type + ") failed to verify");
            }
        } catch (const std::exception& e) {
            rep.ok = false;
            rep.notes.push_back(where + " is malformed: " + e.what());
        }
    }
    return rep;
}

// --- Request handling -------------------------------------------------------

namespace detail {

inline Options options_from(const json& req) {
    Options o;
    if (!req.contains("options")) return o;
    const json& j = req["options"];
    if (j.contains("nmax")) o.nmax = j["nmax"].get<int>();
    if (j.contains("mmax")) o.mmax = j["mmax"].get<int>();
    if (j.contains("optimize_squarefree")) o.optimize_squarefree = j["optimize_squarefree"].get<bool>();
    return o;
}

inline RatX need_expr(const json& in, const std::string& key) {
    if (!in.contains(key) || !in[key].is_string())
        fail("input", "missing required input expression '" + key + "'");
    return parse_ratx(in[key].get<std::string>());
}

inline RiccatiData riccati_from(const json& j) {
    RiccatiData d;
    if (j.contains("u")) {
        d.kind = RiccatiData::U;
        d.value = parse_ratx(j["u"].get<std::string>());
    } else if (j.contains("phi")) {
        d.kind = RiccatiData::Phi;
        d.value = parse_ratx(j["phi"].get<std::string>());
    } else if (j.contains("label")) {
        d.kind = RiccatiData::Finite;
        std::string name = j["label"].get<std::string>();
        auto lab = classical_label_from(name);
        if (!lab || *lab == ClassicalLabel::Connected)
            fail("input", "label must name a finite classical group, got '" + name + "'");
        d.label = *lab;
        if (d.label == ClassicalLabel::CyclicUT) {
            if (!j.contains("n")) fail("input", "cyclic label needs its order n");
            d.cyclic_n = j["n"].get<int>();
            if (d.cyclic_n < 1) fail("input", "cyclic order must be positive");
        }
        if (j.contains("witnesses"))
            for (const json& w : j["witnesses"])
                d.witnesses.push_back(
                    {w.at("l").get<int>(), parse_ratx(w.at("gamma").get<std::string>())});
    } else if (j.contains("sl2") && j["sl2"].is_boolean() && j["sl2"].get<bool>()) {
        d.kind = RiccatiData::Sl2;
    } else {
        fail("input", "riccati data must provide one of u, phi, label, or sl2");
    }
    return d;
}

inline json riccati_echo(const RiccatiData& d) {
    json j;
    switch (d.kind) {
        case RiccatiData::U: j["u"] = render_ratx(d.value); break;
        case RiccatiData::Phi: j["phi"] = render_ratx(d.value); break;
        case RiccatiData::Sl2: j["sl2"] = true; break;
        case RiccatiData::Finite: {
            j["label"] = classical_label_name(d.label);
            if (d.label == ClassicalLabel::CyclicUT) j["n"] = d.cyclic_n;
            json ws = json::array();
            for (const SubfieldWitness& w : d.witnesses) {
                json e;
                e["l"] = w.l;
                e["gamma"] = render_ratx(w.gamma);
                ws.push_back(std::move(e));
            }
            j["witnesses"] = std::move(ws);
            break;
        }
    }
    return j;
}

inline void push_ut_certs(json& certs, const UTResult& g) {
    certs.push_back(cert_riccati(g.u, g.r));
    if (g.cyclic) certs.push_back(cert_log_derivative(g.cyclic->first, g.u, g.cyclic->second));
    if (g.a_cert) certs.push_back(cert_telescoper_rational(*g.a_cert));
    if (g.b_classical_witness)
        certs.push_back(cert_rational_solution({ratx(-2) * g.u, ratx(1)}, ratx(1),
                                               *g.b_classical_witness));
    if (g.b_rational) certs.push_back(cert_telescoper_rational(*g.b_rational));
    if (g.b_exponential) certs.push_back(cert_telescoper_exponential(*g.b_exponential));
}

inline void push_dihedral_certs(json& certs, const DihedralResult& g) {
    certs.push_back(cert_discriminant(g.r, g.phi, g.w, g.sign));
    if (g.a_cert) certs.push_back(cert_telescoper_exponential(*g.a_cert));
}

inline void push_intersection_certs(json& certs, const IntersectionResult& ir) {
    certs.push_back(cert_telescoper_rational(ir.c1));
    certs.push_back(cert_telescoper_rational(ir.c2));
    certs.push_back(cert_intersection(ir));
}

}  // namespace detail

/// Execute one request and assemble the output document, self-verifying the
/// certificates before returning.
inline json run_document(const json& request) {
    if (!request.contains("mode") || !request["mode"].is_string())
        fail("input", "request needs a string 'mode'");
    std::string mode = request["mode"].get<std::string>();
    Options opts = detail::options_from(request);
    const json in = request.contains("inputs") ? request["inputs"] : json::object();

    json inputs = json::object();
    json result = json::object();
    json certs = json::array();
    json trace = json::object();

    if (mode == "telescope-rational") {
        RatX eta = detail::need_expr(in, "eta");
        RationalCert c = primitive_of_rational(eta, opts);
        inputs["eta"] = render_ratx(eta);
        result["operator"] = render_op_t(c.L);
        result["order"] = c.L.ord();
        result["f"] = render_ratx(c.f);
        certs.push_back(cert_telescoper_rational(c));
        trace = trace_json(c.trace);
    } else if (mode == "telescope-exponential") {
        RatX p = detail::need_expr(in, "p");
        RatX q = detail::need_expr(in, "q");
        ExponentialCert c = primitive_of_exponential(p, q, opts);
        inputs["p"] = render_ratx(p);
        inputs["q"] = render_ratx(q);
        result["operator"] = render_op_t(c.L);
        result["order"] = c.L.ord();
        result["h"] = render_ratx(c.h);
        certs.push_back(cert_telescoper_exponential(c));
        trace = trace_json(c.trace);
    } else if (mode == "intersect") {
        RatX eta1 = detail::need_expr(in, "eta1");
        RatX eta2 = detail::need_expr(in, "eta2");
        IntersectionResult ir = intersect_primitives(eta1, eta2, opts);
        inputs["eta1"] = render_ratx(eta1);
        inputs["eta2"] = render_ratx(eta2);
        result["L1"] = render_op_t(ir.c1.L);
        result["L2"] = render_op_t(ir.c2.L);
        result["L1p"] = render_op_t(ir.L1p);
        result["L2p"] = render_op_t(ir.L2p);
        result["Lpp"] = render_op_t(ir.Lpp);
        result["f"] = render_ratx(ir.f);
        result["omega"] = ir.omega;
        result["swapped"] = ir.swapped;
        detail::push_intersection_certs(certs, ir);
        trace = trace_json(ir.trace);
    } else if (mode == "group-ut") {
        RatX u = detail::need_expr(in, "u");
        RatX r = detail::need_expr(in, "r");
        UTResult g = upper_triangular_group(u, r, opts);
        inputs["u"] = render_ratx(u);
        inputs["r"] = render_ratx(r);
        result["group"] = group_json(GroupDesc::ut(g.A, g.B));
        detail::push_ut_certs(certs, g);
        trace["route"] = g.cyclic ? "finite-diagonal" : "connected-diagonal";
    } else if (mode == "group-dihedral") {
        RatX r = detail::need_expr(in, "r");
        RatX phi = detail::need_expr(in, "phi");
        DihedralResult g = dihedral_group(r, phi, opts);
        inputs["r"] = render_ratx(r);
        inputs["phi"] = render_ratx(phi);
        result["group"] = group_json(GroupDesc::dihedral(g.A));
        detail::push_dihedral_certs(certs, g);
        trace["sign"] = std::string(1, g.sign);
        trace["route"] = g.a_cert ? "parameterized-discriminant" : "constant-discriminant";
    } else if (mode == "dreyfus") {
        RatX r = detail::need_expr(in, "r");
        DreyfusResult d = dreyfus_test(r);
        inputs["r"] = render_ratx(r);
        result["constant_conjugate"] = d.constant_conjugate;
        result["group"] = group_json(d.constant_conjugate ? GroupDesc::sl2_const_conj()
                                                          : GroupDesc::sl2_full());
        if (d.constant_conjugate) {
            result["Y"] = render_ratx(d.Y);
            certs.push_back(cert_dreyfus(r, d.Y));
        }
    } else if (mode == "group-recover") {
        RatX r1 = detail::need_expr(in, "r1");
        RatX r2 = detail::need_expr(in, "r2");
        if (!in.contains("riccati") || !in["riccati"].is_object())
            fail("input", "group-recover needs a riccati object describing the normalized group");
        RiccatiData data = detail::riccati_from(in["riccati"]);
        RecoverResult rr = recover_original(r1, r2, data, opts);
        inputs["r1"] = render_ratx(r1);
        inputs["r2"] = render_ratx(r2);
        inputs["riccati"] = detail::riccati_echo(data);
        result["r"] = render_ratx(rr.r);
        result["D"] = group_json(rr.D);
        result["E"] = mult_group_json(rr.E);
        result["lambda"] = lambda_json(rr.lambda);
        result["phi"] = hom_json(rr.phi);
        result["psi"] = hom_json(rr.psi);
        result["nu"] = rr.nu;
        if (rr.ut) detail::push_ut_certs(certs, *rr.ut);
        if (rr.dihedral) detail::push_dihedral_certs(certs, *rr.dihedral);
        if (rr.dreyfus && rr.dreyfus->constant_conjugate)
            certs.push_back(cert_dreyfus(rr.r, rr.dreyfus->Y));
        if (rr.e_cyclic)
            certs.push_back(
                cert_log_derivative(rr.e_cyclic->first, ratx(-1, 2) * r1, rr.e_cyclic->second));
        if (rr.e_cert) certs.push_back(cert_telescoper_rational(*rr.e_cert));
        if (rr.relation) certs.push_back(cert_integer_relation(data.value, r1, *rr.relation));
        if (rr.common) detail::push_intersection_certs(certs, *rr.common);
        if (rr.finite && rr.finite->l > 1 && rr.finite->j && rr.gammaD && rr.e_cyclic) {
            RatX prod = *rr.gammaD * powx(rr.e_cyclic->second, -*rr.finite->j);
            auto h = ppv::detail::lth_power_core(prod, rr.finite->l);
            require_internal(h.has_value(), "matched subfields lost their power witness");
            certs.push_back(cert_power(prod, rr.finite->l, *h));
        }
        json tr;
        switch (data.kind) {
            case RiccatiData::U: tr = "triangular"; break;
            case RiccatiData::Phi: tr = "dihedral"; break;
            case RiccatiData::Sl2: tr = "irreducible"; break;
            case RiccatiData::Finite: tr = "finite"; break;
        }
        trace["route"] = tr;
        trace["e_finite"] = rr.e_cyclic.has_value();
    } else {
        fail("input", "unknown mode '" + mode + "'");
    }

    json doc;
    doc["mode"] = mode;
    doc["inputs"] = inputs;
    doc["result"] = result;
    doc["certificates"] = certs;
    doc["trace"] = trace;
    doc["schema"] = "1";
    VerifyReport rep = verify_document(doc);
    require_internal(rep.ok, "assembled document failed self-verification");
    return doc;
}

}  // namespace ppv
