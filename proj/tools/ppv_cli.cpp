#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppv/jsonio.hpp"

using ppv::json;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) ppv::fail("input", "cannot read '" + path + "'");
    try {
        return json::parse(is);
    } catch (const std::exception& e) {
        ppv::fail("parse", "invalid JSON in '" + path + "': " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Parameterized differential Galois groups of first- and second-order operators "
        "over Q(t)(x), with machine-checkable certificates"};
    std::string mode, input_file, output_file;
    std::vector<std::string> exprs, witnesses;
    std::string ric_u, ric_phi, ric_label;
    int ric_n = 0;
    bool ric_sl2 = false;
    int nmax = -1, mmax = -1;
    bool optimize_squarefree = false;

    app.add_option("mode", mode,
                   "telescope-rational | telescope-exponential | intersect | group-ut | "
                   "group-dihedral | dreyfus | group-recover | verify")
        ->required();
    app.add_option("--input", input_file,
                   "JSON file with inputs/options (a full output document for verify)");
    app.add_option("--expr", exprs, "named input expression NAME=EXPR (repeatable)");
    app.add_option("--riccati-u", ric_u, "rational Riccati solution for group-recover");
    app.add_option("--riccati-phi", ric_phi, "Riccati trace for group-recover (dihedral case)");
    app.add_flag("--riccati-sl2", ric_sl2, "declare the normalized group irreducible SL2-type");
    app.add_option("--riccati-label", ric_label,
                   "finite classical label for group-recover (dihedral, S4, A4, A5, cyclic)");
    app.add_option("--riccati-n", ric_n, "cyclic order for --riccati-label cyclic");
    app.add_option("--riccati-witness", witnesses,
                   "subfield witness L:GAMMA for group-recover (repeatable)");
    app.add_option("--nmax", nmax, "cap on cyclic orders reported by the log-derivative test");
    app.add_option("--mmax", mmax, "cap on the integer-relation search");
    app.add_flag("--optimize-squarefree", optimize_squarefree,
                 "clear stage systems by exact denominator lcms instead of kernel powers");
    app.add_option("--output", output_file, "write the document here instead of stdout");
    CLI11_PARSE(app, argc, argv);

    try {
        if (mode == "verify") {
            if (input_file.empty()) ppv::fail("input", "verify needs --input FILE");
            json doc = load_json_file(input_file);
            ppv::VerifyReport rep = ppv::verify_document(doc);
            for (const std::string& n : rep.notes)
                std::cerr << (rep.ok ? "warning: " : "note: ") << n << "\n";
            std::cout << (rep.ok ? "verified" : "verification failed") << "\n";
            return rep.ok ? 0 : 2;
        }

        json req = input_file.empty() ? json::object() : load_json_file(input_file);
        req["mode"] = mode;
        if (!req.contains("inputs")) req["inputs"] = json::object();
        for (const std::string& e : exprs) {
            auto pos = e.find('=');
            if (pos == std::string::npos) ppv::fail("input", "--expr needs NAME=EXPR");
            req["inputs"][e.substr(0, pos)] = e.substr(pos + 1);
        }
        json ric = req["inputs"].contains("riccati") ? req["inputs"]["riccati"] : json::object();
        if (!ric_u.empty()) ric["u"] = ric_u;
        if (!ric_phi.empty()) ric["phi"] = ric_phi;
        if (ric_sl2) ric["sl2"] = true;
        if (!ric_label.empty()) ric["label"] = ric_label;
        if (ric_n > 0) ric["n"] = ric_n;
        if (!witnesses.empty()) {
            json ws = ric.contains("witnesses") ? ric["witnesses"] : json::array();
            for (const std::string& w : witnesses) {
                auto pos = w.find(':');
                if (pos == std::string::npos)
                    ppv::fail("input", "--riccati-witness needs L:GAMMA");
                json entry;
                entry["l"] = std::stoi(w.substr(0, pos));
                entry["gamma"] = w.substr(pos + 1);
                ws.push_back(std::move(entry));
            }
            ric["witnesses"] = std::move(ws);
        }
        if (!ric.empty()) req["inputs"]["riccati"] = std::move(ric);
        if (nmax > 0 || mmax > 0 || optimize_squarefree) {
            json o = req.contains("options") ? req["options"] : json::object();
            if (nmax > 0) o["nmax"] = nmax;
            if (mmax > 0) o["mmax"] = mmax;
            if (optimize_squarefree) o["optimize_squarefree"] = true;
            req["options"] = std::move(o);
        }

        json doc = ppv::run_document(req);
        std::string text = doc.dump(2);
        if (!output_file.empty()) {
            std::ofstream os(output_file);
            if (!os) ppv::fail("input", "cannot write '" + output_file + "'");
            os << text << "\n";
        } else {
            std::cout << text << "\n";
        }
        return 0;
    } catch (const ppv::Error& e) {
        std::cerr << "error (" << e.code() << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
