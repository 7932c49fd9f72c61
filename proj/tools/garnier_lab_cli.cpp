// Command-line front end over the garnier_lab C interface.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "garnier_lab.h"

namespace {

using Json = nlohmann::json;

constexpr int kOk = 0, kDomain = 1, kUsage = 2;

struct Failure {
    int code;
    std::string message;
};

struct Run {
    std::string command;
    std::vector<std::string> inputs;
    Json tolerances = Json::object();
    Json pipeline = nullptr;
    std::string output;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{kUsage, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{kDomain, "cannot write " + path};
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

// 64-bit FNV-1a, enough to identify inputs in the audit trail
std::string fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void check(gl_status s) {
    if (s != GL_OK) throw Failure{kDomain, std::string(gl_status_name(s)) + ": " + gl_last_error()};
}

// Owns a string returned by the library.
struct Text {
    char* p = nullptr;
    ~Text() { gl_free_string(p); }
    std::string str() const { return p ? p : ""; }
};

struct System {
    gl_system* p = nullptr;
    ~System() { gl_system_free(p); }
};

struct Monodromy {
    gl_monodromy* p = nullptr;
    ~Monodromy() { gl_monodromy_free(p); }
};

struct State {
    gl_state* p = nullptr;
    ~State() { gl_state_free(p); }
};

std::string schema_of(const std::string& text) {
    try {
        auto j = Json::parse(text);
        return j.is_object() ? j.value("schema", std::string()) : std::string();
    } catch (const Json::exception& e) {
        throw Failure{kDomain, std::string("malformed JSON: ") + e.what()};
    }
}

double require_tol(double tol, const char* name) {
    if (!(tol > 0.0) || tol >= 1.0) throw Failure{kUsage, std::string(name) + " must lie in (0, 1)"};
    return tol;
}

System load_system(Run& run, const std::string& path) {
    const auto text = read_file(path);
    run.inputs.push_back(text);
    System s;
    check(gl_system_from_json(text.c_str(), &s.p));
    return s;
}

Json cx_pair(const std::vector<double>& v, std::size_t i) { return Json::array({v.at(i), v.size() > i + 1 ? v[i + 1] : 0.0}); }

void append_audit(const std::string& path, const Run& run, int code, const std::string& message) {
    if (path.empty()) return;
    std::string joined;
    for (const auto& s : run.inputs) joined += fnv1a(s);
    Json rec{{"schema", "audit-v1"},
             {"timestamp", std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count()},
             {"command", run.command},
             {"input_hash", fnv1a(joined)},
             {"tolerances", run.tolerances},
             {"versions", {{"library", gl_version()}, {"cli", "garnier_lab_cli 1.0.0"}}},
             {"threads", gl_threads()},
             {"exit_code", code}};
    if (!message.empty()) rec["error"] = message;
    if (!run.pipeline.is_null()) rec["pipeline"] = run.pipeline;
    std::ofstream out(path, std::ios::app);
    if (out) out << rec.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* t = std::getenv("GARNIER_LAB_THREADS")) {
        const int n = std::atoi(t);
        if (n > 0) gl_set_threads(n);
    }

    CLI::App app{"Fuchsian systems, isomonodromic deformations and classical Painleve VI solutions"};
    app.require_subcommand(1);
    std::string audit_path = "garnier_lab_audit.jsonl";
    app.add_option("--audit", audit_path, "audit log file (JSON lines, appended)");
    std::string out_path;
    Run run;

    // validate
    auto* validate = app.add_subcommand("validate", "check the structural constraints of a fuchsian-v1 system");
    std::string sys_path;
    double tol = 1e-10;
    validate->add_option("system", sys_path, "fuchsian-v1 file")->required();
    validate->add_option("--tol", tol, "constraint tolerance");
    validate->add_option("-o,--output", out_path);

    // monodromy
    auto* mono = app.add_subcommand("monodromy", "monodromy matrices with relation residuals");
    double mono_tol = 1e-10;
    mono->add_option("system", sys_path, "fuchsian-v1 file")->required();
    mono->add_option("--tol", mono_tol, "integrator relative tolerance");
    mono->add_option("-o,--output", out_path);

    // classify
    auto* classify = app.add_subcommand("classify", "reducibility of the monodromy group");
    std::string in_path;
    double class_tol = 1e-6;
    classify->add_option("input", in_path, "monodromy-v1 or fuchsian-v1 file")->required();
    classify->add_option("--tol", class_tol, "invariant-line tolerance");
    classify->add_option("-o,--output", out_path);

    // deform
    auto* deform = app.add_subcommand("deform", "Schlesinger flow along a path");
    std::string path_path, report_path;
    double flow_tol = 1e-11;
    bool verify = false;
    deform->add_option("system", sys_path, "fuchsian-v1 file")->required();
    deform->add_option("--path", path_path, "path-v1 file")->required();
    deform->add_option("--tol", flow_tol, "integrator relative tolerance");
    deform->add_flag("--verify", verify, "compare monodromy before and after");
    deform->add_option("-o,--output", out_path);
    deform->add_option("--report", report_path);

    // garnier-flow
    auto* gflow = app.add_subcommand("garnier-flow", "Garnier Hamiltonian flow along a path");
    int samples = 0;
    std::string traj_path;
    gflow->add_option("input", in_path, "garnier-state-v1 or fuchsian-v1 file")->required();
    gflow->add_option("--path", path_path, "path-v1 file")->required();
    gflow->add_option("--tol", flow_tol, "integrator relative tolerance");
    gflow->add_option("--samples", samples, "interior trajectory points");
    gflow->add_option("--trajectory", traj_path, "trajectory output file");
    gflow->add_option("-o,--output", out_path);

    // reduce
    auto* reduce = app.add_subcommand("reduce", "remove poles with identity monodromy, or the pole at infinity");
    std::vector<int> poles;
    int inf_pole = -1;
    reduce->add_option("system", sys_path, "fuchsian-v1 file")->required();
    auto* poles_opt = reduce->add_option("--poles", poles, "0-based pole indices with M_k = +-1");
    auto* inf_opt = reduce->add_option("--infinity", inf_pole, "move pole k to infinity, dropping infinity");
    poles_opt->excludes(inf_opt);
    reduce->add_option("-o,--output", out_path);
    reduce->add_option("--report", report_path, "audit records of the gauge pipeline");

    // extend
    auto* extend = app.add_subcommand("extend", "add a pole with identity monodromy and theta = -2");
    std::vector<double> u_new{0.5, 0.5}, fam{0.0, 0.0};
    int index = -1;
    extend->add_option("system", sys_path, "fuchsian-v1 file")->required();
    extend->add_option("--u", u_new, "new pole (re im)")->expected(1, 2);
    extend->add_option("--param", fam, "family parameter (re im)")->expected(1, 2);
    extend->add_option("--index", index, "slot of the new pole (0-based; default: before the last two poles)");
    extend->add_option("-o,--output", out_path);
    extend->add_option("--report", report_path);

    // triangularize
    auto* tri = app.add_subcommand("triangularize", "bring a reducible system to upper-triangular form");
    tri->add_option("system", sys_path, "fuchsian-v1 file")->required();
    tri->add_option("-o,--output", out_path);
    tri->add_option("--report", report_path);

    // classical
    auto* classical = app.add_subcommand("classical", "classical Painleve VI solutions");
    std::string family, request_path, csv_path;
    std::vector<double> theta, theta_im, mix, theta_inf, x0, f_init;
    int count = 20;
    bool force = false;
    classical->add_option("--family", family,
                          "reducible-riccati, chazy, riccati-type or lauricella-locus (with --request)");
    classical->add_option("--theta", theta, "theta_1 theta_2 theta_3 (at 0, x, 1)");
    classical->add_option("--theta-im", theta_im, "imaginary parts of theta");
    classical->add_option("--mix", mix, "mixing constant nu (re im)")->expected(1, 2);
    classical->add_option("--theta-inf", theta_inf, "theta_inf (re im), checked against the family")->expected(1, 2);
    classical->add_option("--x0", x0, "initial point of the Riccati-type flow (re im)")->expected(1, 2);
    classical->add_option("--f-init", f_init, "f(x0) for the Riccati-type flow (re im)")->expected(1, 2);
    classical->add_option("--count", count, "number of samples on [0.15, 0.85]");
    classical->add_option("--request", request_path, "JSON request instead of flags");
    classical->add_option("--csv", csv_path, "CSV output (default: stdout)");
    classical->add_option("-o,--output", out_path, "classical-v1 JSON output");
    classical->add_flag("--force", force, "export even if the residual exceeds the family tolerance");

    // verify-pvi
    auto* vpvi = app.add_subcommand("verify-pvi", "Painleve VI residual of sampled solutions");
    double pvi_tol = 1e-6;
    vpvi->add_option("input", in_path, "classical-v1 file or sample request")->required();
    vpvi->add_option("--tol", pvi_tol);
    vpvi->add_option("-o,--output", out_path);

    // symmetry
    auto* sym = app.add_subcommand("symmetry", "Garnier symmetries T_j and Okamoto transformations w_k");
    std::string op = "T";
    int which = 0;
    sym->add_option("input", in_path, "garnier-state-v1 (T) or {x, y, p, b} point (w)")->required();
    sym->add_option("--op", op, "T or w")->check(CLI::IsMember({"T", "w"}));
    sym->add_option("--which", which, "index of the transformation")->required();
    sym->add_option("-o,--output", out_path);

    // strata
    auto* strata = app.add_subcommand("strata", "membership of b in the parameter strata");
    std::vector<double> b, b_im;
    double int_tol = 1e-9;
    strata->add_option("--b", b, "b_1 .. b_4")->expected(4)->required();
    strata->add_option("--b-im", b_im, "imaginary parts")->expected(4);
    strata->add_option("--tol", int_tol, "integrality tolerance");
    strata->add_option("-o,--output", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e) == 0 ? kOk : kUsage;
        if (code != kOk) {
            for (int i = 1; i < argc; ++i) run.command += (i > 1 ? " " : "") + std::string(argv[i]);
            append_audit(audit_path, run, code, e.what());
        }
        return code;
    }

    int code = kOk;
    std::string message;
    try {
        if (*validate) {
            run.command = "validate";
            run.tolerances["constraint"] = tol;
            require_tol(tol, "--tol");
            auto s = load_system(run, sys_path);
            Text r;
            check(gl_system_validate(s.p, tol, &r.p));
            write_text(out_path, r.str());
            if (!Json::parse(r.str())["ok"].get<bool>()) {
                code = kDomain;
                message = "constraint violations";
            }
        } else if (*mono) {
            run.command = "monodromy";
            run.tolerances["integrator"] = mono_tol;
            require_tol(mono_tol, "--tol");
            auto s = load_system(run, sys_path);
            Monodromy m;
            check(gl_monodromy_compute(s.p, mono_tol, &m.p));
            Text j;
            check(gl_monodromy_to_json(m.p, &j.p));
            write_text(out_path, j.str());
        } else if (*classify) {
            run.command = "classify";
            run.tolerances["invariant_line"] = class_tol;
            require_tol(class_tol, "--tol");
            const auto text = read_file(in_path);
            run.inputs.push_back(text);
            Monodromy m;
            if (schema_of(text) == "fuchsian-v1") {
                System s;
                check(gl_system_from_json(text.c_str(), &s.p));
                check(gl_monodromy_compute(s.p, 1e-10, &m.p));
                run.tolerances["integrator"] = 1e-10;
            } else {
                check(gl_monodromy_from_json(text.c_str(), &m.p));
            }
            Text r;
            check(gl_monodromy_classify(m.p, class_tol, &r.p));
            write_text(out_path, r.str());
        } else if (*deform) {
            run.command = "deform";
            run.tolerances["integrator"] = flow_tol;
            require_tol(flow_tol, "--tol");
            auto s = load_system(run, sys_path);
            const auto path = read_file(path_path);
            run.inputs.push_back(path);
            System out;
            Text r;
            check(gl_schlesinger_deform(s.p, path.c_str(), flow_tol, verify ? 1 : 0, &out.p, &r.p));
            Text j;
            check(gl_system_to_json(out.p, &j.p));
            write_text(out_path, j.str());
            if (!report_path.empty()) write_text(report_path, r.str());
        } else if (*gflow) {
            run.command = "garnier-flow";
            run.tolerances["integrator"] = flow_tol;
            require_tol(flow_tol, "--tol");
            const auto text = read_file(in_path);
            run.inputs.push_back(text);
            State st;
            if (schema_of(text) == "fuchsian-v1") {
                System s;
                check(gl_system_from_json(text.c_str(), &s.p));
                check(gl_state_from_system(s.p, &st.p));
            } else {
                check(gl_state_from_json(text.c_str(), &st.p));
            }
            const auto path = read_file(path_path);
            run.inputs.push_back(path);
            State out;
            Text traj;
            check(gl_garnier_flow(st.p, path.c_str(), flow_tol, samples, &out.p, traj_path.empty() ? nullptr : &traj.p));
            Text j;
            check(gl_state_to_json(out.p, &j.p));
            write_text(out_path, j.str());
            if (!traj_path.empty()) write_text(traj_path, traj.str());
        } else if (*reduce) {
            run.command = "reduce";
            auto s = load_system(run, sys_path);
            System out;
            Text a;
            if (*inf_opt) {
                check(gl_reduce_infinity(s.p, inf_pole, &out.p, &a.p));
            } else {
                if (poles.empty()) throw Failure{kUsage, "reduce: give --poles or --infinity"};
                check(gl_reduce_poles(s.p, poles.data(), static_cast<int>(poles.size()), &out.p, &a.p));
            }
            run.pipeline = Json::parse(a.str());
            Text j;
            check(gl_system_to_json(out.p, &j.p));
            write_text(out_path, j.str());
            if (!report_path.empty()) write_text(report_path, a.str());
        } else if (*extend) {
            run.command = "extend";
            auto s = load_system(run, sys_path);
            System out;
            Text a;
            check(gl_extend(s.p, u_new.at(0), u_new.size() > 1 ? u_new[1] : 0.0, fam.at(0), fam.size() > 1 ? fam[1] : 0.0,
                            index, &out.p, &a.p));
            run.pipeline = Json::parse(a.str());
            Text j;
            check(gl_system_to_json(out.p, &j.p));
            write_text(out_path, j.str());
            if (!report_path.empty()) write_text(report_path, a.str());
        } else if (*tri) {
            run.command = "triangularize";
            auto s = load_system(run, sys_path);
            System out;
            Text r;
            check(gl_triangularize(s.p, &out.p, &r.p));
            run.pipeline = Json::parse(r.str())["audit"];
            Text j;
            check(gl_system_to_json(out.p, &j.p));
            write_text(out_path, j.str());
            if (!report_path.empty()) write_text(report_path, r.str());
        } else if (*classical) {
            run.command = "classical";
            Json q;
            if (!request_path.empty()) {
                const auto text = read_file(request_path);
                run.inputs.push_back(text);
                try {
                    q = Json::parse(text);
                } catch (const Json::exception& e) {
                    throw Failure{kDomain, std::string("malformed JSON: ") + e.what()};
                }
            }
            if (!family.empty()) q["family"] = family;
            if (!q.contains("family")) throw Failure{kUsage, "classical: --family is required"};
            if (!theta.empty()) {
                if (theta.size() != 3) throw Failure{kUsage, "classical: --theta takes three values"};
                if (!theta_im.empty() && theta_im.size() != 3) throw Failure{kUsage, "classical: --theta-im takes three values"};
                q["theta"] = Json::array();
                for (std::size_t i = 0; i < 3; ++i) q["theta"].push_back({theta[i], theta_im.empty() ? 0.0 : theta_im[i]});
            }
            if (!q.contains("theta")) throw Failure{kUsage, "classical: --theta is required"};
            if (!mix.empty()) q["mix"] = cx_pair(mix, 0);
            if (!theta_inf.empty()) q["theta_inf"] = cx_pair(theta_inf, 0);
            if (!x0.empty()) q["x0"] = cx_pair(x0, 0);
            if (!f_init.empty()) q["f_init"] = cx_pair(f_init, 0);
            if (!q.contains("samples")) q["count"] = count;
            if (force) q["force"] = true;
            run.inputs.push_back(q.dump());
            Text sol, csv;
            check(gl_classical(q.dump().c_str(), &sol.p, &csv.p));
            const auto j = Json::parse(sol.str());
            run.tolerances["family"] = j.value("tolerance", 0.0);
            if (!out_path.empty()) write_text(out_path, sol.str());
            write_text(csv_path, csv.str());
        } else if (*vpvi) {
            run.command = "verify-pvi";
            run.tolerances["pvi"] = pvi_tol;
            require_tol(pvi_tol, "--tol");
            const auto text = read_file(in_path);
            run.inputs.push_back(text);
            Text r;
            check(gl_verify_pvi(text.c_str(), pvi_tol, &r.p));
            write_text(out_path, r.str());
            if (!Json::parse(r.str())["pass"].get<bool>()) {
                code = kDomain;
                message = "residual above tolerance";
            }
        } else if (*sym) {
            run.command = "symmetry";
            const auto text = read_file(in_path);
            run.inputs.push_back(text);
            Json q;
            try {
                q = {{"op", op}, {"which", which}};
                const auto in = Json::parse(text);
                if (op == "T") {
                    q["state"] = in;
                } else {
                    for (const char* k : {"x", "y", "p", "b"}) q[k] = in.at(k);
                }
            } catch (const Json::exception& e) {
                throw Failure{kDomain, std::string("malformed JSON: ") + e.what()};
            }
            Text r;
            check(gl_symmetry(q.dump().c_str(), &r.p));
            write_text(out_path, r.str());
        } else if (*strata) {
            run.command = "strata";
            run.tolerances["integrality"] = int_tol;
            require_tol(int_tol, "--tol");
            double bb[8];
            for (int i = 0; i < 4; ++i) {
                bb[2 * i] = b[i];
                bb[2 * i + 1] = b_im.empty() ? 0.0 : b_im[i];
            }
            run.inputs.push_back(Json(std::vector<double>(bb, bb + 8)).dump());
            Text r;
            check(gl_strata(bb, int_tol, &r.p));
            write_text(out_path, r.str());
        }
    } catch (const Failure& f) {
        code = f.code;
        message = f.message;
        std::cerr << "error: " << f.message << '\n';
    }
    append_audit(audit_path, run, code, message);
    return code;
}
