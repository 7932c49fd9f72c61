#include "garnier_lab.h"

#include <atomic>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>

#include "garnier/classical.hpp"
#include "garnier/error.hpp"
#include "garnier/gauge.hpp"
#include "garnier/serialize.hpp"

struct gl_system {
    garnier::FuchsianSystem v;
};
struct gl_monodromy {
    garnier::MonodromyData v;
};
struct gl_state {
    garnier::GarnierState v;
};

namespace {

using namespace garnier;

thread_local std::string g_last_error;
std::atomic<int> g_threads{1};

gl_status status_of(ErrorCode c) {
    switch (c) {
        case ErrorCode::parameter: return GL_E_PARAMETER;
        case ErrorCode::degenerate: return GL_E_DEGENERATE;
        case ErrorCode::singular: return GL_E_SINGULAR;
        case ErrorCode::ill_conditioned: return GL_E_ILL_CONDITIONED;
        case ErrorCode::integration: return GL_E_INTEGRATION;
        case ErrorCode::branch: return GL_E_BRANCH;
        case ErrorCode::unsupported: return GL_E_UNSUPPORTED;
        case ErrorCode::inconsistent: return GL_E_INCONSISTENT;
        case ErrorCode::schema: return GL_E_SCHEMA;
    }
    return GL_E_INTERNAL;
}

struct NullArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

template <class F>
gl_status guard(F&& f) {
    g_last_error.clear();
    try {
        f();
        return GL_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const NullArgument& e) {
        g_last_error = e.what();
        return GL_E_NULL;
    } catch (const Json::exception& e) {
        g_last_error = std::string("malformed JSON: ") + e.what();
        return GL_E_SCHEMA;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return GL_E_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) throw NullArgument(std::string(what) + " is null");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void emit(char** out, const Json& j) {
    if (out) *out = dup(j.dump(2));
}

Json parse(const char* text) {
    need(text, "json input");
    return Json::parse(text);
}

MonodromyOptions monodromy_opts(double tol) {
    MonodromyOptions o;
    if (tol > 0.0) {
        o.ode.rtol = tol;
        o.ode.atol = tol * 1e-2;
    }
    o.threads = g_threads.load();
    return o;
}

GaugeOptions gauge_opts(AuditLog* log) {
    GaugeOptions o;
    o.audit = log;
    o.monodromy.threads = g_threads.load();
    return o;
}

std::vector<cx> samples_from(const Json& j) {
    std::vector<cx> xs;
    for (const auto& x : j) xs.push_back(cx_from_json(x));
    return xs;
}

}  // namespace

extern "C" {

const char* gl_version(void) { return "garnier_lab 1.0.0"; }

const char* gl_status_name(gl_status s) {
    switch (s) {
        case GL_OK: return "ok";
        case GL_E_PARAMETER: return "parameter";
        case GL_E_DEGENERATE: return "degenerate";
        case GL_E_SINGULAR: return "singular";
        case GL_E_ILL_CONDITIONED: return "ill_conditioned";
        case GL_E_INTEGRATION: return "integration";
        case GL_E_BRANCH: return "branch";
        case GL_E_UNSUPPORTED: return "unsupported";
        case GL_E_INCONSISTENT: return "inconsistent";
        case GL_E_SCHEMA: return "schema";
        case GL_E_NULL: return "null";
        case GL_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* gl_last_error(void) { return g_last_error.c_str(); }

void gl_free_string(char* s) { std::free(s); }

void gl_set_threads(int threads) { g_threads = threads < 1 ? 1 : threads; }

int gl_threads(void) { return g_threads.load(); }

gl_status gl_system_from_json(const char* json, gl_system** out) {
    return guard([&] {
        need(out, "out");
        auto s = fuchsian_from_json(parse(json));
        *out = new gl_system{std::move(s)};
    });
}

gl_status gl_system_to_json(const gl_system* sys, char** json) {
    return guard([&] {
        need(sys, "system");
        need(json, "out");
        emit(json, to_json(sys->v));
    });
}

void gl_system_free(gl_system* sys) { delete sys; }

gl_status gl_system_validate(const gl_system* sys, double tol, char** report) {
    return guard([&] {
        need(sys, "system");
        auto r = to_json(validate(sys->v, tol > 0.0 ? tol : 1e-10));
        r["tolerance"] = tol > 0.0 ? tol : 1e-10;
        emit(report, r);
    });
}

gl_status gl_monodromy_compute(const gl_system* sys, double tol, gl_monodromy** out) {
    return guard([&] {
        need(sys, "system");
        need(out, "out");
        auto m = compute_monodromy(sys->v, monodromy_opts(tol));
        *out = new gl_monodromy{std::move(m)};
    });
}

gl_status gl_monodromy_from_json(const char* json, gl_monodromy** out) {
    return guard([&] {
        need(out, "out");
        *out = new gl_monodromy{monodromy_from_json(parse(json))};
    });
}

gl_status gl_monodromy_to_json(const gl_monodromy* m, char** json) {
    return guard([&] {
        need(m, "monodromy");
        need(json, "out");
        auto j = to_json(m->v);
        j["relations"] = to_json(check_relations(m->v));
        emit(json, j);
    });
}

void gl_monodromy_free(gl_monodromy* m) { delete m; }

gl_status gl_monodromy_classify(const gl_monodromy* m, double tol, char** report) {
    return guard([&] {
        need(m, "monodromy");
        const double t = tol > 0.0 ? tol : 1e-6;
        auto j = to_json(classify_group(m->v, t));
        j["tolerance"] = t;
        emit(report, j);
    });
}

gl_status gl_schlesinger_deform(const gl_system* sys, const char* path_json, double tol, int verify, gl_system** out,
                                char** report) {
    return guard([&] {
        need(sys, "system");
        need(out, "out");
        auto path = path_from_json(parse(path_json));
        FlowOptions fo;
        if (tol > 0.0) {
            fo.ode.rtol = tol;
            fo.ode.atol = tol * 1e-2;
        }
        auto r = schlesinger_flow(sys->v, path, fo);
        Json j{{"steps", r.steps}, {"warnings", r.warnings}, {"tolerance", fo.ode.rtol}};
        if (verify) {
            auto iso = verify_flow_isomonodromy(sys->v, r, path, monodromy_opts(tol > 0.0 ? std::min(tol, 1e-10) : 1e-10));
            j["isomonodromy_deviation"] = iso.deviation;
        }
        *out = new gl_system{std::move(r.system)};
        emit(report, j);
    });
}

gl_status gl_state_from_system(const gl_system* sys, gl_state** out) {
    return guard([&] {
        need(sys, "system");
        need(out, "out");
        *out = new gl_state{garnier_state(sys->v)};
    });
}

gl_status gl_state_from_json(const char* json, gl_state** out) {
    return guard([&] {
        need(out, "out");
        *out = new gl_state{garnier_state_from_json(parse(json))};
    });
}

gl_status gl_state_to_json(const gl_state* s, char** json) {
    return guard([&] {
        need(s, "state");
        need(json, "out");
        emit(json, to_json(s->v));
    });
}

void gl_state_free(gl_state* s) { delete s; }

gl_status gl_garnier_flow(const gl_state* s, const char* path_json, double tol, int samples, gl_state** out,
                          char** trajectory) {
    return guard([&] {
        need(s, "state");
        need(out, "out");
        auto path = path_from_json(parse(path_json));
        GarnierFlowOptions o;
        if (tol > 0.0) {
            o.ode.rtol = tol;
            o.ode.atol = tol * 1e-2;
        }
        o.samples = samples > 0 ? samples : 0;
        o.record = trajectory != nullptr;
        auto r = garnier_flow(s->v, path, o);
        if (trajectory) {
            Json t = Json::array();
            for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
                auto e = to_json(r.trajectory[i]);
                e["t"] = r.t[i];
                t.push_back(e);
            }
            emit(trajectory, Json{{"tolerance", o.ode.rtol}, {"steps", r.steps}, {"trajectory", t}});
        }
        *out = new gl_state{std::move(r.state)};
    });
}

gl_status gl_reduce_poles(const gl_system* sys, const int* poles, int count, gl_system** out, char** audit) {
    return guard([&] {
        need(sys, "system");
        need(out, "out");
        if (count > 0) need(poles, "poles");
        AuditLog log;
        auto r = reduce_identity_poles(sys->v, std::vector<int>(poles, poles + std::max(count, 0)), gauge_opts(&log));
        *out = new gl_system{std::move(r)};
        emit(audit, to_json(log));
    });
}

gl_status gl_reduce_infinity(const gl_system* sys, int pole, gl_system** out, char** audit) {
    return guard([&] {
        need(sys, "system");
        need(out, "out");
        AuditLog log;
        *out = new gl_system{reduce_infinity(sys->v, pole, gauge_opts(&log))};
        emit(audit, to_json(log));
    });
}

gl_status gl_extend(const gl_system* sys, double u_re, double u_im, double f_re, double f_im, int index,
                    gl_system** out, char** audit) {
    return guard([&] {
        need(sys, "system");
        need(out, "out");
        AuditLog log;
        *out = new gl_system{
            extend_with_identity_pole(sys->v, cx(u_re, u_im), cx(f_re, f_im), index, gauge_opts(&log))};
        emit(audit, to_json(log));
    });
}

gl_status gl_shift_theta(const gl_system* sys, int pole, int n, gl_system** out, char** audit) {
    return guard([&] {
        need(sys, "system");
        need(out, "out");
        AuditLog log;
        *out = new gl_system{shift_theta(sys->v, pole, n, gauge_opts(&log))};
        emit(audit, to_json(log));
    });
}

gl_status gl_triangularize(const gl_system* sys, gl_system** out, char** report) {
    return guard([&] {
        need(sys, "system");
        need(out, "out");
        AuditLog log;
        auto r = triangularize_reducible(sys->v, gauge_opts(&log));
        Json shifts = Json::array();
        for (const auto& s : r.shifts) shifts.push_back({{"pole", s.pole}, {"N", s.N}});
        double worst = 0.0;
        for (const auto& a : r.system.residues) worst = std::max(worst, std::abs(a.a21));
        auto gs = garnier_coordinates(r.system);
        double rho = 0.0;
        for (cx z : gs.rho) rho = std::max(rho, std::abs(z));
        Json j{{"K", r.K},
               {"shifts", shifts},
               {"eps", r.eps},
               {"conjugator", to_json(r.conjugator)},
               {"max_lower_entry", worst},
               {"max_rho", rho},
               {"audit", to_json(log)}};
        *out = new gl_system{std::move(r.system)};
        emit(report, j);
    });
}

gl_status gl_classical(const char* request, char** solution, char** csv) {
    return guard([&] {
        const Json q = parse(request);
        const auto family = family_from_name(q.at("family").get<std::string>());
        const auto tv = samples_from(q.at("theta"));
        const bool force = q.value("force", false);
        ClassicalOptions o;
        o.threads = g_threads.load();
        std::vector<cx> xs = q.contains("samples") ? samples_from(q["samples"]) : default_samples(q.value("count", 20));
        ClassicalSolution sol;
        if (family == ClassicalFamily::lauricella_locus) {
            // theta: n+2 exponents, eps: signs, path: path-v1, nu: n initial values
            std::vector<int> eps = q.contains("eps") ? q["eps"].get<std::vector<int>>() : std::vector<int>(tv.size(), 1);
            std::optional<cx> ti;
            if (q.contains("theta_inf")) ti = cx_from_json(q["theta_inf"]);
            const double rho_tol = q.value("rho_tol", 1e-8);
            auto r = lauricella_locus_flow(tv, eps, path_from_json(q.at("path")), samples_from(q.at("nu")),
                                           ti ? &*ti : nullptr, rho_tol);
            Json traj = Json::array();
            std::string table = "t";
            const int n = r.flow.state.n;
            for (int i = 0; i < n; ++i) table += ",nu" + std::to_string(i + 1) + "_re,nu" + std::to_string(i + 1) + "_im";
            for (int i = 0; i < n; ++i) table += ",rho" + std::to_string(i + 1) + "_re,rho" + std::to_string(i + 1) + "_im";
            table += "\n";
            for (std::size_t i = 0; i < r.flow.trajectory.size(); ++i) {
                const auto& st = r.flow.trajectory[i];
                auto e = to_json(st);
                e["t"] = r.flow.t[i];
                traj.push_back(e);
                table += format17(r.flow.t[i]);
                for (cx z : st.nu) table += "," + format17(z.real()) + "," + format17(z.imag());
                for (cx z : st.rho) table += "," + format17(z.real()) + "," + format17(z.imag());
                table += "\n";
            }
            emit(solution, Json{{"schema", "lauricella-v1"},
                                {"family", family_name(family)},
                                {"max_rho", r.max_rho},
                                {"tolerance", rho_tol},
                                {"verified", r.max_rho < rho_tol},
                                {"state", to_json(r.flow.state)},
                                {"trajectory", traj}});
            if (csv) *csv = dup(table);
            return;
        }
        if (tv.size() != 3) throw Error(ErrorCode::parameter, "classical: theta needs three values");
        const std::array<cx, 3> t{tv[0], tv[1], tv[2]};
        const cx mix = q.contains("mix") ? cx_from_json(q["mix"]) : cx(1.0);
        switch (family) {
            case ClassicalFamily::reducible_riccati:
                if (q.contains("theta_inf")) {
                    const cx ti = cx_from_json(q["theta_inf"]);
                    if (std::abs(ti + t[0] + t[1] + t[2]) > 1e-12 * (1.0 + std::abs(ti))) {
                        throw Error(ErrorCode::parameter, "reducible_riccati: requires theta_inf = -(theta_1+theta_2+theta_3)");
                    }
                }
                sol = reducible_riccati_solution(t, mix, xs, o);
                break;
            case ClassicalFamily::generalized_chazy:
                if (q.contains("theta_inf") && cx_from_json(q["theta_inf"]) != cx(-1.0)) {
                    throw Error(ErrorCode::parameter, "generalized_chazy: requires theta_inf = -1");
                }
                sol = chazy_solution(t, mix, xs, o);
                break;
            case ClassicalFamily::riccati_type:
            case ClassicalFamily::forbidden: {
                const cx ti = q.contains("theta_inf") ? cx_from_json(q["theta_inf"]) : cx(2.0);
                const cx x0 = q.contains("x0") ? cx_from_json(q["x0"]) : cx(0.12);
                const cx f0 = q.contains("f_init") ? cx_from_json(q["f_init"]) : cx(0.3, 0.2);
                sol = riccati_type_solution(t, ti, x0, f0, xs, o);
                break;
            }
            case ClassicalFamily::lauricella_locus: break;  // handled above
        }
        auto j = to_json(sol, force);
        if (csv) *csv = dup(classical_csv(sol, force));
        emit(solution, j);
    });
}

gl_status gl_verify_pvi(const char* request, double tol, char** report) {
    return guard([&] {
        const Json q = parse(request);
        const double t = tol > 0.0 ? tol : 1e-6;
        std::vector<PviSample> samples;
        PviParams p;
        if (q.contains("schema")) {
            auto sol = classical_from_json(q);
            p = classical_params(sol.theta, sol.theta_inf);
            for (const auto& s : sol.samples) samples.push_back({s.x, s.y, s.yp, s.ypp});
        } else {
            const auto th = samples_from(q.at("theta"));
            if (th.size() != 4) throw Error(ErrorCode::parameter, "verify-pvi: theta needs four values");
            const auto lab = q.value("labeling", std::string("classical")) == "garnier" ? PviLabeling::garnier
                                                                                        : PviLabeling::classical;
            p = pvi_from_theta({th[0], th[1], th[2], th[3]}, lab);
            for (const auto& s : q.at("samples")) {
                samples.push_back({cx_from_json(s.at("x")), cx_from_json(s.at("y")), cx_from_json(s.at("yp")),
                                   cx_from_json(s.at("ypp"))});
            }
        }
        if (samples.empty()) throw Error(ErrorCode::parameter, "verify-pvi: no samples");
        const double r = pvi_residual(samples, p);
        emit(report, Json{{"residual", r}, {"tolerance", t}, {"pass", r < t}, {"samples", samples.size()}});
    });
}

gl_status gl_symmetry(const char* request, char** result) {
    return guard([&] {
        const Json q = parse(request);
        const std::string op = q.at("op").get<std::string>();
        const int which = q.at("which").get<int>();
        if (op == "T") {
            auto s = garnier_state_from_json(q.at("state"));
            emit(result, to_json(symmetry_T(s, which)));
        } else if (op == "w") {
            if (which < 0 || which > 4) throw Error(ErrorCode::parameter, "symmetry: w index must be 0..4");
            const auto b = samples_from(q.at("b"));
            if (b.size() != 4) throw Error(ErrorCode::parameter, "symmetry: b needs four values");
            OkamotoPoint pt{cx_from_json(q.at("y")), cx_from_json(q.at("p")), {b[0], b[1], b[2], b[3]}};
            auto o = okamoto_w(pt, cx_from_json(q.at("x")), static_cast<Okamoto>(which));
            Json bj = Json::array();
            for (cx z : o.b) bj.push_back(to_json(z));
            emit(result, Json{{"y", to_json(o.y)}, {"p", to_json(o.p)}, {"b", bj}});
        } else {
            throw Error(ErrorCode::parameter, "symmetry: op must be T or w");
        }
    });
}

gl_status gl_strata(const double* b, double tol, char** report) {
    return guard([&] {
        need(b, "b");
        const std::array<cx, 4> bb{cx(b[0], b[1]), cx(b[2], b[3]), cx(b[4], b[5]), cx(b[6], b[7])};
        const double t = tol > 0.0 ? tol : 1e-9;
        auto j = to_json(classify_parameters(bb, t));
        j["tolerance"] = t;
        emit(report, j);
    });
}

}  // extern "C"
