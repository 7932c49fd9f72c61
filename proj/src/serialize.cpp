#include "garnier/serialize.hpp"

#include <cstdio>
#include <sstream>

#include "garnier/error.hpp"

namespace garnier {

namespace {

Json cx_list(const std::vector<cx>& v) {
    Json a = Json::array();
    for (cx z : v) a.push_back(to_json(z));
    return a;
}

std::vector<cx> cx_list_from(const Json& j) {
    std::vector<cx> v;
    for (const auto& e : j) v.push_back(cx_from_json(e));
    return v;
}

Json mat_list(const std::vector<Mat2>& v) {
    Json a = Json::array();
    for (const auto& m : v) a.push_back(to_json(m));
    return a;
}

std::vector<Mat2> mat_list_from(const Json& j) {
    std::vector<Mat2> v;
    for (const auto& e : j) v.push_back(mat2_from_json(e));
    return v;
}

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::schema, std::string(what) + ": " + e.what());
    }
}

}  // namespace

Json to_json(cx z) { return Json::array({z.real(), z.imag()}); }

cx cx_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::schema, "complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const Mat2& m) { return Json::array({to_json(m.a11), to_json(m.a12), to_json(m.a21), to_json(m.a22)}); }

Mat2 mat2_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::schema, "matrix must be [a11, a12, a21, a22]");
    return {cx_from_json(j[0]), cx_from_json(j[1]), cx_from_json(j[2]), cx_from_json(j[3])};
}

void require_schema(const Json& j, const char* expected) {
    if (!j.is_object() || !j.contains("schema")) {
        throw Error(ErrorCode::schema, std::string("missing schema field (expected ") + expected + ")");
    }
    const auto got = j["schema"].get<std::string>();
    if (got != expected) throw Error(ErrorCode::schema, "schema mismatch: expected " + std::string(expected) + ", got " + got);
}

Json to_json(const FuchsianSystem& sys) {
    return {{"schema", "fuchsian-v1"}, {"n", sys.n}, {"poles", cx_list(sys.poles)}, {"residues", mat_list(sys.residues)},
            {"theta", cx_list(sys.theta)}, {"theta_inf", to_json(sys.theta_inf)}};
}

FuchsianSystem fuchsian_from_json(const Json& j) {
    return guarded("fuchsian-v1", [&] {
        require_schema(j, "fuchsian-v1");
        FuchsianSystem s;
        s.n = j.at("n").get<int>();
        s.poles = cx_list_from(j.at("poles"));
        s.residues = mat_list_from(j.at("residues"));
        s.theta = cx_list_from(j.at("theta"));
        s.theta_inf = cx_from_json(j.at("theta_inf"));
        const std::size_t m = static_cast<std::size_t>(s.n) + 2;
        if (s.n < 0 || s.poles.size() != m || s.residues.size() != m || s.theta.size() != m) {
            throw Error(ErrorCode::schema, "fuchsian-v1: poles, residues and theta need n+2 entries");
        }
        return s;
    });
}

Json to_json(const MonodromyData& m) {
    Json j{{"schema", "monodromy-v1"},
           {"n", m.n},
           {"m", mat_list(m.m)},
           {"m_inf", to_json(m.m_inf)},
           {"m_inf_relation", to_json(m.m_inf_relation)},
           {"r", mat_list(m.r)},
           {"r_inf", to_json(m.r_inf)},
           {"a_inf", to_json(m.a_inf)},
           {"c", mat_list(m.c)},
           {"order", m.order},
           {"theta", cx_list(m.theta)},
           {"theta_inf", to_json(m.theta_inf)},
           {"tolerance", m.tolerance},
           {"inf_agreement", m.inf_agreement}};
    return j;
}

MonodromyData monodromy_from_json(const Json& j) {
    return guarded("monodromy-v1", [&] {
        require_schema(j, "monodromy-v1");
        MonodromyData m;
        m.n = j.at("n").get<int>();
        m.m = mat_list_from(j.at("m"));
        m.m_inf = mat2_from_json(j.at("m_inf"));
        m.m_inf_relation = mat2_from_json(j.at("m_inf_relation"));
        m.r = mat_list_from(j.at("r"));
        m.r_inf = mat2_from_json(j.at("r_inf"));
        m.a_inf = mat2_from_json(j.at("a_inf"));
        m.c = mat_list_from(j.at("c"));
        m.order = j.at("order").get<std::vector<int>>();
        m.theta = cx_list_from(j.at("theta"));
        m.theta_inf = cx_from_json(j.at("theta_inf"));
        m.tolerance = j.at("tolerance").get<double>();
        m.inf_agreement = j.at("inf_agreement").get<double>();
        return m;
    });
}

Json to_json(const GarnierState& s) {
    return {{"schema", "garnier-state-v1"}, {"n", s.n},
            {"nu", cx_list(s.nu)},          {"rho", cx_list(s.rho)},
            {"u", cx_list(s.u)},            {"theta", cx_list(s.theta)},
            {"theta_inf", to_json(s.theta_inf)}, {"kappa", to_json(s.kappa())}};
}

GarnierState garnier_state_from_json(const Json& j) {
    return guarded("garnier-state-v1", [&] {
        require_schema(j, "garnier-state-v1");
        GarnierState s;
        s.n = j.at("n").get<int>();
        s.nu = cx_list_from(j.at("nu"));
        s.rho = cx_list_from(j.at("rho"));
        s.u = cx_list_from(j.at("u"));
        s.theta = cx_list_from(j.at("theta"));
        s.theta_inf = cx_from_json(j.at("theta_inf"));
        require_state(s, "garnier-state-v1");
        return s;  // kappa is derived, never read back
    });
}

Json to_json(const DeformationPath& p) {
    Json w = Json::array();
    for (const auto& v : p.waypoints) w.push_back(cx_list(v));
    return {{"schema", "path-v1"}, {"waypoints", w}, {"clearance", p.clearance}};
}

DeformationPath path_from_json(const Json& j) {
    return guarded("path-v1", [&] {
        require_schema(j, "path-v1");
        DeformationPath p;
        p.clearance = j.value("clearance", 0.05);
        if (j.contains("waypoints")) {
            for (const auto& w : j["waypoints"]) p.waypoints.push_back(cx_list_from(w));
        } else {
            const auto start = cx_list_from(j.at("start"));
            const int k = j.at("index").get<int>();
            if (k < 0 || k >= static_cast<int>(start.size())) throw Error(ErrorCode::schema, "path-v1: index out of range");
            p.waypoints.push_back(start);
            for (const auto& z : j.at("points")) {
                auto w = start;
                w[k] = cx_from_json(z);
                p.waypoints.push_back(w);
            }
        }
        if (p.waypoints.empty()) throw Error(ErrorCode::schema, "path-v1: no waypoints");
        return p;
    });
}

Json to_json(const ValidationReport& r) {
    Json v = Json::array();
    for (const auto& x : r.violations) v.push_back({{"kind", x.kind}, {"detail", x.detail}, {"magnitude", x.magnitude}});
    return {{"ok", r.ok()}, {"violations", v}};
}

Json to_json(const GroupClass& g) {
    Json j{{"reducible", g.reducible}, {"l", g.l}, {"smaller_indices", g.smaller_indices}};
    j["invariant_vector"] = g.invariant_vector ? Json::array({to_json((*g.invariant_vector)[0]), to_json((*g.invariant_vector)[1])})
                                               : Json(nullptr);
    return j;
}

Json to_json(const RelationReport& r) {
    return {{"cyclic", r.cyclic}, {"eigen", r.eigen}, {"inf_consistency", r.inf_consistency}, {"max", r.max()}};
}

Json to_json(const AuditLog& log) {
    Json a = Json::array();
    for (const auto& rec : log) {
        Json p = Json::object();
        for (const auto& [k, v] : rec.params) p[k] = v;
        a.push_back({{"op", rec.op},
                     {"params", p},
                     {"theta_pre", cx_list(rec.theta_pre)},
                     {"theta_post", cx_list(rec.theta_post)},
                     {"theta_inf_pre", to_json(rec.theta_inf_pre)},
                     {"theta_inf_post", to_json(rec.theta_inf_post)}});
    }
    return a;
}

Json to_json(const StratumReport& r) {
    Json w = Json::array();
    for (const auto& x : r.witnesses) w.push_back({{"root", x.root}, {"k", x.k}});
    return {{"M", r.in_M}, {"P", r.in_P}, {"L", r.in_L}, {"D", r.in_D}, {"rank", r.rank}, {"witnesses", w}};
}

Json to_json(const ClassicalSolution& s, bool force) {
    if (!s.verified() && !force) {
        std::ostringstream os;
        os << "classical export refused: " << family_name(s.family) << " residual " << s.pvi_residual << " (tolerance "
           << s.tolerance << "), " << s.aux_name << " residual " << s.aux_residual << " (tolerance " << s.aux_tolerance
           << ")";
        throw Error(ErrorCode::inconsistent, os.str());
    }
    Json samples = Json::array();
    for (const auto& c : s.samples) {
        samples.push_back({{"x", to_json(c.x)}, {"y", to_json(c.y)}, {"p", to_json(c.p)}, {"yp", to_json(c.yp)},
                           {"ypp", to_json(c.ypp)}, {"residual", c.residual}, {"aux", c.aux}});
    }
    return {{"schema", "classical-v1"},
            {"family", family_name(s.family)},
            {"theta", Json::array({to_json(s.theta[0]), to_json(s.theta[1]), to_json(s.theta[2])})},
            {"theta_inf", to_json(s.theta_inf)},
            {"mix", to_json(s.mix)},
            {"x0", to_json(s.x0)},
            {"pvi_residual", s.pvi_residual},
            {"aux_name", s.aux_name},
            {"aux_residual", s.aux_residual},
            {"tolerance", s.tolerance},
            {"aux_tolerance", s.aux_tolerance},
            {"chart_switches", s.chart_switches},
            {"verified", s.verified()},
            {"dropped", s.dropped},
            {"samples", samples}};
}

ClassicalSolution classical_from_json(const Json& j) {
    return guarded("classical-v1", [&] {
        require_schema(j, "classical-v1");
        ClassicalSolution s;
        s.family = family_from_name(j.at("family").get<std::string>());
        const auto t = cx_list_from(j.at("theta"));
        if (t.size() != 3) throw Error(ErrorCode::schema, "classical-v1: theta needs 3 entries");
        s.theta = {t[0], t[1], t[2]};
        s.theta_inf = cx_from_json(j.at("theta_inf"));
        s.mix = cx_from_json(j.at("mix"));
        s.x0 = cx_from_json(j.at("x0"));
        s.pvi_residual = j.at("pvi_residual").get<double>();
        s.aux_name = j.at("aux_name").get<std::string>();
        s.aux_residual = j.at("aux_residual").get<double>();
        s.tolerance = j.at("tolerance").get<double>();
        s.aux_tolerance = j.at("aux_tolerance").get<double>();
        s.chart_switches = j.value("chart_switches", 0);
        s.dropped = j.at("dropped").get<std::vector<std::string>>();
        for (const auto& c : j.at("samples")) {
            s.samples.push_back({cx_from_json(c.at("x")), cx_from_json(c.at("y")), cx_from_json(c.at("p")),
                                 cx_from_json(c.at("yp")), cx_from_json(c.at("ypp")), c.at("residual").get<double>(),
                                 c.at("aux").get<double>()});
        }
        return s;
    });
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string classical_csv(const ClassicalSolution& s, bool force) {
    if (!s.verified() && !force) to_json(s, false);  // throws the refusal
    std::string out = "x_re,x_im,y_re,y_im,p_re,p_im,residual,aux\n";
    for (const auto& c : s.samples) {
        for (double v : {c.x.real(), c.x.imag(), c.y.real(), c.y.imag(), c.p.real(), c.p.imag(), c.residual}) {
            out += format17(v);
            out += ',';
        }
        out += format17(c.aux);
        out += '\n';
    }
    return out;
}

}  // namespace garnier
