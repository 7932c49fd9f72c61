#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "garnier_lab.h"

using Json = nlohmann::json;

namespace {

std::string take(char* s) {
    std::string r = s ? s : "";
    gl_free_string(s);
    return r;
}

std::string fixture(const char* name) {
    std::ifstream in(std::string(GARNIER_TEST_DATA) + "/" + name);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(gl_version()).size() > 0);
    CHECK(std::string(gl_status_name(GL_OK)) == "ok");
    CHECK(std::string(gl_status_name(GL_E_SCHEMA)) != "ok");
}

TEST_CASE("null arguments are reported") {
    gl_system* s = nullptr;
    CHECK(gl_system_from_json(nullptr, &s) == GL_E_NULL);
    CHECK(gl_system_from_json("{}", nullptr) == GL_E_NULL);
    CHECK(std::string(gl_last_error()).size() > 0);
    char* out = nullptr;
    CHECK(gl_system_to_json(nullptr, &out) == GL_E_NULL);
    gl_system_free(nullptr);
    gl_monodromy_free(nullptr);
    gl_state_free(nullptr);
    gl_free_string(nullptr);
}

TEST_CASE("malformed and mismatched documents") {
    gl_system* s = nullptr;
    CHECK(gl_system_from_json("{not json", &s) == GL_E_SCHEMA);
    CHECK(s == nullptr);
    CHECK(gl_system_from_json(R"({"schema":"fuchsian-v9"})", &s) == GL_E_SCHEMA);
    gl_monodromy* m = nullptr;
    CHECK(gl_monodromy_from_json(fixture("system_n1.json").c_str(), &m) != GL_OK);
}

TEST_CASE("classical request through the C interface") {
    char* sol = nullptr;
    char* csv = nullptr;
    const char* q = R"({"family":"reducible-riccati","theta":[[0.3,0],[0.4,0],[0.5,0]],"mix":[1,0],"count":20})";
    REQUIRE(gl_classical(q, &sol, &csv) == GL_OK);
    const auto j = Json::parse(take(sol));
    CHECK(j["schema"] == "classical-v1");
    CHECK(j["verified"] == true);
    CHECK(j["pvi_residual"].get<double>() < 1e-8);
    const auto table = take(csv);
    CHECK(table.rfind("x_re,", 0) == 0);

    // the Chazy family fails its residual check and is refused
    const char* c = R"({"family":"chazy","theta":[[0.2,0],[0.3,0],[0.4,0]]})";
    CHECK(gl_classical(c, &sol, &csv) == GL_E_INCONSISTENT);

    const char* f = R"({"family":"riccati-type","theta":[[0.2,0],[0.3,0],[0.4,0]],"theta_inf":[1,0]})";
    CHECK(gl_classical(f, &sol, &csv) == GL_E_UNSUPPORTED);
    CHECK(std::string(gl_last_error()).find("Forbidden solution") != std::string::npos);
}

TEST_CASE("system lifecycle: validate, monodromy, classify") {
    gl_system* s = nullptr;
    REQUIRE(gl_system_from_json(fixture("system_n1.json").c_str(), &s) == GL_OK);
    char* rep = nullptr;
    REQUIRE(gl_system_validate(s, 1e-10, &rep) == GL_OK);
    const auto v = Json::parse(take(rep));
    CHECK(v["ok"] == true);
    CHECK(v["violations"].empty());

    gl_monodromy* m = nullptr;
    REQUIRE(gl_monodromy_compute(s, 1e-10, &m) == GL_OK);
    char* mj = nullptr;
    REQUIRE(gl_monodromy_to_json(m, &mj) == GL_OK);
    const auto text = take(mj);
    CHECK(Json::parse(text)["relations"]["cyclic"].get<double>() < 1e-6);
    REQUIRE(gl_monodromy_classify(m, 1e-6, &rep) == GL_OK);
    CHECK(Json::parse(take(rep)).is_object());

    // monodromy documents round trip through the handle
    gl_monodromy* m2 = nullptr;
    REQUIRE(gl_monodromy_from_json(text.c_str(), &m2) == GL_OK);
    REQUIRE(gl_monodromy_to_json(m2, &mj) == GL_OK);
    CHECK(take(mj) == text);
    gl_monodromy_free(m2);
    gl_monodromy_free(m);

    // a pole index out of range is a parameter error, not a crash
    gl_system* out = nullptr;
    CHECK(gl_reduce_infinity(s, 7, &out, &rep) != GL_OK);
    CHECK(out == nullptr);
    gl_system_free(s);
}

TEST_CASE("triangularize and flows") {
    gl_system* s = nullptr;
    REQUIRE(gl_system_from_json(fixture("reducible_n1.json").c_str(), &s) == GL_OK);
    gl_system* t = nullptr;
    char* rep = nullptr;
    REQUIRE(gl_triangularize(s, &t, &rep) == GL_OK);
    const auto r = Json::parse(take(rep));
    CHECK(r["max_lower_entry"].get<double>() < 1e-8);
    CHECK(r["max_rho"].get<double>() < 1e-8);
    gl_system_free(t);
    gl_system_free(s);

    REQUIRE(gl_system_from_json(fixture("system_n1.json").c_str(), &s) == GL_OK);
    const auto path = fixture("path_n1.json");
    gl_system* d = nullptr;
    REQUIRE(gl_schlesinger_deform(s, path.c_str(), 1e-11, 1, &d, &rep) == GL_OK);
    CHECK(Json::parse(take(rep)).is_object());
    gl_state* st = nullptr;
    REQUIRE(gl_state_from_system(s, &st) == GL_OK);
    gl_state* st2 = nullptr;
    char* traj = nullptr;
    REQUIRE(gl_garnier_flow(st, path.c_str(), 1e-11, 4, &st2, &traj) == GL_OK);
    const auto tj = Json::parse(take(traj));
    CHECK(tj["trajectory"].size() >= 2);
    gl_state_free(st2);
    gl_state_free(st);
    gl_system_free(d);
    gl_system_free(s);
}

TEST_CASE("strata and thread cap") {
    const double b[8] = {0.5, 0, 0.25, 0, 1.0, 0, 0.0, 0};
    char* rep = nullptr;
    REQUIRE(gl_strata(b, 1e-9, &rep) == GL_OK);
    CHECK(Json::parse(take(rep)).is_object());
    gl_set_threads(3);
    CHECK(gl_threads() == 3);
    gl_set_threads(1);
}
