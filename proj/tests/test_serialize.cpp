#include "doctest.h"

#include <cstring>
#include <random>

#include "garnier/error.hpp"
#include "garnier/serialize.hpp"

using namespace garnier;

namespace {

bool same_bits(cx a, cx b) {
    const double x[2] = {a.real(), a.imag()}, y[2] = {b.real(), b.imag()};
    return std::memcmp(x, y, sizeof x) == 0;
}

bool same_bits(const Mat2& a, const Mat2& b) {
    return same_bits(a.a11, b.a11) && same_bits(a.a12, b.a12) && same_bits(a.a21, b.a21) && same_bits(a.a22, b.a22);
}

Json reparse(const Json& j) { return Json::parse(j.dump()); }

}  // namespace

TEST_CASE("FuchsianSystem round trip is bit-for-bit") {
    std::mt19937_64 rng(3);
    for (int n : {1, 2, 3}) {
        auto s = random_system(n, rng);
        auto t = fuchsian_from_json(reparse(to_json(s)));
        REQUIRE(t.n == s.n);
        for (int k = 0; k < s.size(); ++k) {
            CHECK(same_bits(t.poles[k], s.poles[k]));
            CHECK(same_bits(t.residues[k], s.residues[k]));
            CHECK(same_bits(t.theta[k], s.theta[k]));
        }
        CHECK(same_bits(t.theta_inf, s.theta_inf));
    }
}

TEST_CASE("MonodromyData round trip is bit-for-bit") {
    std::mt19937_64 rng(5);
    auto s = random_system(1, rng);
    auto m = compute_monodromy(s);
    auto t = monodromy_from_json(reparse(to_json(m)));
    REQUIRE(t.m.size() == m.m.size());
    for (std::size_t k = 0; k < m.m.size(); ++k) {
        CHECK(same_bits(t.m[k], m.m[k]));
        CHECK(same_bits(t.r[k], m.r[k]));
    }
    CHECK(same_bits(t.m_inf, m.m_inf));
    CHECK(same_bits(t.m_inf_relation, m.m_inf_relation));
    CHECK(same_bits(t.a_inf, m.a_inf));
    CHECK(t.order == m.order);
    CHECK(t.tolerance == m.tolerance);
    CHECK(t.inf_agreement == m.inf_agreement);
}

TEST_CASE("GarnierState round trip recomputes kappa") {
    GarnierState s;
    s.n = 1;
    s.nu = {cx(0.1234567890123, -0.3)};
    s.rho = {cx(1.0 / 3.0, 2.0 / 7.0)};
    s.u = {cx(0.5, 0.5), 0.0, 1.0};
    s.theta = {0.1, cx(0.2, 0.01), 0.3};
    s.theta_inf = cx(0.7, -0.2);
    auto j = reparse(to_json(s));
    j["kappa"] = to_json(cx(99.0, 99.0));  // ignored on read
    auto t = garnier_state_from_json(j);
    CHECK(same_bits(t.nu[0], s.nu[0]));
    CHECK(same_bits(t.rho[0], s.rho[0]));
    CHECK(same_bits(t.kappa(), s.kappa()));
}

TEST_CASE("schema mismatch is an error") {
    std::mt19937_64 rng(1);
    auto j = to_json(random_system(1, rng));
    j["schema"] = "fuchsian-v2";
    try {
        fuchsian_from_json(j);
        FAIL("expected a schema error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::schema);
    }
    CHECK_THROWS_AS(monodromy_from_json(to_json(random_system(1, rng))), Error);
    CHECK_THROWS_AS(fuchsian_from_json(Json::parse(R"({"schema":"fuchsian-v1","n":1})")), Error);
}

TEST_CASE("path forms") {
    auto full = path_from_json(Json::parse(
        R"({"schema":"path-v1","clearance":0.1,"waypoints":[[[0.5,0.5],[0,0],[1,0]],[[0.6,0.5],[0,0],[1,0]]]})"));
    CHECK(full.waypoints.size() == 2);
    CHECK(full.clearance == 0.1);
    auto moving = path_from_json(
        Json::parse(R"({"schema":"path-v1","start":[[0.5,0.5],0,1],"index":0,"points":[[0.6,0.5],[0.7,0.4]]})"));
    REQUIRE(moving.waypoints.size() == 3);
    CHECK(moving.waypoints[2][0] == cx(0.7, 0.4));
    CHECK(moving.waypoints[2][2] == cx(1.0));
    auto back = path_from_json(reparse(to_json(moving)));
    CHECK(back.waypoints == moving.waypoints);
}

TEST_CASE("classical export") {
    auto sol = reducible_riccati_solution({0.3, 0.4, 0.5}, 1.0, default_samples(6));
    auto t = classical_from_json(reparse(to_json(sol)));
    REQUIRE(t.samples.size() == sol.samples.size());
    CHECK(same_bits(t.samples[3].y, sol.samples[3].y));
    CHECK(t.verified());
    const auto csv = classical_csv(sol);
    CHECK(csv.rfind("x_re,x_im,y_re,y_im,p_re,p_im,residual,aux\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    // 17 significant digits recover the double exactly
    const double y = sol.samples[0].y.real();
    CHECK(std::stod(format17(y)) == y);
}

TEST_CASE("unverified classical solutions are not exported") {
    auto sol = chazy_solution({0.2, 0.3, 0.4}, 1.0, default_samples(6));
    REQUIRE(!sol.verified());
    CHECK_THROWS_AS(to_json(sol), Error);
    CHECK_THROWS_AS(classical_csv(sol), Error);
    auto forced = to_json(sol, true);
    CHECK(forced["verified"] == false);
}

TEST_CASE("audit log serialization") {
    std::mt19937_64 rng(9);
    auto s = random_system(1, rng);
    AuditLog log;
    GaugeOptions o;
    o.audit = &log;
    auto up = shift_theta_inf(s, 1, o);
    (void)up;
    auto j = to_json(log);
    REQUIRE(j.is_array());
    REQUIRE(!j.empty());
    CHECK(j[0].contains("op"));
    CHECK(j[0]["theta_inf_post"].is_array());
}
