#include "doctest.h"

#include <random>

#include "garnier/error.hpp"
#include "garnier/schlesinger.hpp"

using namespace garnier;

namespace {

FuchsianSystem sample(std::uint64_t seed, int n = 1) {
    std::mt19937_64 rng(seed);
    return random_system(n, rng);
}

double max_spectral_drift(const FuchsianSystem& s) {
    double d = 0.0;
    for (std::size_t k = 0; k < s.residues.size(); ++k) {
        auto ev = eigenvalues(s.residues[k]);
        cx h = 0.5 * s.theta[k];
        d = std::max(d, std::min(std::max(std::abs(ev[0] - h), std::abs(ev[1] + h)),
                                 std::max(std::abs(ev[1] - h), std::abs(ev[0] + h))));
    }
    return d;
}

double constraint_drift(const FuchsianSystem& s) {
    return norm(s.infinity_residue() - infinity_normal_form(s.theta_inf));
}

DeformationPath circle_path(const std::vector<cx>& u, int k, double r, int pieces) {
    DeformationPath p;
    p.clearance = 0.05;
    for (int q = 0; q <= pieces; ++q) {
        auto w = u;
        w[k] = u[k] + r * (std::exp(kI * (2.0 * kPi * q / pieces)) - 1.0);
        p.waypoints.push_back(w);
    }
    return p;
}

}  // namespace

TEST_CASE("diagonal residues give zero derivatives") {
    FuchsianSystem s;
    s.n = 1;
    s.poles = {0.3, 0.0, 1.0};
    s.residues = {Mat2::diag(0.1, -0.1), Mat2::diag(-0.2, 0.2), Mat2::diag(0.3, -0.3)};
    s.theta = {0.2, -0.4, 0.6};
    s.theta_inf = -0.4;
    for (const auto& row : schlesinger_rhs(s)) {
        for (const auto& d : row) CHECK(norm(d) == 0.0);
    }
    auto p = straight_path(s.poles, {cx(0.4, 0.2), 0.0, 1.0}, 0.1);
    auto out = schlesinger_flow(s, p);
    CHECK(residue_distance(out.system, s) < 1e-15);
}

TEST_CASE("row sums of the Schlesinger right-hand side vanish") {
    for (int n : {1, 2}) {
        auto s = sample(11 + n, n);
        auto d = schlesinger_rhs(s);
        for (const auto& row : d) {
            Mat2 sum;
            for (const auto& x : row) sum += x;
            CHECK(norm(sum) < 1e-13);
        }
        // column sums vanish too: the residue sum is conserved
        for (std::size_t j = 0; j < d.size(); ++j) {
            Mat2 sum;
            for (std::size_t i = 0; i < d.size(); ++i) sum += d[i][j];
            CHECK(norm(sum) < 1e-13);
        }
    }
}

TEST_CASE("rhs matches finite differences of the flow") {
    auto s = sample(5, 2);
    auto d = schlesinger_rhs(s);
    const double h = 1e-6;
    for (int j = 0; j < s.size(); ++j) {
        auto end = s.poles;
        end[j] += h;
        auto out = schlesinger_flow(s, straight_path(s.poles, end, 0.1));
        for (int i = 0; i < s.size(); ++i) {
            Mat2 fd = (out.system.residues[i] - s.residues[i]) / h;
            CHECK(norm(fd - d[i][j]) < 1e-5);
        }
    }
}

TEST_CASE("zero-length path returns the input exactly") {
    auto s = sample(7);
    DeformationPath p{{s.poles, s.poles}, 0.1};
    auto out = schlesinger_flow(s, p);
    CHECK(out.system.residues == s.residues);
    CHECK(out.system.poles == s.poles);
    auto basis = make_loop_basis(s);
    CHECK(verify_isomonodromy(s, out.system, basis).deviation < 1e-12);
}

TEST_CASE("loop in u_1 is isospectral and keeps the residue sum") {
    auto s = sample(21);
    auto p = circle_path(s.poles, 0, 0.15, 32);
    FlowOptions fo;
    fo.record = true;
    fo.samples_per_segment = 1;
    auto out = schlesinger_flow(s, p, fo);
    CHECK(out.trajectory.size() == 1 + 32 * 2);
    for (const auto& pt : out.trajectory) {
        FuchsianSystem x = s;
        x.poles = pt.poles;
        x.residues = pt.residues;
        CHECK(max_spectral_drift(x) < 1e-8);
        CHECK(constraint_drift(x) < 1e-8);
    }
    CHECK(out.trajectory.back().t == doctest::Approx(1.0));
    CHECK(out.warnings.empty());
}

TEST_CASE("short clearance-respecting path is isomonodromic") {
    for (std::uint64_t seed : {3u, 8u, 13u}) {
        auto s = sample(seed);
        auto basis = make_loop_basis(s);
        auto end = s.poles;
        end[0] += 0.3 * std::exp(kI * basis.eta);
        auto path = straight_path(s.poles, end, 0.2);
        auto out = schlesinger_flow(s, path);
        CHECK(max_spectral_drift(out.system) < 1e-8);
        auto r = verify_flow_isomonodromy(s, out, path);
        CHECK(r.deviation < 1e-5);
        // the residues did move
        CHECK(residue_distance(out.system, s) > 1e-3);
    }
}

TEST_CASE("clearance violation is an error") {
    auto s = sample(4);
    auto end = s.poles;
    end[0] = s.poles[1] + 0.01;
    auto path = straight_path(s.poles, end, 0.2);
    CHECK_THROWS_AS(schlesinger_flow(s, path), Error);
    try {
        check_path(path, s.size());
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::branch);
    }
    DeformationPath bad{{s.poles}, 0.0};
    CHECK_THROWS_AS(check_path(bad, s.size()), Error);
}

TEST_CASE("path helpers") {
    DeformationPath p{{{0.0, 1.0, 3.0}, {2.0, 1.0, 3.0}, {2.0, 1.0, 5.0}}, 0.1};
    CHECK(p.length() == doctest::Approx(4.0));
    CHECK(std::abs(p.at(0.25)[0] - 1.0) < 1e-15);
    CHECK(std::abs(p.at(0.75)[2] - 4.0) < 1e-15);
    CHECK(p.moving() == std::vector<int>{0, 2});
    // u_1 passes u_2 = 1 at distance 0 on the first segment
    CHECK(path_min_separation(p) < 1e-15);
}

TEST_CASE("scalar monodromy emits a warning tag") {
    FuchsianSystem s;
    s.n = 1;
    s.poles = {cx(0.3, 0.2), 0.0, 1.0};
    s.residues = {Mat2{-0.2, 0.5, 0.3, 0.2}, Mat2::zero(), Mat2{0.2, -0.5, -0.3, -0.2}};
    // A_3 = -A_1; det A_1 = -0.04 - 0.15
    s.theta = {2.0 * std::sqrt(cx(0.19)), 0.0, 2.0 * std::sqrt(cx(0.19))};
    s.theta_inf = 0.0;
    REQUIRE(validate(s, 1e-12).ok());
    auto end = s.poles;
    end[0] += cx(0.05, 0.0);
    auto out = schlesinger_flow(s, straight_path(s.poles, end, 0.1));
    REQUIRE(out.warnings.size() == 1);
    CHECK(out.warnings[0].find("M_2") != std::string::npos);
}
