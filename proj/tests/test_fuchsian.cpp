#include "doctest.h"

#include <random>

#include "garnier/error.hpp"
#include "garnier/fuchsian.hpp"

using namespace garnier;

namespace {

FuchsianSystem one_pole_example() {
    FuchsianSystem s;
    s.n = 1;
    s.poles = {0.0, 2.0, 3.0};
    s.residues = {Mat2::diag(0.5, -0.5), Mat2::zero(), Mat2::zero()};
    s.theta = {1.0, 0.0, 0.0};
    s.theta_inf = -1.0;
    return s;
}

}  // namespace

TEST_CASE("validate accepts the single-pole example under the sign convention") {
    auto s = one_pole_example();
    CHECK(validate(s, 1e-12).ok());
    s.theta_inf = 1.0;
    auto rep = validate(s, 1e-12);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].kind == "infinity_normal_form");
}

TEST_CASE("validate flags duplicate poles") {
    auto s = one_pole_example();
    s.poles[1] = s.poles[0];
    auto rep = validate(s, 1e-12);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations[0].kind == "poles_not_distinct");
    CHECK(rep.violations[0].detail.find("poles not pairwise distinct") != std::string::npos);
}

TEST_CASE("validate flags wrong exponents") {
    auto s = one_pole_example();
    s.theta[0] = 0.8;
    auto rep = validate(s, 1e-12);
    REQUIRE_FALSE(rep.ok());
    CHECK(rep.violations[0].kind == "eigenvalue_mismatch");
    CHECK(rep.violations[0].magnitude == doctest::Approx(0.1));
}

TEST_CASE("rhs evaluation") {
    auto s = one_pole_example();
    for (auto& a : s.residues) a = Mat2::zero();
    CHECK(norm(rhs_at(s, cx(0.3, 0.7))) == 0.0);

    auto t = one_pole_example();
    Mat2 r = rhs_at(t, 2.5);
    CHECK(norm(r - t.residues[0] / 2.5) < 1e-15);
    CHECK_THROWS_AS(rhs_at(t, 2.0), Error);
}

TEST_CASE("rhs decays like -A_inf / lambda") {
    std::mt19937_64 rng(11);
    auto s = random_system(2, rng);
    Mat2 ainf = infinity_normal_form(s.theta_inf);
    double prev = 1e300;
    for (double r : {1e2, 1e3, 1e4, 1e5}) {
        cx lam = r * std::exp(kI * 0.7);
        double e = norm(lam * rhs_at(s, lam) + ainf);
        CHECK(e < prev);
        CHECK(e < 50.0 / r);
        prev = e;
    }
}

TEST_CASE("garnier coordinates of the worked numerator") {
    FuchsianSystem s;
    s.n = 1;
    s.poles = {0.0, 1.0, 2.0};
    s.residues = {{0.0, 1.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}, {0.0, -2.0, 0.0, 0.0}};
    s.theta = {0.0, 0.0, 0.0};
    auto c = off_diagonal_numerator(s);
    CHECK(std::abs(c[0] - 2.0) < 1e-15);
    CHECK(std::abs(c[1] + 3.0) < 1e-15);
    CHECK(std::abs(c[2]) < 1e-15);
    auto gc = garnier_coordinates(s);
    REQUIRE(gc.nu.size() == 1);
    CHECK(std::abs(gc.nu[0] - 2.0 / 3.0) < 1e-14);
}

TEST_CASE("upper-triangular residues with A_11 = -theta/2 give rho = 0") {
    auto s = build_triangular_family({cx(0.3, 0.4), 0.0, 1.0, cx(-1.2, 0.5)}, {0.3, 0.45, 0.7, 0.2},
                                     {1, -1, 1, 1}, 0.3 - 0.45 + 0.7 + 0.2, {0.7, cx(0.2, -0.5), 1.1});
    auto gc = garnier_coordinates(s);
    REQUIRE(gc.rho.size() == 2);
    for (cx r : gc.rho) CHECK(std::abs(r) < 1e-13);
}

TEST_CASE("vanishing off-diagonal entries are degenerate") {
    auto s = one_pole_example();
    try {
        garnier_coordinates(s);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate);
    }
}

TEST_CASE("garnier coordinates are invariant under diagonal conjugation") {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 3; ++n) {
        auto s = random_system(n, rng);
        auto g0 = garnier_coordinates(s);
        auto t = conjugate(s, Mat2::diag(1.0, cx(0.4, -1.3)));
        auto g1 = garnier_coordinates(t);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(g0.nu[i] - g1.nu[i]) < 1e-10);
            CHECK(std::abs(g0.rho[i] - g1.rho[i]) < 1e-10);
        }
        // Validated generic systems have a numerator of exact degree n.
        auto c = off_diagonal_numerator(s);
        CHECK(std::abs(c[n + 1]) < 1e-12);
        CHECK(std::abs(c[n]) > 1e-8);
    }
}

TEST_CASE("triangular family") {
    auto s = build_triangular_family({cx(0.5, 0.5), 0.0, 1.0}, {1.0, 1.0, 0.0}, {1, 1, 1}, 2.0);
    CHECK(norm(s.residues[0] - Mat2::diag(-0.5, 0.5)) < 1e-15);
    CHECK(norm(s.residues[1] - Mat2::diag(-0.5, 0.5)) < 1e-15);
    CHECK(norm(s.residues[2]) < 1e-15);
    CHECK(validate(s, 1e-12).ok());
    CHECK_THROWS_AS(build_triangular_family({cx(0.5, 0.5), 0.0, 1.0}, {1.0, 1.0, 0.0}, {1, 1, 1}, 4.0), Error);
}

TEST_CASE("random systems validate and normalization maps the last two poles") {
    std::mt19937_64 rng(1);
    for (int n = 1; n <= 3; ++n) {
        auto s = random_system(n, rng);
        CHECK(validate(s, 1e-10).ok());
        auto t = normalize_poles(s);
        CHECK(t.poles[n] == cx(0.0));
        CHECK(t.poles[n + 1] == cx(1.0));
        CHECK(validate(t, 1e-10).ok());
    }
}

TEST_CASE("diagonal representative is shared by the conjugation orbit") {
    std::mt19937_64 rng(9);
    auto s = random_system(2, rng);
    auto t = conjugate(s, Mat2::diag(cx(2.0, 1.0), cx(-0.3, 0.2)));
    CHECK(residue_distance(diagonal_representative(s), diagonal_representative(t)) < 1e-12);
}
