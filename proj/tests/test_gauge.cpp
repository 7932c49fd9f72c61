#include "doctest.h"

#include <random>

#include "garnier/error.hpp"
#include "garnier/gauge.hpp"

using namespace garnier;

namespace {

FuchsianSystem sample(std::uint64_t seed, int n = 1) {
    std::mt19937_64 rng(seed);
    return random_system(n, rng);
}

double eig_gap(const Mat2& a, cx theta) {
    auto ev = eigenvalues(a);
    cx h = 0.5 * theta;
    return std::min(std::max(std::abs(ev[0] - h), std::abs(ev[1] + h)),
                    std::max(std::abs(ev[1] - h), std::abs(ev[0] + h)));
}

// max |tr M_j - tr M'_j| over the finite poles listed in `map` (a -> b) and infinity
double trace_gap(const FuchsianSystem& a, const FuchsianSystem& b, const std::vector<std::pair<int, int>>& map = {}) {
    auto da = compute_monodromy(a), db = compute_monodromy(b);
    double d = std::abs(da.m_inf.trace() - db.m_inf.trace());
    if (map.empty()) {
        for (std::size_t k = 0; k < da.m.size(); ++k) d = std::max(d, std::abs(da.m[k].trace() - db.m[k].trace()));
    } else {
        for (auto [i, j] : map) d = std::max(d, std::abs(da.m[i].trace() - db.m[j].trace()));
    }
    return d;
}

double same_orbit(const FuchsianSystem& a, const FuchsianSystem& b) {
    return residue_distance(diagonal_representative(a), diagonal_representative(b));
}

double max_a21(const FuchsianSystem& s) {
    double d = 0.0;
    for (const auto& a : s.residues) d = std::max(d, std::abs(a.a21));
    return d;
}

// theta_inf = 0 triangular family: the residue at infinity vanishes, so any
// constant conjugation keeps the system valid.
FuchsianSystem regular_triangular(int n) {
    std::vector<cx> poles, th, up;
    std::vector<int> eps;
    cx sum = 0.0;
    for (int k = 0; k < n + 2; ++k) {
        poles.push_back(cx(0.9 * k - 1.0, 0.3 * (k % 2)));
        th.push_back(0.2 + 0.1 * k);
        eps.push_back(1);
        up.push_back(cx(0.3 + 0.1 * k, -0.2));
    }
    for (int k = 0; k < n + 1; ++k) sum += th[k];
    th[n + 1] = sum;
    eps[n + 1] = -1;
    up.pop_back();
    return build_triangular_family(poles, th, eps, 0.0, up);
}

}  // namespace

TEST_CASE("single shift raises theta_inf by 2 and keeps finite exponents") {
    for (int n : {1, 2}) {
        auto s = sample(40 + n, n);
        auto up = shift_theta_inf(s, 1);
        CHECK(validate(up, 1e-8).ok());
        CHECK(std::abs(up.theta_inf - (s.theta_inf + 2.0)) < 1e-15);
        CHECK(eig_gap(up.infinity_residue(), s.theta_inf + 2.0) < 1e-10);
        for (int k = 0; k < s.size(); ++k) CHECK(eig_gap(up.residues[k], s.theta[k]) < 1e-10);
    }
}

TEST_CASE("gauged residues match G^-1 A G - G^-1 G' pointwise") {
    auto s = sample(17, 2);
    auto g = shift_gauge_inf(s, cx(0.7, 0.2));
    auto out = apply_gauge(s, g, s.theta_inf + 2.0);
    for (cx lam : {cx(0.31, 2.2), cx(-3.0, 0.4), cx(5.0, -7.0)}) {
        Mat2 gl = g.at(lam), gi = inverse(gl);
        Mat2 direct = gi * rhs_at(s, lam) * gl - gi * g.e;
        CHECK(norm(direct - rhs_at(out, lam)) < 1e-11);
    }
}

TEST_CASE("up then down recovers the residues and keeps monodromy traces") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto s = sample(seed);
        for (int N : {1, 2}) {
            GaugeOptions o;
            o.a = cx(1.3, -0.4);
            auto up = shift_theta_inf(s, N, o);
            auto back = shift_theta_inf(up, -N);
            CHECK(std::abs(back.theta_inf - s.theta_inf) < 1e-14);
            CHECK(same_orbit(back, s) < 1e-8);
            CHECK(trace_gap(s, up) < 1e-6);
        }
    }
}

TEST_CASE("shift at a finite pole and its inverse") {
    auto s = sample(9, 2);
    auto f = shift_theta(s, 1, 1);
    CHECK(validate(f, 1e-8).ok());
    CHECK(std::abs(f.theta[1] - (s.theta[1] + 2.0)) < 1e-14);
    CHECK(f.theta_inf == s.theta_inf);
    CHECK(eig_gap(f.residues[1], s.theta[1] + 2.0) < 1e-9);
    for (int k : {0, 2, 3}) CHECK(eig_gap(f.residues[k], s.theta[k]) < 1e-9);
    CHECK(trace_gap(s, f) < 1e-6);
    auto back = shift_theta_down(f, 1, 1);
    CHECK(same_orbit(back, s) < 1e-8);
    CHECK(std::abs(back.poles[1] - s.poles[1]) < 1e-14);
}

TEST_CASE("theta = 2 is excluded from the downward shift; sign_flip relabels it") {
    RandomSystemOptions ro;
    ro.theta_inf = 2.0;
    std::mt19937_64 rng(5);
    auto s = random_system(1, rng, ro);
    REQUIRE(validate(s, 1e-8).ok());
    CHECK_THROWS_AS(shift_theta_down(s, -1, 1), Error);
    auto flipped = sign_flip(s);
    CHECK(std::abs(flipped.theta_inf + 2.0) < 1e-15);
    CHECK(validate(flipped, 1e-8).ok());
    CHECK(trace_gap(s, flipped) < 1e-6);
}

TEST_CASE("upper-triangular residues make the upward shift gauge-singular") {
    auto t = regular_triangular(1);
    t = shift_theta_inf(conjugate(t, Mat2{1.0, 0.5, 0.0, 1.0}), 0);
    try {
        shift_theta_inf(t, 1);
        FAIL("expected a gauge-singular error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::singular);
    }
}

TEST_CASE("mobius swap exchanges a pole with infinity") {
    auto s = sample(23);
    auto w = mobius_swap(s, 0);
    CHECK(validate(w, 1e-8).ok());
    CHECK(w.poles[0] == cx(0.0));
    for (int l : {1, 2}) CHECK(std::abs(w.poles[l] - 1.0 / (s.poles[l] - s.poles[0])) < 1e-15);
    CHECK(w.theta_inf == s.theta[0]);
    CHECK(w.theta[0] == s.theta_inf);
    auto back = translate_poles(mobius_swap(w, 0), s.poles[0]);
    for (int l = 0; l < 3; ++l) CHECK(std::abs(back.poles[l] - s.poles[l]) < 1e-14);
    CHECK(same_orbit(back, s) < 1e-12);
}

TEST_CASE("extension then reduction is the identity up to diagonal conjugation") {
    for (int n : {1, 2}) {
        auto s = sample(60 + n, n);
        auto e = extend_with_identity_pole(s, cx(0.4, 0.9), 0.3);
        CHECK(e.n == n + 1);
        CHECK(e.theta[n] == cx(-2.0));
        auto data = compute_monodromy(e);
        CHECK(norm(data.m[n] - Mat2::identity()) < 1e-5);
        auto r = reduce_identity_pole(e, n);
        CHECK(r.n == n);
        for (int k = 0; k < s.size(); ++k) CHECK(std::abs(r.poles[k] - s.poles[k]) < 1e-12);
        CHECK(same_orbit(r, s) < 1e-6);
    }
}

TEST_CASE("family parameter changes residues but not monodromy traces") {
    auto s = sample(31);
    std::vector<FuchsianSystem> fam;
    for (cx f : {cx(0.3), cx(-0.6, 0.2), cx(1.5)}) fam.push_back(extend_with_identity_pole(s, cx(-0.8, 1.1), f));
    CHECK(residue_distance(fam[0], fam[1]) > 1e-3);
    CHECK(residue_distance(fam[0], fam[2]) > 1e-3);
    CHECK(trace_gap(fam[0], fam[1]) < 1e-6);
    CHECK(trace_gap(fam[0], fam[2]) < 1e-6);
}

TEST_CASE("n=1 input with an identity pole reduces to a hypergeometric-class system") {
    // base: poles 0 and 1 plus infinity
    FuchsianSystem h;
    h.n = 0;
    h.poles = {0.0, 1.0};
    h.theta_inf = 0.55;
    Mat2 p{1.0, cx(0.4, 0.1), cx(-0.3, 0.2), 0.9};
    h.residues.push_back(p * Mat2::diag(0.15, -0.15) * inverse(p));
    h.residues.push_back(-h.residues[0] - infinity_normal_form(h.theta_inf));
    h.theta = {0.3, 2.0 * std::sqrt(-h.residues[1].det())};
    REQUIRE(validate(h, 1e-12).ok());
    auto e = extend_with_identity_pole(h, cx(0.3, 0.8), 0.4, 0);
    CHECK(e.n == 1);
    auto r = reduce_identity_pole(e, 0);
    CHECK(r.n == 0);
    CHECK(same_orbit(r, h) < 1e-6);
    // the nontrivial pair survives
    auto de = compute_monodromy(e), dr = compute_monodromy(r);
    CHECK(std::abs(de.m[1].trace() - dr.m[0].trace()) < 1e-5);
    CHECK(std::abs(de.m[2].trace() - dr.m[1].trace()) < 1e-5);
    CHECK(std::abs(de.m_inf.trace() - dr.m_inf.trace()) < 1e-5);
    CHECK(norm(de.m[0] - Mat2::identity()) < 1e-5);
}

TEST_CASE("several identity poles are removed in ascending order") {
    auto s = sample(71);
    auto e = extend_with_identity_pole(s, cx(0.6, 1.2), 0.3, 0);
    e = extend_with_identity_pole(e, cx(-1.0, -0.9), -0.4, 2);
    CHECK(e.n == 3);
    auto r = reduce_identity_poles(e, {2, 0});
    CHECK(r.n == 1);
    CHECK(same_orbit(r, s) < 1e-6);
}

TEST_CASE("non-scalar local monodromy is not reducible") {
    auto s = sample(5);
    try {
        reduce_identity_pole(s, 0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::inconsistent);
    }
}

TEST_CASE("upper-triangular input goes through the lower variant") {
    // t = A_22 - A_11; the pole at index 1 has t = -2 and its off-diagonal
    // entries solve the linear log-free condition, so that M_2 = 1
    const std::vector<cx> u{cx(-0.7, 0.2), cx(0.4, 1.1), 0.0, 1.0};
    const std::vector<cx> t{0.3, -2.0, 0.45, 0.2};
    const int k = 1;
    auto q_prime = [&](int l) {
        cx h = 1.0, s = 0.0;
        for (int m = 0; m < 4; ++m) {
            if (m == k) continue;
            h *= std::pow(u[k] - u[m], t[m]);
            s += t[m] / (u[k] - u[m]);
        }
        if (l == k) {
            cx s2 = 0.0;
            for (int m = 0; m < 4; ++m) {
                if (m != k) s2 += t[m] / std::pow(u[k] - u[m], 2);
            }
            return 0.5 * h * (s * s - s2);
        }
        cx ql = h / (u[k] - u[l]);
        return ql * (s - 1.0 / (u[k] - u[l]));
    };
    std::vector<cx> c(4);
    for (int l = 0; l < 4; ++l) c[l] = q_prime(l);
    // x_0 = 0.5, x_2 = -0.3 free; x_1 and x_3 from sum x = 0 and sum c x = 0
    cx x0 = 0.5, x2 = -0.3;
    cx x1 = (-(c[0] * x0 + c[2] * x2) + c[3] * (x0 + x2)) / (c[1] - c[3]);
    cx x3 = -(x0 + x1 + x2);
    cx tinf = 0.0;
    for (cx v : t) tinf += v;
    auto tri = build_triangular_family(u, {0.3, 2.0, 0.45, 0.2}, {1, -1, 1, 1}, tinf, {x0, x1, x2, x3});
    REQUIRE(validate(tri, 1e-10).ok());
    auto data = compute_monodromy(tri);
    REQUIRE(norm(data.m[k] - Mat2::identity()) < 1e-5);
    auto r = reduce_identity_pole(tri, k);
    CHECK(r.n == 1);
    CHECK(validate(r, 1e-6).ok());
    CHECK(trace_gap(tri, r, {{0, 0}, {2, 1}, {3, 2}}) < 1e-5);
}

TEST_CASE("reduction at infinity inverts the lifting construction") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto s = sample(seed);
        const cx u_new(0.7, -0.8);
        auto lift = mobius_swap(insert_zero_pole(s, u_new, 1), 1);
        lift = conjugate(lift, Mat2{1.0, 0.3, 1.0, 1.3});
        auto lifted = shift_theta_inf(lift, 1);
        CHECK(lifted.theta_inf == cx(2.0));
        CHECK(trace_gap(lift, lifted) < 1e-6);
        auto data = compute_monodromy(lifted);
        CHECK(norm(data.m_inf - Mat2::identity()) < 1e-5);
        auto r = translate_poles(reduce_infinity(lifted, 1), u_new);
        for (int k = 0; k < s.size(); ++k) CHECK(std::abs(r.poles[k] - s.poles[k]) < 1e-12);
        CHECK(same_orbit(r, s) < 1e-6);
    }
}

TEST_CASE("reduction at infinity needs an even integer exponent") {
    auto s = sample(8);
    try {
        reduce_infinity(s, 0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parameter);
    }
}

TEST_CASE("conjugated triangular family is triangularized") {
    for (int n : {1, 2, 3}) {
        auto t = regular_triangular(n);
        std::mt19937_64 rng(100 + n);
        std::normal_distribution<double> g;
        Mat2 S{cx(g(rng), g(rng)), cx(g(rng), g(rng)), cx(g(rng), g(rng)), cx(g(rng), g(rng))};
        auto c = conjugate(t, S);
        REQUIRE(validate(c, 1e-8).ok());
        REQUIRE(max_a21(c) > 1e-2);
        auto tr = triangularize_reducible(c);
        CHECK(tr.K == 0);
        CHECK(max_a21(tr.system) < 1e-8);
        auto gc = garnier_coordinates(tr.system);
        for (cx r : gc.rho) CHECK(std::abs(r) < 1e-8);
        CHECK(trace_gap(c, tr.system) < 1e-6);
    }
}

TEST_CASE("triangular input is returned unchanged") {
    auto t = regular_triangular(1);
    auto tr = triangularize_reducible(t);
    CHECK(residue_distance(tr.system, t) < 1e-12);
    CHECK(tr.shifts.empty());
}

TEST_CASE("nonzero exponent-sum defect is removed by a shift first") {
    for (int n : {1, 2}) {
        auto t = regular_triangular(n);
        auto c = conjugate(t, Mat2{0.8, 0.3, -0.5, 1.1});
        auto shifted = shift_theta(c, 0, 1);
        REQUIRE(!common_eigenvector(shifted.residues, 1e-6));
        auto tr = triangularize_reducible(shifted);
        CHECK(std::labs(tr.K) == 1);
        REQUIRE(tr.shifts.size() == 1);
        CHECK(max_a21(tr.system) < 1e-8);
        // theta_inf - sum eps_k theta_k = 0 after the shift
        cx defect = tr.system.theta_inf;
        for (cx th : tr.system.theta) defect -= th;
        CHECK(std::abs(defect) < 1e-8);
        CHECK(trace_gap(shifted, tr.system) < 1e-6);
    }
}

TEST_CASE("irreducible input is rejected") {
    auto s = sample(14);
    CHECK_THROWS_AS(triangularize_reducible(s), Error);
}

TEST_CASE("pipelines leave an audit trail") {
    AuditLog log;
    GaugeOptions o;
    o.audit = &log;
    auto s = sample(3);
    auto e = extend_with_identity_pole(s, cx(0.4, 0.9), 0.3, -1, o);
    reduce_identity_pole(e, 1, o);
    REQUIRE(log.size() == 2);
    CHECK(log[0].op == "extend_with_identity_pole");
    CHECK(log[0].theta_post.size() == 4);
    CHECK(log[1].op == "reduce_identity_pole");
    CHECK(log[1].theta_post.size() == 3);
}
