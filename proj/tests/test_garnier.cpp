#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "garnier/error.hpp"
#include "garnier/garnier.hpp"

using namespace garnier;

namespace {

GarnierState random_state(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto rcx = [&](double s) { return cx(s * uni(rng), s * uni(rng)); };
    GarnierState s;
    s.n = n;
    for (int i = 0; i < n; ++i) s.u.push_back(cx(0.3 + 0.4 * i, 0.6) + rcx(0.15));
    s.u.push_back(0.0);
    s.u.push_back(1.0);
    for (int i = 0; i < n; ++i) {
        s.nu.push_back(cx(0.2 + 0.5 * i, -0.4) + rcx(0.15));
        s.rho.push_back(rcx(0.5));
    }
    for (int m = 0; m < n + 2; ++m) s.theta.push_back(rcx(0.8));
    s.theta_inf = rcx(0.8);
    return s;
}

double state_distance(const GarnierState& a, const GarnierState& b) {
    auto p = match_roots(a.nu, b.nu);
    double d = 0.0;
    for (int k = 0; k < a.n; ++k) {
        d = std::max(d, std::abs(b.nu[p[k]] - a.nu[k]));
        d = std::max(d, std::abs(b.rho[p[k]] - a.rho[k]));
    }
    for (std::size_t m = 0; m < a.u.size(); ++m) d = std::max(d, std::abs(a.u[m] - b.u[m]));
    for (std::size_t m = 0; m < a.theta.size(); ++m) d = std::max(d, std::abs(a.theta[m] - b.theta[m]));
    return std::max(d, std::abs(a.theta_inf - b.theta_inf));
}

DeformationPath move_u(const GarnierState& s, int i, cx delta) {
    auto end = s.u;
    end[i] += delta;
    return straight_path(s.u, end, 0.05);
}

// Direct integration of the sixth Painleve equation along a straight x path.
std::pair<cx, cx> integrate_pvi(cx x0, cx x1, cx y0, cx yp0, const PviParams& p) {
    CVec y{y0, yp0};
    cx dx = x1 - x0;
    OdeOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    integrate([&](double t, const CVec& v, CVec& dv) {
        cx x = x0 + t * dx;
        dv = {v[1] * dx, pvi_rhs(x, v[0], v[1], p) * dx};
    }, 0.0, 1.0, y, o);
    return {y[0], y[1]};
}

}  // namespace

TEST_CASE("kappa is recomputed from the exponents") {
    GarnierState s;
    s.theta = {0.5, 0.25, 0.25};
    s.theta_inf = 1.0;
    CHECK(std::abs(s.kappa()) < 1e-15);
    s.theta_inf = 0.0;
    CHECK(std::abs(s.kappa() + 0.25) < 1e-15);
}

TEST_CASE("hamiltonian vanishes on rho = 0, kappa = 0") {
    std::mt19937_64 rng(1);
    for (int n : {1, 2, 3}) {
        auto s = random_state(n, rng);
        for (auto& r : s.rho) r = 0.0;
        s.theta_inf = std::accumulate(s.theta.begin(), s.theta.end(), cx(0.0));  // kappa = 0
        REQUIRE(std::abs(s.kappa()) < 1e-14);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(hamiltonian(s, i)) < 1e-13);
            auto g = hamiltonian_gradient(s, i);
            for (int j = 0; j < n; ++j) CHECK(std::abs(g.d_nu[j]) < 1e-12);
        }
    }
}

TEST_CASE("hamiltonian is quadratic in rho") {
    std::mt19937_64 rng(2);
    auto s = random_state(2, rng);
    auto k_at = [&](double lam) {
        auto t = s;
        for (auto& r : t.rho) r *= lam;
        return hamiltonian(t, 0);
    };
    cx k0 = k_at(0.0), k1 = k_at(1.0), km = k_at(-1.0);
    cx lin = 0.5 * (k1 - km), quad = 0.5 * (k1 + km) - k0;
    for (double lam : {0.5, 2.0, 3.0}) CHECK(std::abs(k_at(lam) - k0 - lam * lin - lam * lam * quad) < 1e-12);
}

TEST_CASE("closed-form partials match central differences") {
    std::mt19937_64 rng(3);
    const double h = 1e-6;
    for (int n : {1, 2, 3}) {
        auto s = random_state(n, rng);
        for (int i = 0; i < n; ++i) {
            auto g = hamiltonian_gradient(s, i);
            for (int j = 0; j < n; ++j) {
                auto a = s, b = s;
                a.nu[j] += h;
                b.nu[j] -= h;
                cx fd_nu = (hamiltonian(a, i) - hamiltonian(b, i)) / (2.0 * h);
                a = s;
                b = s;
                a.rho[j] += h;
                b.rho[j] -= h;
                cx fd_rho = (hamiltonian(a, i) - hamiltonian(b, i)) / (2.0 * h);
                CHECK(std::abs(fd_nu - g.d_nu[j]) < 1e-6 * (1.0 + std::abs(g.d_nu[j])));
                CHECK(std::abs(fd_rho - g.d_rho[j]) < 1e-6 * (1.0 + std::abs(g.d_rho[j])));
            }
        }
    }
}

TEST_CASE("n = 1 Hamilton equations reproduce the Painleve VI system") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        auto s = random_state(1, rng);
        cx x = s.u[0], y = s.nu[0], p = s.rho[0];
        const auto& th = s.theta;
        cx ti = s.theta_inf;
        cx su = x + 1.0, sth = th[0] + th[1] + th[2];
        cx t_y = (y - x) * y * (y - 1.0);
        cx tp_x = x * (x - 1.0);
        cx tp_y = (y - x) * (2.0 * y - 1.0) + y * (y - 1.0);
        cx dy = t_y / tp_x * (2.0 * p + 1.0 / (y - x) - th[0] / (y - x) - th[1] / y - th[2] / (y - 1.0));
        cx bracket = 2.0 * y + x - su - th[0] * (2.0 * y + x - su) - th[1] * (2.0 * y - su) - th[2] * (2.0 * y + 1.0 - su);
        cx dp = -(tp_y * p * p + bracket * p + 0.25 * (sth - ti) * (sth + ti - 2.0)) / tp_x;
        auto g = hamiltonian_gradient(s, 0);
        CHECK(std::abs(g.d_rho[0] - dy) < 1e-12 * (1.0 + std::abs(dy)));
        CHECK(std::abs(-g.d_nu[0] - dp) < 1e-12 * (1.0 + std::abs(dp)));
    }
}

TEST_CASE("n = 1 flow matches direct Painleve VI integration") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 3; ++trial) {
        auto s = random_state(1, rng);
        auto pv = pvi_from_theta({s.theta[0], s.theta[1], s.theta[2], s.theta_inf});
        cx yp0 = hamiltonian_gradient(s, 0).d_rho[0];
        auto path = move_u(s, 0, cx(0.12, -0.05));
        GarnierFlowOptions fo;
        fo.ode.rtol = 1e-12;
        fo.ode.atol = 1e-14;
        auto out = garnier_flow(s, path, fo);
        auto [y1, yp1] = integrate_pvi(s.u[0], out.state.u[0], s.nu[0], yp0, pv);
        CHECK(std::abs(out.state.nu[0] - y1) < 1e-6);
        CHECK(std::abs(hamiltonian_gradient(out.state, 0).d_rho[0] - yp1) < 1e-6);
    }
}

TEST_CASE("Garnier flow commutes with the Schlesinger flow") {
    for (int n : {1, 2}) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            std::mt19937_64 rng(seed * 7 + n);
            auto sys = normalize_poles(random_system(n, rng));
            auto end = sys.poles;
            end[0] += cx(0.05, 0.03);
            auto path = straight_path(sys.poles, end, 0.05);
            auto flowed = schlesinger_flow(sys, path);
            auto a = garnier_state(flowed.system);
            auto b = garnier_flow(garnier_state(sys), path).state;
            CHECK(state_distance(a, b) < 1e-5);
        }
    }
}

TEST_CASE("rho = 0 is invariant when kappa = 0") {
    std::mt19937_64 rng(6);
    for (int n : {1, 2, 3}) {
        auto s = random_state(n, rng);
        for (auto& r : s.rho) r = 0.0;
        s.theta_inf = 2.0 - std::accumulate(s.theta.begin(), s.theta.end(), cx(0.0));
        REQUIRE(std::abs(s.kappa()) < 1e-14);
        auto out = garnier_flow(s, move_u(s, 0, cx(0.1, 0.05)));
        for (cx r : out.state.rho) CHECK(std::abs(r) < 1e-12);
        CHECK(std::abs(out.state.nu[0] - s.nu[0]) > 1e-4);
    }
}

TEST_CASE("flows in different times commute") {
    std::mt19937_64 rng(7);
    auto s = random_state(2, rng);
    cx d1(0.03, 0.01), d2(-0.02, 0.02);
    auto u = s.u;
    auto mid1 = u, mid2 = u, end = u;
    mid1[0] += d1;
    mid2[1] += d2;
    end[0] += d1;
    end[1] += d2;
    DeformationPath p12{{u, mid1, end}, 0.05}, p21{{u, mid2, end}, 0.05};
    auto a = garnier_flow(s, p12).state;
    auto b = garnier_flow(s, p21).state;
    CHECK(state_distance(a, b) < 1e-6);
}

TEST_CASE("symmetries are involutions") {
    std::mt19937_64 rng(8);
    for (int n : {1, 2, 3}) {
        for (int trial = 0; trial < 5; ++trial) {
            auto s = random_state(n, rng);
            for (int w = 1; w <= n + 3; ++w) {
                if (w == n + 1) continue;
                auto t = symmetry_T(symmetry_T(s, w), w);
                CHECK(state_distance(s, t) < 1e-13);
            }
        }
    }
    GarnierState s;
    s.n = 1;
    s.nu = {0.5};
    s.rho = {0.0};
    s.u = {2.0, 0.0, 1.0};
    s.theta = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(symmetry_T(s, 2), Error);
    s.u[0] = 1.0;
    CHECK_THROWS_AS(symmetry_T(s, 1), Error);
}

TEST_CASE("symmetries map flow trajectories to flow trajectories") {
    for (int n : {1, 2}) {
        std::mt19937_64 rng(9 + n);
        auto s = random_state(n, rng);
        auto u0 = s.u;
        const cx dir(0.04, 0.03);
        PoleCurve c = [&](double t, std::vector<cx>& u, std::vector<cx>& du) {
            u = u0;
            du.assign(n + 2, 0.0);
            u[0] += t * dir;
            du[0] = dir;
        };
        auto end = garnier_flow_curve(s, c).state;
        for (int w = 1; w <= n + 3; ++w) {
            if (w == n + 1) continue;
            PoleCurve ct = [&](double t, std::vector<cx>& u, std::vector<cx>& du) {
                const double h = 1e-5;
                std::vector<cx> a, ap, am, d;
                c(t, a, d);
                c(t + h, ap, d);
                c(t - h, am, d);
                u = symmetry_T_poles(a, w);
                auto up = symmetry_T_poles(ap, w), um = symmetry_T_poles(am, w);
                du.resize(u.size());
                for (std::size_t k = 0; k < u.size(); ++k) du[k] = (up[k] - um[k]) / (2.0 * h);
            };
            auto lhs = symmetry_T(end, w);
            auto rhs = garnier_flow_curve(symmetry_T(s, w), ct).state;
            CHECK(state_distance(lhs, rhs) < 1e-6);
        }
    }
}

TEST_CASE("painleve parameters") {
    auto p = pvi_from_theta({1.0, 0.0, 0.0, 1.0});
    CHECK(std::abs(p.alpha) + std::abs(p.beta) + std::abs(p.gamma) + std::abs(p.delta) == 0.0);
    auto q = pvi_from_theta({1.0, 1.0, 0.0, 1.0});
    CHECK(std::abs(q.b[0] - 0.5) + std::abs(q.b[1] - 0.5) + std::abs(q.b[2]) + std::abs(q.b[3]) < 1e-15);
    std::array<cx, 4> th{cx(0.3, 0.1), 0.7, -0.2, cx(1.4, -0.3)};
    auto a = pvi_from_theta(th);
    auto b = pvi_from_theta({-th[0], -th[1], -th[2], 2.0 - th[3]});
    CHECK(std::abs(a.alpha - b.alpha) + std::abs(a.beta - b.beta) + std::abs(a.gamma - b.gamma) +
              std::abs(a.delta - b.delta) < 1e-15);
    // the two labelings differ only by which exponent sits at x
    auto c = pvi_from_theta({th[1], th[0], th[2], th[3]}, PviLabeling::classical);
    CHECK(a.delta == c.delta);
    CHECK(a.b == c.b);
    auto back = theta_from_b(c.b);
    CHECK(std::abs(back[0] - th[1]) + std::abs(back[1] - th[0]) + std::abs(back[2] - th[2]) +
              std::abs(back[3] - th[3]) < 1e-15);
}

TEST_CASE("painleve residual detects solutions") {
    std::mt19937_64 rng(10);
    auto s = random_state(1, rng);
    auto pv = pvi_from_theta({s.theta[0], s.theta[1], s.theta[2], s.theta_inf});
    GarnierFlowOptions fo;
    fo.record = true;
    fo.samples = 9;
    fo.ode.rtol = 1e-12;
    fo.ode.atol = 1e-14;
    auto out = garnier_flow(s, move_u(s, 0, cx(0.1, 0.05)), fo);
    std::vector<PviSample> good, bad;
    for (const auto& st : out.trajectory) {
        // y' from the Hamilton equation, y'' by differentiating it along the flow
        cx x = st.u[0];
        cx yp = hamiltonian_gradient(st, 0).d_rho[0];
        const double h = 1e-4;
        auto fwd = garnier_flow(st, move_u(st, 0, h), fo).state;
        auto bwd = garnier_flow(st, move_u(st, 0, -h), fo).state;
        cx ypp = (hamiltonian_gradient(fwd, 0).d_rho[0] - hamiltonian_gradient(bwd, 0).d_rho[0]) / (2.0 * h);
        good.push_back({x, st.nu[0], yp, ypp});
        bad.push_back({x, st.nu[0] + 1e-3, yp, ypp});
    }
    CHECK(pvi_residual(good, pv) < 1e-6);
    CHECK(pvi_residual(bad, pv) > 1e-4);
    CHECK_THROWS_AS(pvi_residual({{0.0, 0.5, 0.0, 0.0}}, pv), Error);
}

TEST_CASE("okamoto transformations") {
    OkamotoPoint pt{2.0, 1.0, {1.0, 1.0, 0.0, 0.0}};
    auto w4 = okamoto_w(pt, 3.0, Okamoto::w4);
    CHECK(w4.y == cx(2.0));
    CHECK(std::abs(w4.p) < 1e-15);
    CHECK(w4.b == std::array<cx, 4>{-1.0, -1.0, 0.0, 0.0});
    CHECK_THROWS_AS(okamoto_w(pt, 3.0, Okamoto::w2), Error);
    try {
        okamoto_w(pt, 3.0, Okamoto::w2);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unsupported);
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        OkamotoPoint q{cx(uni(rng), uni(rng)), cx(uni(rng), uni(rng)),
                       {cx(uni(rng), uni(rng)), cx(uni(rng), uni(rng)), cx(uni(rng), uni(rng)), cx(uni(rng), uni(rng))}};
        cx x(uni(rng) + 2.0, uni(rng));
        for (auto w : {Okamoto::w0, Okamoto::w1, Okamoto::w3, Okamoto::w4}) {
            auto r = okamoto_w(okamoto_w(q, x, w), x, w);
            double d = std::abs(r.y - q.y) + std::abs(r.p - q.p);
            for (int k = 0; k < 4; ++k) d += std::abs(r.b[k] - q.b[k]);
            CHECK(d < 1e-14);
        }
    }
}

TEST_CASE("parameter strata") {
    CHECK(d4_roots().size() == 24);
    auto z = classify_parameters({0.0, 0.0, 0.0, 0.0});
    CHECK(z.in_D);
    CHECK(z.witnesses.size() == 24);
    auto h = classify_parameters({0.5, 0.5, 0.0, 0.0});
    CHECK(h.in_M);
    bool found = false;
    for (const auto& w : h.witnesses) found = found || (w.root == std::array<int, 4>{1, 1, 0, 0} && w.k == 1);
    CHECK(found);
    auto g = classify_parameters({kPi / 7.0, std::exp(1.0) / 5.0, std::sqrt(2.0) / 3.0, 1.0 / kPi});
    CHECK_FALSE(g.in_M);
    auto p = classify_parameters({0.5, 0.5, 0.1234, 0.0});  // b1+b2, b1-b2 only
    CHECK(p.in_P);
    CHECK_FALSE(p.in_L);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<std::array<cx, 4>> samples = {{0.5, 0.5, 0.1234, 0.0}, {0.0, 0.0, 0.0, 0.0}, {0.3, 0.7, 0.2, 0.8}};
    for (int t = 0; t < 5; ++t) samples.push_back({uni(rng), uni(rng), uni(rng), uni(rng)});
    for (const auto& b : samples) {
        auto ref = classify_parameters(b);
        for (auto w : {Okamoto::w0, Okamoto::w1, Okamoto::w3, Okamoto::w4}) {
            auto img = okamoto_w({0.3, 0.1, b}, 2.0, w).b;
            auto r = classify_parameters(img);
            CHECK(r.rank == ref.rank);
        }
        for (int w : {1, 3, 4}) CHECK(classify_parameters(symmetry_T_b(b, w)).rank == ref.rank);
    }
}

TEST_CASE("singular configurations are reported") {
    GarnierState s;
    s.n = 2;
    s.nu = {0.3, 0.3};
    s.rho = {0.0, 0.0};
    s.u = {cx(0.5, 0.5), cx(1.5, 0.2), 0.0, 1.0};
    s.theta = {0.1, 0.2, 0.3, 0.4};
    s.theta_inf = 0.5;
    CHECK_THROWS_AS(hamiltonian(s, 0), Error);
    s.nu = {0.3, cx(0.5, 0.5)};
    CHECK_THROWS_AS(hamiltonian(s, 0), Error);
    s.nu = {0.3, cx(0.5, -0.5)};
    GarnierFlowOptions fo;
    fo.singular_distance = 0.35;  // artificially large: nu_1 starts 0.3 from u_3
    try {
        garnier_flow(s, move_u(s, 0, cx(0.01, 0.0)), fo);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::singular);
        CHECK(std::string(e.what()).find("movable singularity") != std::string::npos);
    }
    // the fixed poles may not move
    auto end = s.u;
    end[2] = 0.1;
    CHECK_THROWS_AS(garnier_flow(s, straight_path(s.u, end, 0.05)), Error);
}
