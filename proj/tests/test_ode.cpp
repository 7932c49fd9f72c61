#include "doctest.h"

#include <cmath>

#include "garnier/error.hpp"
#include "garnier/ode.hpp"

using namespace garnier;

TEST_CASE("complex exponential to integrator tolerance") {
    cx k(0.3, 2.0);
    OdeRhs f = [&](double, const CVec& y, CVec& dy) { dy[0] = k * y[0]; };
    CVec y{1.0};
    OdeOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    integrate(f, 0.0, 3.0, y, o);
    CHECK(std::abs(y[0] - std::exp(3.0 * k)) < 1e-10);
}

TEST_CASE("backward integration returns to the start") {
    OdeRhs f = [](double t, const CVec& y, CVec& dy) {
        dy[0] = y[1];
        dy[1] = -y[0] + cx(0.0, std::sin(t));
    };
    CVec y{1.0, cx(0.0, 1.0)};
    CVec y0 = y;
    OdeOptions o;
    integrate(f, 0.0, 5.0, y, o);
    integrate(f, 5.0, 0.0, y, o);
    CHECK(std::abs(y[0] - y0[0]) < 1e-8);
    CHECK(std::abs(y[1] - y0[1]) < 1e-8);
}

TEST_CASE("blow-up reports the time of failure") {
    // y' = y^2 with y(0) = 1 blows up at t = 1.
    OdeRhs f = [](double, const CVec& y, CVec& dy) { dy[0] = y[0] * y[0]; };
    CVec y{1.0};
    OdeOptions o;
    o.h_min_rel = 1e-10;
    bool thrown = false;
    try {
        integrate(f, 0.0, 2.0, y, o);
    } catch (const Error& e) {
        thrown = true;
        CHECK(e.code() == ErrorCode::integration);
        CHECK(std::string(e.what()).find("t=") != std::string::npos);
    }
    CHECK(thrown);
}

TEST_CASE("zero-length interval leaves the state untouched") {
    OdeRhs f = [](double, const CVec& y, CVec& dy) { dy[0] = y[0]; };
    CVec y{cx(2.0, 1.0)};
    auto st = integrate(f, 1.0, 1.0, y, OdeOptions{});
    CHECK(st.steps == 0);
    CHECK(y[0] == cx(2.0, 1.0));
}
