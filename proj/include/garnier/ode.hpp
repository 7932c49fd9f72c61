#pragma once

#include <functional>
#include <vector>

#include "garnier/mat2.hpp"

namespace garnier {

using CVec = std::vector<cx>;

// dy/dt = f(t, y) with real time t and complex state.
using OdeRhs = std::function<void(double t, const CVec& y, CVec& dy)>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;      // 0 selects an automatic first step
    double h_min_rel = 1e-12; // abort when |h| < h_min_rel * |t1 - t0|
    long max_steps = 2000000;
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    long evals = 0;
    double h_last = 0.0;
};

// Adaptive Dormand-Prince 8(5,3) integration of y from t0 to t1, in place.
// Throws Error(integration) if the step controller fails; the message carries
// the time at which it gave up.
OdeStats integrate(const OdeRhs& f, double t0, double t1, CVec& y, const OdeOptions& opts);

}  // namespace garnier
