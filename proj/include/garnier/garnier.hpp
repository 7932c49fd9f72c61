#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "garnier/fuchsian.hpp"
#include "garnier/ode.hpp"
#include "garnier/schlesinger.hpp"

namespace garnier {

// Canonical coordinates of the Garnier system G_n. The deformation variables
// are u_1..u_n; u_{n+1} and u_{n+2} are normally 0 and 1.
struct GarnierState {
    int n = 1;
    std::vector<cx> nu, rho;
    std::vector<cx> u;       // n + 2 poles
    std::vector<cx> theta;   // n + 2 exponents
    cx theta_inf{};

    cx kappa() const;
    bool normalized(double tol = 0.0) const;
};

// kappa = ((sum theta - 1)^2 - (theta_inf - 1)^2) / 4
cx garnier_kappa(const std::vector<cx>& theta, cx theta_inf);

void require_state(const GarnierState& s, const char* context);

// State built from the coordinates of a Fuchsian system (poles copied as is).
GarnierState garnier_state(const FuchsianSystem& sys);

cx hamiltonian(const GarnierState& s, int i);

struct HamiltonianGradient {
    std::vector<cx> d_nu;   // dK_i/dnu_j
    std::vector<cx> d_rho;  // dK_i/drho_j
};

HamiltonianGradient hamiltonian_gradient(const GarnierState& s, int i);

// Position of the poles and their velocity at curve parameter t.
using PoleCurve = std::function<void(double t, std::vector<cx>& u, std::vector<cx>& du)>;

struct GarnierFlowOptions {
    OdeOptions ode{};
    int samples = 0;               // interior trajectory points, evenly spaced in t
    bool record = false;
    double singular_distance = 1e-6;  // nu closer than this to a pole or another nu aborts
};

struct GarnierFlowResult {
    GarnierState state;
    std::vector<double> t;
    std::vector<GarnierState> trajectory;
    long steps = 0;
};

GarnierFlowResult garnier_flow(const GarnierState& s, const DeformationPath& path, const GarnierFlowOptions& opts = {});
GarnierFlowResult garnier_flow_curve(const GarnierState& s, const PoleCurve& curve, const GarnierFlowOptions& opts = {});

// Permutation p minimizing sum |b[p[k]] - a[k]|, i.e. b reordered to follow a.
std::vector<int> match_roots(const std::vector<cx>& a, const std::vector<cx>& b);

// Symmetries T_j (j = 1..n), T_{n+2} (which = n+2) and T_{n+3} (which = n+3).
GarnierState symmetry_T(const GarnierState& s, int which);
// Curve of transformed poles for a curve of original poles (used to compare flows).
std::vector<cx> symmetry_T_poles(const std::vector<cx>& u, int which);

enum class PviLabeling {
    garnier,    // theta_1 at x, theta_2 at 0, theta_3 at 1
    classical,  // theta_1 at 0, theta_2 at x, theta_3 at 1
};

struct PviParams {
    cx theta_0{}, theta_x{}, theta_1{}, theta_inf{};
    cx alpha{}, beta{}, gamma{}, delta{};
    std::array<cx, 4> b{};
};

PviParams pvi_from_theta(const std::array<cx, 4>& theta, PviLabeling labeling = PviLabeling::garnier);
// Exponents (classical labeling) from b-coordinates.
std::array<cx, 4> theta_from_b(const std::array<cx, 4>& b);

// y'' from the sixth Painleve equation.
cx pvi_rhs(cx x, cx y, cx yp, const PviParams& p);

struct PviSample {
    cx x, y, yp, ypp;
};

double pvi_residual(const std::vector<PviSample>& samples, const PviParams& p);

enum class Okamoto { w0 = 0, w1 = 1, w2 = 2, w3 = 3, w4 = 4 };

struct OkamotoPoint {
    cx y, p;
    std::array<cx, 4> b;
};

OkamotoPoint okamoto_w(const OkamotoPoint& pt, cx x, Okamoto which);

struct StratumWitness {
    std::array<int, 4> root;
    long k = 0;
};

struct StratumReport {
    bool in_M = false, in_P = false, in_L = false, in_D = false;
    int rank = 0;
    std::vector<StratumWitness> witnesses;
};

const std::vector<std::array<int, 4>>& d4_roots();
StratumReport classify_parameters(const std::array<cx, 4>& b, double int_tol = 1e-9);

// b-coordinates after a Garnier symmetry of G_1 acting on the exponents.
std::array<cx, 4> symmetry_T_b(const std::array<cx, 4>& b, int which);

}  // namespace garnier
