#pragma once

#include <array>
#include <string>
#include <vector>

#include "garnier/garnier.hpp"
#include "garnier/ode.hpp"
#include "garnier/schlesinger.hpp"

namespace garnier {

// x(1-x) u'' + (c0 - c1 x) u' - d0 u = 0; the Gauss equation has c0 = c, c1 = a+b+1, d0 = ab.
struct HypergeometricOde {
    cx c0{}, c1{}, d0{};

    static HypergeometricOde from_abc(cx a, cx b, cx c) { return {c, a + b + 1.0, a * b}; }
    // Roots (a, b) of t^2 - (c1 - 1) t + d0.
    std::array<cx, 2> ab() const;
    cx second(cx x, cx u, cx up) const;
    cx third(cx x, cx u, cx up) const;
};

struct HypSample {
    cx x, u, up, upp;
};

struct HypOptions {
    double clearance = 0.05;    // minimal distance of the path from 0 and 1
    double base_radius = 0.1;   // series base point radius
    int series_terms = 60;
    double overflow = 1e150;
    OdeOptions ode{1e-13, 1e-15};
};

// Truncated Gauss series and its derivative at x.
std::array<cx, 2> hyp2f1_series(cx a, cx b, cx c, cx x, int terms = 60);

// Values (u, u') of the local basis 2F1(a,b;c;x) and x^{1-c} 2F1(a-c+1,b-c+1;2-c;x) at a point near 0.
std::array<std::array<cx, 2>, 2> hypergeometric_basis(const HypergeometricOde& ode, cx x, int terms = 60);

// Integrates along the polyline `path` from (u0, u0') at path[0]; one sample per vertex.
std::vector<HypSample> solve_hypergeometric(const HypergeometricOde& ode, const std::vector<cx>& path, cx u0, cx up0,
                                            const HypOptions& opts = {});

// u = u_1 + mix * u_2 from the series base point 0.1 * x_samples[0] / |x_samples[0]|, continued through the samples.
std::vector<HypSample> hypergeometric_mixed(const HypergeometricOde& ode, cx mix, const std::vector<cx>& x_samples,
                                            const HypOptions& opts = {});

enum class ClassicalFamily { reducible_riccati, generalized_chazy, riccati_type, forbidden, lauricella_locus };

const char* family_name(ClassicalFamily f);
ClassicalFamily family_from_name(const std::string& name);

struct ClassicalSample {
    cx x, y, p, yp, ypp;
    double residual = 0.0;  // PVI residual with the recorded parameters
    double aux = 0.0;       // first-order (ric1 / rt) or quartic residual
};

struct ClassicalSolution {
    ClassicalFamily family = ClassicalFamily::reducible_riccati;
    std::array<cx, 3> theta{};  // theta at 0, x, 1
    cx theta_inf{};
    cx mix{};                   // u = u_1 + mix u_2, or f(x_0) for the Riccati-type family
    cx x0{};
    std::vector<ClassicalSample> samples;
    std::vector<std::string> dropped;
    double pvi_residual = 0.0;  // max over samples
    double aux_residual = 0.0;
    std::string aux_name;
    double tolerance = 0.0;     // family tolerance on pvi_residual
    double aux_tolerance = 0.0;
    int chart_switches = 0;     // f <-> 1/f changes during a Riccati-type continuation

    bool verified() const { return !samples.empty() && pvi_residual < tolerance && aux_residual < aux_tolerance; }
};

struct ClassicalOptions {
    HypOptions hyp{};
    OdeOptions ode{1e-13, 1e-15};
    double denominator_tol = 1e-10;  // relative size below which a sample is dropped
    int threads = 1;                 // residual evaluation
};

// Exponents at 0, x, 1, labelled (theta_1, theta_2, theta_3).
PviParams classical_params(const std::array<cx, 3>& theta, cx theta_inf);

// Canonical momentum of a PVI solution: (y' x(x-1)/T + theta_0/y + (theta_x-1)/(y-x) + theta_1/(y-1)) / 2,
// T = y(y-1)(y-x); it coincides with rho of the n = 1 Garnier system.
cx pvi_momentum(cx x, cx y, cx yp, const std::array<cx, 3>& theta);

std::vector<cx> default_samples(int count = 20);

// theta_inf = -(theta_1+theta_2+theta_3).
ClassicalSolution reducible_riccati_solution(const std::array<cx, 3>& theta, cx mix, const std::vector<cx>& x_samples,
                                             const ClassicalOptions& opts = {});
// Right-hand side of the first-order Riccati equation satisfied by that family.
cx reducible_riccati_rhs(cx x, cx y, const std::array<cx, 3>& theta);

// Upper-triangular Fuchsian system (poles x, 0, 1) whose Garnier coordinates are the sample (y, p).
FuchsianSystem riccati_fuchsian_system(const ClassicalSample& s, const std::array<cx, 3>& theta);

// theta_inf = -1, W = u/u' with u a solution of the auxiliary Gauss equation.
ClassicalSolution chazy_solution(const std::array<cx, 3>& theta, cx mix, const std::vector<cx>& x_samples,
                                 const ClassicalOptions& opts = {});
HypergeometricOde chazy_ode(const std::array<cx, 3>& theta);
// The rational expression y(W, x); throws singular when its denominator vanishes.
cx chazy_y(cx W, cx x, const std::array<cx, 3>& theta, double denominator_tol = 1e-10);

enum class QuarticLead {
    printed,  // b_0 = 16 P^4
    derived,  // b_0 = 16 P^2, the leading coefficient of the eliminated relation
};

std::array<cx, 5> chazy_quartic_coefficients(cx y, cx x, const std::array<cx, 3>& theta, cx theta_inf,
                                             QuarticLead lead = QuarticLead::printed);
double chazy_constraint(cx y, cx p, cx x, const std::array<cx, 3>& theta, cx theta_inf,
                        QuarticLead lead = QuarticLead::printed);

// theta_inf = 2; f(x0) = f_init.
ClassicalSolution riccati_type_solution(const std::array<cx, 3>& theta, cx theta_inf, cx x0, cx f_init,
                                        const std::vector<cx>& x_samples, const ClassicalOptions& opts = {});
cx riccati_type_rhs(cx x, cx f, const std::array<cx, 3>& theta);
cx riccati_type_y(cx f, cx x, const std::array<cx, 3>& theta);

// Garnier flow from rho = 0 on the kappa = 0 locus. theta are the exponents of the n+2 finite poles,
// eps the signs with theta_inf = sum eps_k theta_k; an explicit theta_inf is checked against kappa = 0.
struct LauricellaResult {
    GarnierFlowResult flow;
    double max_rho = 0.0;
};

LauricellaResult lauricella_locus_flow(const std::vector<cx>& theta, const std::vector<int>& eps,
                                       const DeformationPath& path, const std::vector<cx>& nu_init,
                                       const cx* theta_inf = nullptr, double rho_tol = 1e-8,
                                       const GarnierFlowOptions& opts = {});

// Applies w_0, w_1, w_3 or w_4 to every sample and re-evaluates the residual.
ClassicalSolution transform_solution(const ClassicalSolution& sol, Okamoto which);

}  // namespace garnier
