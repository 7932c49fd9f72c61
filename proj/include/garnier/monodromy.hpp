#pragma once

#include <optional>
#include <vector>

#include "garnier/fuchsian.hpp"
#include "garnier/ode.hpp"

namespace garnier {

// Loops start at a far base point opposite to the common cut direction eta.
// In the rotated frame w = (lambda - center) e^{-i eta} every cut is the ray
// w_j + t, t >= 0, and loop j approaches u_j along Im w = Im w_j from the left.
struct LoopBasis {
    cx center{};
    cx base_point{};
    double eta = 0.0;
    double base_radius = 0.0;        // |base_point - center|
    double left_edge = 0.0;          // real part (rotated frame) of the vertical approach leg
    std::vector<int> order;          // pole indices by ascending Im w_j
    std::vector<double> circle_radius;
    double exclusion = 0.0;          // minimal admissible distance from path to a pole
};

struct MonodromyOptions {
    OdeOptions ode{};                    // requested accuracy of the matrices
    double local_factor = 1e-2;          // per-step tolerance = factor * requested tolerance
    double radius_fraction = 1.0 / 3.0;  // circle radius / distance to nearest other pole
    double base_factor = 10.0;           // base radius / max distance of poles from the center
    std::optional<double> eta;           // cut direction; chosen automatically when empty
    int threads = 1;
    double series_tol = 1e-17;
    int max_series_terms = 400;
    bool direct_infinity = true;
};

LoopBasis make_loop_basis(const FuchsianSystem& sys, const MonodromyOptions& opts = {});

// Same base point and cut direction, loop data recomputed for the poles of sys.
LoopBasis rebase_loop_basis(const LoopBasis& basis, const FuchsianSystem& sys, const MonodromyOptions& opts = {});

struct PathSegment {
    enum Kind { line, arc } kind = line;
    cx a{}, b{};          // line endpoints
    cx center{};          // arc: lambda = center + radius e^{i t}, t from t0 to t1
    double radius = 0.0;
    double t0 = 0.0, t1 = 0.0;
};

std::vector<PathSegment> loop_path(const LoopBasis& basis, const FuchsianSystem& sys, int pole);
std::vector<PathSegment> infinity_path(const LoopBasis& basis);

// X with X(start) = 1 continued along the path: Phi_end = X Phi_start.
Mat2 transport(const FuchsianSystem& sys, const std::vector<PathSegment>& path, const OdeOptions& ode,
               double exclusion = 0.0);

struct Normalization {
    Mat2 a_inf;            // model residue at infinity used in the expansion
    Mat2 r_inf;            // resonant exponent matrix from the series
    std::vector<Mat2> y;   // Y_0 = 1, Y_1, ... in Phi = Y(lambda) lambda^{-A} lambda^{-R}
};

Normalization normalization_series(const FuchsianSystem& sys, double radius, double tol, int max_terms);
// arg of lambda in (eta - 2 pi, eta].
double branch_arg(cx lambda, double eta);
Mat2 phi_infinity(const Normalization& nz, cx lambda, double eta);

struct MonodromyData {
    int n = 1;
    std::vector<Mat2> m;           // M_1 .. M_{n+2}
    Mat2 m_inf;                    // from a clockwise loop around infinity
    Mat2 m_inf_relation;           // (M_{s(n+2)} ... M_{s(1)})^{-1} in loop order s
    std::vector<Mat2> r;           // R_1 .. R_{n+2}
    Mat2 r_inf;
    Mat2 a_inf;
    std::vector<Mat2> c;           // connection matrices, empty until computed
    std::vector<int> order;
    std::vector<cx> theta;
    cx theta_inf{};
    double tolerance = 0.0;        // integrator relative tolerance
    double inf_agreement = 0.0;    // |m_inf - m_inf_relation|
};

MonodromyData compute_monodromy(const FuchsianSystem& sys, const LoopBasis& basis, const MonodromyOptions& opts = {});
MonodromyData compute_monodromy(const FuchsianSystem& sys, const MonodromyOptions& opts = {});

Mat2 r_matrix_infinity(const FuchsianSystem& sys);
Mat2 r_matrix_pole(const FuchsianSystem& sys, int k);

// e^{2 pi i J_k} e^{2 pi i R_k}: the local monodromy in the basis Phi_k.
Mat2 local_monodromy(cx theta, const Mat2& r);

MonodromyData connection_matrices(const MonodromyData& data, const std::vector<int>& indices = {}, double tol = 1e-6);

struct GroupClass {
    std::vector<int> smaller_indices;
    int l = 0;
    bool reducible = false;
    std::optional<std::array<cx, 2>> invariant_vector;
};

GroupClass classify_group(const MonodromyData& data, double tol = 1e-6);

struct RelationReport {
    double cyclic = 0.0;
    std::vector<double> eigen;
    double inf_consistency = 0.0;
    double max() const;
};

RelationReport check_relations(const MonodromyData& data);
RelationReport check_relations(const MonodromyData& data, const std::vector<cx>& theta);

// Product M_{s(n+2)} ... M_{s(1)} in loop order.
Mat2 ordered_product(const MonodromyData& data);

struct IsomonodromyResult {
    double deviation = 0.0;
    cx alignment{};  // c in L = 1 + c E for resonant infinity, else 0
};

IsomonodromyResult verify_isomonodromy(const FuchsianSystem& sys0, const FuchsianSystem& sys1, const LoopBasis& basis,
                                       const MonodromyOptions& opts = {});

}  // namespace garnier
