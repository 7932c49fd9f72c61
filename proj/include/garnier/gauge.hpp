#pragma once

#include <string>
#include <utility>
#include <vector>

#include "garnier/fuchsian.hpp"
#include "garnier/monodromy.hpp"

namespace garnier {

// One step of a transformation pipeline, kept for reproducibility.
struct AuditRecord {
    std::string op;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<cx> theta_pre, theta_post;
    cx theta_inf_pre{}, theta_inf_post{};
};

using AuditLog = std::vector<AuditRecord>;

struct GaugeOptions {
    cx a = 1.0;                 // free (1,2) entry of the theta-shift gauges
    double tol = 1e-8;          // eigenvalue and normal-form checks
    double constraint_tol = 1e-6;  // relative residual of the polynomial part after a gauge
    double scalar_tol = 1e-5;   // monodromy-side +-1 detection
    MonodromyOptions monodromy{};
    AuditLog* audit = nullptr;
};

// G(lambda) = lambda E + F with constant nonzero determinant.
struct LinearGauge {
    Mat2 e, f;
    Mat2 at(cx lambda) const { return lambda * e + f; }
};

// Residues G(u_k)^{-1} A_k G(u_k). Throws inconsistent if G^{-1} A G - G^{-1} G'
// has a non-vanishing polynomial part, i.e. the result is not Fuchsian.
FuchsianSystem apply_gauge(const FuchsianSystem& sys, const LinearGauge& g, cx theta_inf, double constraint_tol = 1e-6);

// The single-step gauge raising theta_inf by 2.
LinearGauge shift_gauge_inf(const FuchsianSystem& sys, cx a = 1.0);

// Constant conjugation bringing -sum A_k to the normal form of sys.theta_inf.
FuchsianSystem to_normal_form(const FuchsianSystem& sys, double tol = 1e-8);

// Conjugation by [[0,1],[1,0]] with theta_inf -> -theta_inf.
FuchsianSystem sign_flip(const FuchsianSystem& sys, double tol = 1e-8);

// theta_inf -> theta_inf + 2N (N may be negative).
FuchsianSystem shift_theta_inf(const FuchsianSystem& sys, int N, const GaugeOptions& opts = {});
// theta_j -> theta_j - 2N; j = -1 is infinity.
FuchsianSystem shift_theta_down(const FuchsianSystem& sys, int j, int N, const GaugeOptions& opts = {});
// theta_j -> theta_j + 2N at a finite pole or at infinity (j = -1).
FuchsianSystem shift_theta(const FuchsianSystem& sys, int j, int N, const GaugeOptions& opts = {});

// lambda -> 1/(lambda - u_k): u_k goes to infinity and infinity to 0 (kept in slot k).
FuchsianSystem mobius_swap(const FuchsianSystem& sys, int k, double tol = 1e-8);

FuchsianSystem translate_poles(const FuchsianSystem& sys, cx shift);
FuchsianSystem insert_zero_pole(const FuchsianSystem& sys, cx u, int index);
FuchsianSystem remove_pole(const FuchsianSystem& sys, int k);

FuchsianSystem reduce_identity_pole(const FuchsianSystem& sys, int k, const GaugeOptions& opts = {});
// Apply reduce_identity_pole to every listed pole, ascending index.
FuchsianSystem reduce_identity_poles(const FuchsianSystem& sys, std::vector<int> poles, const GaugeOptions& opts = {});

// New pole u_new with theta = -2 and trivial monodromy, inserted at `index`
// (default: before the last two poles).
FuchsianSystem extend_with_identity_pole(const FuchsianSystem& sys, cx u_new, cx family_param, int index = -1,
                                         const GaugeOptions& opts = {});

FuchsianSystem reduce_infinity(const FuchsianSystem& sys, int k, const GaugeOptions& opts = {});

struct PoleShift {
    int pole = 0;
    int N = 0;
};

struct TriangularResult {
    FuchsianSystem system;
    long K = 0;                      // exponent-sum defect before the shifts
    std::vector<PoleShift> shifts;   // applied theta_i -> theta_i + 2N_i
    std::vector<int> eps;            // signs relating input and output exponents
    Mat2 conjugator;                 // constant matrix applied last
};

// Common eigenvector of all residues, if any (unit norm).
std::optional<std::array<cx, 2>> common_eigenvector(const std::vector<Mat2>& residues, double tol);

TriangularResult triangularize_reducible(const FuchsianSystem& sys, const GaugeOptions& opts = {});

}  // namespace garnier
