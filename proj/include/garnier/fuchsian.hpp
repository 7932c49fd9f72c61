#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "garnier/mat2.hpp"

namespace garnier {

// dPhi/dlambda = sum_k A_k / (lambda - u_k) Phi with n + 2 finite poles.
struct FuchsianSystem {
    int n = 1;
    std::vector<cx> poles;
    std::vector<Mat2> residues;
    std::vector<cx> theta;
    cx theta_inf{};

    int size() const { return n + 2; }
    // -sum_k A_k; equals the residue at infinity up to sign conventions.
    Mat2 infinity_residue() const;
};

// diag(theta/2, -theta/2), or the nilpotent block [[0,1],[0,0]] for theta == 0.
Mat2 infinity_normal_form(cx theta_inf);

struct Violation {
    std::string kind;
    std::string detail;
    double magnitude = 0.0;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// A zero residue at infinity is accepted when theta_inf == 0 (regular point).
ValidationReport validate(const FuchsianSystem& sys, double tol);
void require_valid(const FuchsianSystem& sys, double tol, const char* context);

Mat2 rhs_at(const FuchsianSystem& sys, cx lambda);

struct GarnierCoordinates {
    std::vector<cx> nu;
    std::vector<cx> rho;
};

GarnierCoordinates garnier_coordinates(const FuchsianSystem& sys);

// Coefficients (ascending powers) of sum_k A_{k,12} prod_{l != k} (lambda - u_l).
std::vector<cx> off_diagonal_numerator(const FuchsianSystem& sys);

// Upper-triangular residues [[-e_k t_k/2, x_k], [0, e_k t_k/2]]. The stored
// exponent of pole k is e_k t_k so that A_{k,11} = -theta_k/2. `upper` has
// either n+1 entries (the last is fixed by the residue sum) or n+2 entries.
FuchsianSystem build_triangular_family(const std::vector<cx>& poles, const std::vector<cx>& theta,
                                       const std::vector<int>& eps, cx theta_inf,
                                       const std::vector<cx>& upper = {}, double tol = 1e-10);

// Poles mapped affinely so that u_{n+1} = 0 and u_{n+2} = 1; residues unchanged.
FuchsianSystem normalize_poles(const FuchsianSystem& sys);

// Conjugate every residue by one diagonal matrix so that the largest-modulus
// (1,2) entry equals 1. Representative of the diagonal-conjugation orbit.
FuchsianSystem diagonal_representative(const FuchsianSystem& sys);

// Max entry difference between residues of two systems with equal sizes.
double residue_distance(const FuchsianSystem& a, const FuchsianSystem& b);

FuchsianSystem conjugate(const FuchsianSystem& sys, const Mat2& p);

bool is_integer(cx z, double tol, long* value = nullptr);

struct RandomSystemOptions {
    double pole_box = 1.5;         // poles in [-box, box]^2
    double min_pole_separation = 0.6;
    double theta_min = 0.15;       // exponents drawn from [theta_min, theta_max]
    double theta_max = 0.85;
    double entry_scale = 0.6;      // scale of random conjugating matrices
    std::vector<cx> theta;         // fixed exponents when given (n+2 values)
    std::optional<cx> theta_inf;   // fixed exponent at infinity when given
};

// Random system with real non-integer exponents satisfying all constraints.
FuchsianSystem random_system(int n, std::mt19937_64& rng, const RandomSystemOptions& opts = {});

}  // namespace garnier
