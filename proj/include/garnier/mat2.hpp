#pragma once

#include <array>
#include <complex>

namespace garnier {

using cx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cx kI{0.0, 1.0};

// Dense complex 2x2 matrix, row-major entries a11 a12 / a21 a22.
struct Mat2 {
    cx a11{}, a12{}, a21{}, a22{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(cx d1, cx d2) { return {d1, 0.0, 0.0, d2}; }

    cx trace() const { return a11 + a22; }
    cx det() const { return a11 * a22 - a12 * a21; }
    bool finite() const;

    Mat2& operator+=(const Mat2& o);
    Mat2& operator-=(const Mat2& o);
    Mat2& operator*=(cx s);
};

Mat2 operator+(Mat2 a, const Mat2& b);
Mat2 operator-(Mat2 a, const Mat2& b);
Mat2 operator-(const Mat2& a);
Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator*(cx s, Mat2 a);
Mat2 operator*(Mat2 a, cx s);
Mat2 operator/(Mat2 a, cx s);
bool operator==(const Mat2& a, const Mat2& b);

// Max-absolute-entry norm.
double norm(const Mat2& m);
Mat2 inverse(const Mat2& m);
Mat2 commutator(const Mat2& a, const Mat2& b);
Mat2 transpose(const Mat2& m);
Mat2 expm(const Mat2& m);
// m^{power} := exp(log_val * m) for a precomputed logarithm of the base.
Mat2 pow_log(const Mat2& m, cx log_val);

std::array<cx, 2> eigenvalues(const Mat2& m);

enum class JordanConvention {
    monodromy,  // off-diagonal entry 2*pi*i for defective matrices
    residue,    // off-diagonal entry 1 for defective matrices
};

struct EigJordan {
    std::array<cx, 2> eigenvalues;
    Mat2 transform;  // M = transform * jordan * transform^{-1}
    Mat2 jordan;
    bool diagonalizable = true;
};

// Throws Error(ill_conditioned) when the computed transform is singular.
EigJordan eig_jordan(const Mat2& m, double tol, JordanConvention conv = JordanConvention::monodromy);

// Diagonalize with a prescribed eigenvalue order: the result's jordan(1,1)
// is the eigenvalue closest to `first`.
EigJordan eig_jordan_ordered(const Mat2& m, cx first, double tol,
                             JordanConvention conv = JordanConvention::residue);

enum class ScalarClass { plus_identity, minus_identity, not_scalar };

ScalarClass scalar_class(const Mat2& m, double tol);
const char* scalar_class_name(ScalarClass c);

}  // namespace garnier
