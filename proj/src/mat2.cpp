#include "garnier/mat2.hpp"

#include <algorithm>
#include <cmath>

#include "garnier/error.hpp"

namespace garnier {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::parameter: return "parameter";
        case ErrorCode::degenerate: return "degenerate";
        case ErrorCode::singular: return "singular";
        case ErrorCode::ill_conditioned: return "ill_conditioned";
        case ErrorCode::integration: return "integration";
        case ErrorCode::branch: return "branch";
        case ErrorCode::unsupported: return "unsupported";
        case ErrorCode::inconsistent: return "inconsistent";
        case ErrorCode::schema: return "schema";
    }
    return "unknown";
}

bool Mat2::finite() const {
    auto f = [](cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return f(a11) && f(a12) && f(a21) && f(a22);
}

Mat2& Mat2::operator+=(const Mat2& o) {
    a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
    return *this;
}

Mat2& Mat2::operator-=(const Mat2& o) {
    a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22;
    return *this;
}

Mat2& Mat2::operator*=(cx s) {
    a11 *= s; a12 *= s; a21 *= s; a22 *= s;
    return *this;
}

Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
Mat2 operator-(const Mat2& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
Mat2 operator*(cx s, Mat2 a) { return a *= s; }
Mat2 operator*(Mat2 a, cx s) { return a *= s; }
Mat2 operator/(Mat2 a, cx s) { return a *= (1.0 / s); }

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

bool operator==(const Mat2& a, const Mat2& b) {
    return a.a11 == b.a11 && a.a12 == b.a12 && a.a21 == b.a21 && a.a22 == b.a22;
}

double norm(const Mat2& m) {
    return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}

Mat2 inverse(const Mat2& m) {
    cx d = m.det();
    if (d == cx(0.0)) throw Error(ErrorCode::singular, "inverse of a singular 2x2 matrix");
    return Mat2{m.a22, -m.a12, -m.a21, m.a11} / d;
}

Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

Mat2 transpose(const Mat2& m) { return {m.a11, m.a21, m.a12, m.a22}; }

Mat2 expm(const Mat2& m) {
    // m = s + N with N traceless, N^2 = q.
    cx s = 0.5 * m.trace();
    Mat2 n = m - Mat2::diag(s, s);
    cx q = -n.det();
    cx ch, shc;
    if (std::abs(q) < 1e-2) {
        ch = 1.0 + q / 2.0 + q * q / 24.0 + q * q * q / 720.0 + q * q * q * q / 40320.0;
        shc = 1.0 + q / 6.0 + q * q / 120.0 + q * q * q / 5040.0 + q * q * q * q / 362880.0;
    } else {
        cx r = std::sqrt(q);
        ch = std::cosh(r);
        shc = std::sinh(r) / r;
    }
    cx e = std::exp(s);
    return e * (Mat2::diag(ch, ch) + shc * n);
}

Mat2 pow_log(const Mat2& m, cx log_val) { return expm(log_val * m); }

std::array<cx, 2> eigenvalues(const Mat2& m) {
    cx h = 0.5 * m.trace();
    cx disc = std::sqrt(0.25 * (m.a11 - m.a22) * (m.a11 - m.a22) + m.a12 * m.a21);
    return {h + disc, h - disc};
}

namespace {

// Unit vector whose largest-modulus component is real and positive.
std::array<cx, 2> normalized(cx x, cx y) {
    double nx = std::abs(x), ny = std::abs(y);
    double len = std::hypot(nx, ny);
    cx ph = nx >= ny ? x / nx : y / ny;
    return {x / (ph * len), y / (ph * len)};
}

std::array<cx, 2> eigenvector(const Mat2& m, cx lam) {
    cx x1 = m.a12, y1 = lam - m.a11;
    cx x2 = lam - m.a22, y2 = m.a21;
    double n1 = std::hypot(std::abs(x1), std::abs(y1));
    double n2 = std::hypot(std::abs(x2), std::abs(y2));
    if (n1 >= n2) return normalized(x1, y1);
    return normalized(x2, y2);
}

EigJordan build(const Mat2& m, cx l1, cx l2, double tol, JordanConvention conv) {
    EigJordan out;
    double scale = 1.0 + norm(m);
    out.eigenvalues = {l1, l2};
    if (std::abs(l1 - l2) < tol * scale) {
        cx lam = 0.5 * m.trace();
        Mat2 n = m - Mat2::diag(lam, lam);
        out.eigenvalues = {lam, lam};
        if (norm(n) < tol * scale) {
            out.transform = Mat2::identity();
            out.jordan = Mat2::diag(lam, lam);
            return out;
        }
        cx c = conv == JordanConvention::monodromy ? cx(0.0, 2.0 * kPi) : cx(1.0);
        // t2 is a unit vector outside the kernel, t1 = N t2 / c spans the kernel.
        double c1 = std::hypot(std::abs(n.a11), std::abs(n.a21));
        double c2 = std::hypot(std::abs(n.a12), std::abs(n.a22));
        Mat2 t;
        if (c1 >= c2) {
            t = {n.a11 / c, 1.0, n.a21 / c, 0.0};
        } else {
            t = {n.a12 / c, 0.0, n.a22 / c, 1.0};
        }
        out.transform = t;
        out.jordan = {lam, c, 0.0, lam};
        out.diagonalizable = false;
    } else {
        auto v1 = eigenvector(m, l1);
        auto v2 = eigenvector(m, l2);
        out.transform = {v1[0], v2[0], v1[1], v2[1]};
        out.jordan = Mat2::diag(l1, l2);
    }
    if (std::abs(out.transform.det()) < 1e-14 * std::max(1.0, norm(out.transform) * norm(out.transform))) {
        throw Error(ErrorCode::ill_conditioned, "eig_jordan: singular transform");
    }
    return out;
}

}  // namespace

EigJordan eig_jordan(const Mat2& m, double tol, JordanConvention conv) {
    if (!m.finite()) throw Error(ErrorCode::parameter, "eig_jordan: non-finite matrix");
    auto ev = eigenvalues(m);
    return build(m, ev[0], ev[1], tol, conv);
}

EigJordan eig_jordan_ordered(const Mat2& m, cx first, double tol, JordanConvention conv) {
    if (!m.finite()) throw Error(ErrorCode::parameter, "eig_jordan: non-finite matrix");
    auto ev = eigenvalues(m);
    if (std::abs(ev[1] - first) < std::abs(ev[0] - first)) std::swap(ev[0], ev[1]);
    return build(m, ev[0], ev[1], tol, conv);
}

ScalarClass scalar_class(const Mat2& m, double tol) {
    if (norm(m - Mat2::identity()) < tol) return ScalarClass::plus_identity;
    if (norm(m + Mat2::identity()) < tol) return ScalarClass::minus_identity;
    return ScalarClass::not_scalar;
}

const char* scalar_class_name(ScalarClass c) {
    switch (c) {
        case ScalarClass::plus_identity: return "plus_identity";
        case ScalarClass::minus_identity: return "minus_identity";
        case ScalarClass::not_scalar: return "not_scalar";
    }
    return "not_scalar";
}

}  // namespace garnier
