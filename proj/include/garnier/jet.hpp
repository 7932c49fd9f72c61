#pragma once

#include "garnier/mat2.hpp"

namespace garnier {

// Second-order Taylor jet of a function of x: value, first and second derivative.
struct Jet {
    cx v{}, d{}, dd{};

    static Jet constant(cx c) { return {c, 0.0, 0.0}; }
    static Jet variable(cx x) { return {x, 1.0, 0.0}; }
};

inline Jet operator+(Jet a, const Jet& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet operator-(Jet a, const Jet& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d, -a.dd}; }
inline Jet operator+(Jet a, cx c) { a.v += c; return a; }
inline Jet operator+(cx c, Jet a) { a.v += c; return a; }
inline Jet operator-(Jet a, cx c) { a.v -= c; return a; }
inline Jet operator-(cx c, const Jet& a) { return {c - a.v, -a.d, -a.dd}; }
inline Jet operator*(const Jet& a, cx c) { return {a.v * c, a.d * c, a.dd * c}; }
inline Jet operator*(cx c, const Jet& a) { return a * c; }
inline Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
inline Jet operator/(const Jet& a, const Jet& b) {
    const cx h = a.v / b.v;
    const cx hd = (a.d - h * b.d) / b.v;
    return {h, hd, (a.dd - 2.0 * hd * b.d - h * b.dd) / b.v};
}
inline Jet operator/(const Jet& a, cx c) { return {a.v / c, a.d / c, a.dd / c}; }
inline Jet operator/(cx c, const Jet& b) { return Jet::constant(c) / b; }

}  // namespace garnier
