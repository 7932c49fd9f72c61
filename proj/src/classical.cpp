#include "garnier/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "garnier/error.hpp"
#include "garnier/jet.hpp"

namespace garnier {

namespace {

double segment_distance(cx a, cx b, cx p) {
    const cx d = b - a;
    const double l2 = std::norm(d);
    double t = l2 == 0.0 ? 0.0 : std::real((p - a) * std::conj(d)) / l2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(a + t * d - p);
}

bool finite(cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <class F>
void parallel_for(std::size_t count, int threads, F&& f) {
    const std::size_t t = std::clamp<std::size_t>(threads < 1 ? 1 : static_cast<std::size_t>(threads), 1, count ? count : 1);
    if (t == 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    for (std::size_t w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += t) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string at_x(cx x) {
    std::ostringstream os;
    os.precision(6);
    os << "x = (" << x.real() << ", " << x.imag() << ")";
    return os.str();
}

cx sum3(const std::array<cx, 3>& t) { return t[0] + t[1] + t[2]; }

void require_gate(cx got, cx want, const char* family, const char* rule) {
    if (std::abs(got - want) > 1e-12 * (1.0 + std::abs(want))) {
        std::ostringstream os;
        os << family << ": requires " << rule << ", got theta_inf = (" << got.real() << ", " << got.imag() << ")";
        throw Error(ErrorCode::parameter, os.str());
    }
}

void summarize(ClassicalSolution& sol) {
    sol.pvi_residual = 0.0;
    sol.aux_residual = 0.0;
    for (const auto& s : sol.samples) {
        sol.pvi_residual = std::max(sol.pvi_residual, s.residual);
        sol.aux_residual = std::max(sol.aux_residual, s.aux);
    }
}

}  // namespace

std::array<cx, 2> HypergeometricOde::ab() const {
    const cx s = c1 - 1.0;
    const cx disc = std::sqrt(s * s - 4.0 * d0);
    return {(s + disc) / 2.0, (s - disc) / 2.0};
}

cx HypergeometricOde::second(cx x, cx u, cx up) const {
    return (d0 * u - (c0 - c1 * x) * up) / (x * (1.0 - x));
}

cx HypergeometricOde::third(cx x, cx u, cx up) const {
    const cx upp = second(x, u, up);
    const cx dn = d0 * up + c1 * up - (c0 - c1 * x) * upp;
    return (dn - upp * (1.0 - 2.0 * x)) / (x * (1.0 - x));
}

std::array<cx, 2> hyp2f1_series(cx a, cx b, cx c, cx x, int terms) {
    cx coef = 1.0, value = 0.0, deriv = 0.0, xp = 1.0;
    for (int k = 0; k < terms; ++k) {
        value += coef * xp;
        // coefficient of x^k in the derivative is (k+1) coef_{k+1}
        if (c + double(k) == cx(0.0)) throw Error(ErrorCode::parameter, "hyp2f1_series: c is a non-positive integer");
        const cx next = coef * (a + double(k)) * (b + double(k)) / ((c + double(k)) * double(k + 1));
        deriv += double(k + 1) * next * xp;
        coef = next;
        xp *= x;
    }
    if (!finite(value) || !finite(deriv)) throw Error(ErrorCode::ill_conditioned, "hyp2f1_series: overflow");
    return {value, deriv};
}

std::array<std::array<cx, 2>, 2> hypergeometric_basis(const HypergeometricOde& ode, cx x, int terms) {
    const auto [a, b] = ode.ab();
    const cx c = ode.c0;
    auto f1 = hyp2f1_series(a, b, c, x, terms);
    auto g = hyp2f1_series(a - c + 1.0, b - c + 1.0, 2.0 - c, x, terms);
    const cx e = 1.0 - c;
    const cx xe = std::exp(e * std::log(x));
    return {{{f1[0], f1[1]}, {xe * g[0], e * xe / x * g[0] + xe * g[1]}}};
}

std::vector<HypSample> solve_hypergeometric(const HypergeometricOde& ode, const std::vector<cx>& path, cx u0, cx up0,
                                            const HypOptions& opts) {
    if (path.empty()) throw Error(ErrorCode::parameter, "solve_hypergeometric: empty path");
    if (u0 == cx(0.0) && up0 == cx(0.0)) throw Error(ErrorCode::parameter, "solve_hypergeometric: zero initial data");
    for (std::size_t i = 0; i < path.size(); ++i) {
        const cx a = path[i], b = i + 1 < path.size() ? path[i + 1] : path[i];
        const double d = std::min(segment_distance(a, b, 0.0), segment_distance(a, b, 1.0));
        if (d < opts.clearance) {
            std::ostringstream os;
            os << "solve_hypergeometric: path passes within " << d << " of a singular point (clearance "
               << opts.clearance << ")";
            throw Error(ErrorCode::branch, os.str());
        }
    }
    std::vector<HypSample> out;
    CVec y{u0, up0};
    out.push_back({path[0], u0, up0, ode.second(path[0], u0, up0)});
    for (std::size_t i = 1; i < path.size(); ++i) {
        const cx a = path[i - 1], h = path[i] - path[i - 1];
        if (h != cx(0.0)) {
            OdeRhs f = [&](double s, const CVec& v, CVec& dv) {
                const cx x = a + s * h;
                dv[0] = h * v[1];
                dv[1] = h * ode.second(x, v[0], v[1]);
            };
            integrate(f, 0.0, 1.0, y, opts.ode);
        }
        if (!finite(y[0]) || !finite(y[1]) || std::abs(y[0]) > opts.overflow || std::abs(y[1]) > opts.overflow) {
            throw Error(ErrorCode::ill_conditioned, "solve_hypergeometric: overflow at " + at_x(path[i]));
        }
        out.push_back({path[i], y[0], y[1], ode.second(path[i], y[0], y[1])});
    }
    return out;
}

std::vector<HypSample> hypergeometric_mixed(const HypergeometricOde& ode, cx mix, const std::vector<cx>& x_samples,
                                            const HypOptions& opts) {
    if (x_samples.empty()) throw Error(ErrorCode::parameter, "hypergeometric: no samples");
    if (x_samples[0] == cx(0.0)) throw Error(ErrorCode::singular, "hypergeometric: sample at x = 0");
    const cx base = opts.base_radius * x_samples[0] / std::abs(x_samples[0]);
    const auto basis = hypergeometric_basis(ode, base, opts.series_terms);
    cx u = basis[0][0], up = basis[0][1];
    if (mix != cx(0.0)) {
        u += mix * basis[1][0];
        up += mix * basis[1][1];
    }
    std::vector<cx> path{base};
    path.insert(path.end(), x_samples.begin(), x_samples.end());
    auto s = solve_hypergeometric(ode, path, u, up, opts);
    s.erase(s.begin());
    return s;
}

const char* family_name(ClassicalFamily f) {
    switch (f) {
        case ClassicalFamily::reducible_riccati: return "reducible_riccati";
        case ClassicalFamily::generalized_chazy: return "generalized_chazy";
        case ClassicalFamily::riccati_type: return "riccati_type";
        case ClassicalFamily::forbidden: return "forbidden";
        case ClassicalFamily::lauricella_locus: return "lauricella_locus";
    }
    return "unknown";
}

ClassicalFamily family_from_name(const std::string& name) {
    std::string s = name;
    std::replace(s.begin(), s.end(), '-', '_');
    for (auto f : {ClassicalFamily::reducible_riccati, ClassicalFamily::generalized_chazy, ClassicalFamily::riccati_type,
                   ClassicalFamily::forbidden, ClassicalFamily::lauricella_locus}) {
        if (s == family_name(f)) return f;
    }
    if (s == "chazy") return ClassicalFamily::generalized_chazy;
    throw Error(ErrorCode::parameter, "unknown classical family '" + name + "'");
}

PviParams classical_params(const std::array<cx, 3>& theta, cx theta_inf) {
    return pvi_from_theta({theta[0], theta[1], theta[2], theta_inf}, PviLabeling::classical);
}

cx pvi_momentum(cx x, cx y, cx yp, const std::array<cx, 3>& theta) {
    const cx t = y * (y - 1.0) * (y - x);
    if (t == cx(0.0)) throw Error(ErrorCode::singular, "pvi_momentum: y at 0, 1 or x");
    const cx s = theta[0] / y + (theta[1] - 1.0) / (y - x) + theta[2] / (y - 1.0);
    return 0.5 * (yp * x * (x - 1.0) / t + s);
}

std::vector<cx> default_samples(int count) {
    std::vector<cx> xs;
    for (int k = 0; k < count; ++k) xs.push_back(0.15 + 0.7 * (count > 1 ? double(k) / (count - 1) : 0.0));
    return xs;
}

// ---------------------------------------------------------------------------
// Reducible monodromy: y from the logarithmic derivative of a Gauss function.

cx reducible_riccati_rhs(cx x, cx y, const std::array<cx, 3>& t) {
    const cx d = x * (x - 1.0);
    return (1.0 + sum3(t)) / d * y * y - (1.0 + t[0] + t[1] + t[0] * x + t[2] * x) / d * y + t[0] / (x - 1.0);
}

ClassicalSolution reducible_riccati_solution(const std::array<cx, 3>& t, cx mix, const std::vector<cx>& x_samples,
                                             const ClassicalOptions& opts) {
    const cx s = 1.0 + sum3(t);
    if (std::abs(s) < 1e-14) throw Error(ErrorCode::singular, "reducible_riccati: 1 + theta_1 + theta_2 + theta_3 = 0");
    ClassicalSolution sol;
    sol.family = ClassicalFamily::reducible_riccati;
    sol.theta = t;
    sol.theta_inf = -sum3(t);
    sol.mix = mix;
    sol.aux_name = "riccati";
    sol.tolerance = 1e-8;
    sol.aux_tolerance = 1e-8;
    const auto ode = HypergeometricOde::from_abc(1.0 + t[1], 2.0 + sum3(t), 2.0 + t[0] + t[1]);
    const auto hs = hypergeometric_mixed(ode, mix, x_samples, opts.hyp);
    sol.x0 = hs.front().x;
    const PviParams pp = classical_params(t, sol.theta_inf);
    std::vector<ClassicalSample> out(hs.size());
    std::vector<std::string> why(hs.size());
    parallel_for(hs.size(), opts.threads, [&](std::size_t i) {
        const auto& h = hs[i];
        if (std::abs(h.u) <= opts.denominator_tol * (std::abs(h.up) + 1.0)) {
            why[i] = "u vanishes at " + at_x(h.x);
            return;
        }
        const Jet x = Jet::variable(h.x);
        const Jet u{h.u, h.up, h.upp};
        const Jet up{h.up, h.upp, ode.third(h.x, h.u, h.up)};
        const Jet y = ((1.0 + t[0] + t[1]) - (1.0 + t[1]) * x) * u - x * (x - 1.0) * up;
        const Jet Y = y / (s * u);
        ClassicalSample c{h.x, Y.v, 0.0, Y.d, Y.dd};
        try {
            c.p = t[0] / c.y + t[1] / (c.y - c.x) + t[2] / (c.y - 1.0);
            c.residual = std::abs(c.ypp - pvi_rhs(c.x, c.y, c.yp, pp));
        } catch (const Error& e) {
            why[i] = std::string(e.what()) + " at " + at_x(h.x);
            return;
        }
        c.aux = std::abs(c.yp - reducible_riccati_rhs(c.x, c.y, t));
        out[i] = c;
    });
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (why[i].empty()) sol.samples.push_back(out[i]);
        else sol.dropped.push_back(why[i]);
    }
    summarize(sol);
    return sol;
}

FuchsianSystem riccati_fuchsian_system(const ClassicalSample& s, const std::array<cx, 3>& t) {
    // poles (x, 0, 1) carry (theta_2, theta_1, theta_3); A_k = [[theta_k/2, b_k], [0, -theta_k/2]]
    FuchsianSystem sys;
    sys.n = 1;
    sys.poles = {s.x, 0.0, 1.0};
    sys.theta = {t[1], t[0], t[2]};
    sys.theta_inf = -sum3(t);
    const cx nu = s.y;
    if (nu == s.x) throw Error(ErrorCode::singular, "riccati_fuchsian_system: y = x");
    const cx bx = 1.0, b0 = nu * (s.x - 1.0) / (nu - s.x), b1 = -bx - b0;
    const cx b[3] = {bx, b0, b1};
    for (int k = 0; k < 3; ++k) sys.residues.push_back({0.5 * sys.theta[k], b[k], 0.0, -0.5 * sys.theta[k]});
    return sys;
}

// ---------------------------------------------------------------------------
// Generalised Chazy family, theta_inf = -1.

HypergeometricOde chazy_ode(const std::array<cx, 3>& t) {
    const cx q = t[0] + t[2] - 1.0;
    return {1.0 - t[2], 2.0 - t[0] - t[2], (q * q - t[1] * t[1]) / 4.0};
}

namespace {

// Horner evaluation in W of the rational expression; `scale` collects the
// modulus of the denominator terms for the degeneracy test.
Jet chazy_jet(const Jet& W, const Jet& x, const std::array<cx, 3>& t, double tol) {
    const cx t1 = t[0], t2 = t[1], t3 = t[2];
    const Jet E = (W * (1.0 - t1 - t3) + 2.0 * x) * (W * (1.0 - t1 - t3) + 2.0 * x) - 4.0 * x +
                  W * (4.0 * t3 - t2 * t2 * W);
    const Jet num = -x * E * ((x - 1.0) * E - 4.0 * t1 * W * W);
    const cx q = (t1 + t3 - 1.0) * (t1 + t3 - 1.0) - t2 * t2;
    const Jet xm = x - 1.0;
    const Jet c3 = q * (t3 * xm + t1 * x);
    const Jet c2 = -2.0 * (xm * (3.0 * x - 2.0) * (t3 * t3) + 2.0 * xm * (1.0 - 2.0 * x) * t3 +
                           x * (3.0 * x - 1.0) * (t1 * t1) + 2.0 * x * (1.0 - 2.0 * x) * t1 -
                           x * xm * (t2 * t2) + 6.0 * x * xm * (t1 * t3));
    const Jet c1 = 4.0 * x * xm * (3.0 * t3 * xm + 3.0 * t1 * x + (1.0 - 2.0 * x));
    const Jet c0 = -8.0 * x * x * xm * xm;
    const Jet den = ((c3 * W + c2) * W + c1) * W + c0;
    const double w = std::abs(W.v);
    const double scale = std::abs(c3.v) * w * w * w + std::abs(c2.v) * w * w + std::abs(c1.v) * w + std::abs(c0.v);
    if (!(std::abs(den.v) > tol * scale)) throw Error(ErrorCode::singular, "chazy: denominator vanishes");
    return num / den;
}

}  // namespace

cx chazy_y(cx W, cx x, const std::array<cx, 3>& t, double tol) {
    return chazy_jet(Jet::constant(W), Jet::constant(x), t, tol).v;
}

std::array<cx, 5> chazy_quartic_coefficients(cx y, cx x, const std::array<cx, 3>& t, cx ti, QuarticLead lead) {
    const cx t1 = t[0], t2 = t[1], t3 = t[2];
    const cx P = y * (y - 1.0) * (y - x);
    const cx S1 = t1 * (y - 1.0) * (y - x) + t2 * y * (y - 1.0) + t3 * y * (y - x);
    const cx L = t1 * (y - 1.0 - x) + t2 * (y + x - 1.0) + t3 * (y + 1.0 - x);
    const cx ts = t1 + t2 + t3;
    std::array<cx, 5> b;
    b[0] = lead == QuarticLead::printed ? 16.0 * P * P * P * P : 16.0 * P * P;
    b[1] = -32.0 * P * S1;
    b[2] = 8.0 * (-P * (3.0 * y - 1.0 - x) * ti * ti +
                  (y - 1.0) * (y - x) * (3.0 * y * y - 3.0 * y + 2.0 * x - 3.0 * y * x) * t1 * t1 +
                  y * (y - 1.0) * (3.0 * y * y - 3.0 * y + x - x * x) * t2 * t2 +
                  y * (y - x) * (3.0 * y * y - 1.0 + x - 3.0 * y * x) * t3 * t3 +
                  6.0 * P * (t1 * t2 * (y - 1.0) + t1 * t3 * (y - x) + y * t2 * t3));
    b[3] = -8.0 * (2.0 * P * ti * ti * ti - (3.0 * y - 1.0 - x) * S1 * ti * ti + L * ts * S1);
    b[4] = (ts - ti) * ((3.0 * y * y - 2.0 * y - 1.0 + 2.0 * x - 2.0 * y * x - x * x) * ti * ti * ti +
                        ((6.0 * y - 1.0 - 5.0 * y * y - 6.0 * x + 6.0 * y * x - x * x) * t1 +
                         (6.0 * y - 1.0 - 5.0 * y * y + 2.0 * x - 2.0 * y * x - x * x) * t2 +
                         (2.0 * x - 2.0 * y - 1.0 - 5.0 * y * y + 6.0 * y * x - x * x) * t3) *
                            ti * ti +
                        (ti + ts) * L * L);
    return b;
}

double chazy_constraint(cx y, cx p, cx x, const std::array<cx, 3>& t, cx ti, QuarticLead lead) {
    const auto b = chazy_quartic_coefficients(y, x, t, ti, lead);
    return std::abs((((b[0] * p + b[1]) * p + b[2]) * p + b[3]) * p + b[4]);
}

ClassicalSolution chazy_solution(const std::array<cx, 3>& t, cx mix, const std::vector<cx>& x_samples,
                                 const ClassicalOptions& opts) {
    ClassicalSolution sol;
    sol.family = ClassicalFamily::generalized_chazy;
    sol.theta = t;
    sol.theta_inf = -1.0;
    sol.mix = mix;
    sol.aux_name = "quartic";
    sol.tolerance = 1e-6;
    sol.aux_tolerance = 1e-6;
    const auto ode = chazy_ode(t);
    const auto hs = hypergeometric_mixed(ode, mix, x_samples, opts.hyp);
    sol.x0 = hs.front().x;
    const PviParams pp = classical_params(t, sol.theta_inf);
    std::vector<ClassicalSample> out(hs.size());
    std::vector<std::string> why(hs.size());
    parallel_for(hs.size(), opts.threads, [&](std::size_t i) {
        const auto& h = hs[i];
        if (std::abs(h.up) <= opts.denominator_tol * (std::abs(h.u) + 1.0)) {
            why[i] = "W = u/u' has a pole at " + at_x(h.x);
            return;
        }
        const Jet u{h.u, h.up, h.upp};
        const Jet up{h.up, h.upp, ode.third(h.x, h.u, h.up)};
        try {
            const Jet y = chazy_jet(u / up, Jet::variable(h.x), t, opts.denominator_tol);
            ClassicalSample c{h.x, y.v, 0.0, y.d, y.dd};
            c.p = pvi_momentum(c.x, c.y, c.yp, t);
            c.residual = std::abs(c.ypp - pvi_rhs(c.x, c.y, c.yp, pp));
            c.aux = chazy_constraint(c.y, c.p, c.x, t, sol.theta_inf);
            out[i] = c;
        } catch (const Error& e) {
            why[i] = std::string(e.what()) + " at " + at_x(h.x);
        }
    });
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (why[i].empty()) sol.samples.push_back(out[i]);
        else sol.dropped.push_back(why[i]);
    }
    summarize(sol);
    return sol;
}

// ---------------------------------------------------------------------------
// Riccati-type family, theta_inf = 2.

namespace {

// f' = (q2 f^2 + q1 f + q0) / (2 x (x - 1))
struct RtCoeffs {
    cx A, B, C;
    explicit RtCoeffs(const std::array<cx, 3>& t)
        : A(t[2] - t[1] - t[0]), B(sum3(t) + 2.0), C(t[0] - t[1] - t[2]) {}
    template <class T>
    T f_rhs(const T& x, const T& f) const {
        return (A * (f - 1.0) * (f - x) + B * f * (f - 1.0) + C * f * (f - x)) / (2.0 * x * (x - 1.0));
    }
    // g = 1/f
    template <class T>
    T g_rhs(const T& x, const T& g) const {
        return -(A * (1.0 - g) * (1.0 - x * g) + B * (1.0 - g) + C * (1.0 - x * g)) / (2.0 * x * (x - 1.0));
    }
};

// y in terms of f (chart 0) or of g = 1/f (chart 1).
Jet rt_y(const Jet& v, const Jet& x, const std::array<cx, 3>& t, bool inverted) {
    const cx t1 = t[0], t2 = t[1], t3 = t[2];
    const Jet c1 = (-t1 + t2 + t3) - x * sum3(t);
    const Jet c0 = 2.0 * t1 * x;
    const cx d2 = -t1 + t2 - t3;
    const Jet d1 = 2.0 * (t3 - t2 * x);
    const Jet d0 = (t1 + t2 - t3) * x;
    if (!inverted) return v * (v * c1 + c0) / ((v * d2 + d1) * v + d0);
    return (c1 + c0 * v) / (d2 + (d1 + d0 * v) * v);
}

struct RtState {
    cx v;
    bool inverted = false;
};

}  // namespace

cx riccati_type_rhs(cx x, cx f, const std::array<cx, 3>& t) { return RtCoeffs(t).f_rhs(x, f); }

cx riccati_type_y(cx f, cx x, const std::array<cx, 3>& t) {
    return rt_y(Jet::constant(f), Jet::constant(x), t, false).v;
}

ClassicalSolution riccati_type_solution(const std::array<cx, 3>& t, cx theta_inf, cx x0, cx f_init,
                                        const std::vector<cx>& x_samples, const ClassicalOptions& opts) {
    if (std::abs(theta_inf - 1.0) < 1e-12) {
        throw Error(ErrorCode::unsupported,
                    "riccati_type: theta_inf = 1 gives the forbidden solution y(x) = infinity (Forbidden solution "
                    "$y(x)\\equiv\\infty$); no finite classical solution exists");
    }
    require_gate(theta_inf, 2.0, "riccati_type", "theta_inf = 2");
    if (x_samples.empty()) throw Error(ErrorCode::parameter, "riccati_type: no samples");
    if (f_init == cx(0.0) || f_init == cx(1.0) || f_init == x0) {
        throw Error(ErrorCode::singular, "riccati_type: f_init on the singular set {0, 1, x0}");
    }
    ClassicalSolution sol;
    sol.family = ClassicalFamily::riccati_type;
    sol.theta = t;
    sol.theta_inf = theta_inf;
    sol.mix = f_init;
    sol.x0 = x0;
    sol.aux_name = "riccati";
    sol.tolerance = 1e-6;
    sol.aux_tolerance = 1e-8;
    const RtCoeffs rc(t);
    const double clearance = opts.hyp.clearance;
    std::vector<cx> path{x0};
    path.insert(path.end(), x_samples.begin(), x_samples.end());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const cx a = path[i], b = path[std::min(i + 1, path.size() - 1)];
        if (std::min(segment_distance(a, b, 0.0), segment_distance(a, b, 1.0)) < clearance) {
            throw Error(ErrorCode::branch, "riccati_type: path passes too close to 0 or 1");
        }
    }

    // Integrates the current chart from xa to xb, switching charts between pieces.
    auto advance = [&](RtState st, cx xa, cx xb) {
        const int pieces = 32;
        const cx h = (xb - xa) / double(pieces);
        for (int k = 0; k < pieces; ++k) {
            const cx a = xa + double(k) * h;
            auto run = [&](RtState s) {
                CVec y{s.v};
                OdeRhs f = [&](double tt, const CVec& v, CVec& dv) {
                    const cx x = a + tt * h;
                    dv[0] = h * (s.inverted ? rc.g_rhs(x, v[0]) : rc.f_rhs(x, v[0]));
                    if (!finite(dv[0])) throw Error(ErrorCode::integration, "riccati_type: non-finite derivative");
                };
                integrate(f, 0.0, 1.0, y, opts.ode);
                if (!finite(y[0])) throw Error(ErrorCode::integration, "riccati_type: non-finite value");
                s.v = y[0];
                return s;
            };
            try {
                st = run(st);
            } catch (const Error&) {
                RtState other{1.0 / st.v, !st.inverted};
                st = run(other);  // a second failure propagates
                ++sol.chart_switches;
            }
            if (std::abs(st.v) > 2.0) {
                st = {1.0 / st.v, !st.inverted};
                ++sol.chart_switches;
            }
        }
        return st;
    };

    RtState st{f_init, false};
    if (std::abs(f_init) > 2.0) st = {1.0 / f_init, true};
    std::vector<RtState> states;
    std::size_t reached = 0;
    try {
        for (std::size_t i = 1; i < path.size(); ++i) {
            st = advance(st, path[i - 1], path[i]);
            states.push_back(st);
            reached = i;
        }
    } catch (const Error& e) {
        for (std::size_t i = reached + 1; i < path.size(); ++i) {
            sol.dropped.push_back(std::string("continuation failed (") + e.what() + ") before " + at_x(path[i]));
        }
    }

    const PviParams pp = classical_params(t, theta_inf);
    std::vector<ClassicalSample> out(states.size());
    std::vector<std::string> why(states.size());
    parallel_for(states.size(), opts.threads, [&](std::size_t i) {
        const cx xs = x_samples[i];
        const RtState s = states[i];
        const Jet X = Jet::variable(xs);
        const cx d1 = s.inverted ? rc.g_rhs(xs, s.v) : rc.f_rhs(xs, s.v);
        const Jet first{s.v, d1, 0.0};
        const cx d2 = s.inverted ? rc.g_rhs(X, first).d : rc.f_rhs(X, first).d;
        const Jet V{s.v, d1, d2};
        try {
            const Jet Y = rt_y(V, X, t, s.inverted);
            if (!finite(Y.v) || !finite(Y.dd)) throw Error(ErrorCode::singular, "rt: denominator vanishes");
            ClassicalSample c{xs, Y.v, 0.0, Y.d, Y.dd};
            c.p = pvi_momentum(c.x, c.y, c.yp, t);
            c.residual = std::abs(c.ypp - pvi_rhs(c.x, c.y, c.yp, pp));
            // derivative of the integrated chart variable by a Cauchy integral on a small circle
            const int m = 24;
            const double r = std::min(0.005, 0.1 * std::min(std::abs(xs), std::abs(xs - 1.0)));
            cx acc = 0.0;
            for (int j = 0; j < m; ++j) {
                const cx e = std::exp(kI * (2.0 * kPi * j / m));
                CVec y{s.v};
                const RtState z = s;
                OdeRhs f = [&](double tt, const CVec& v, CVec& dv) {
                    const cx x = xs + tt * r * e;
                    dv[0] = r * e * (z.inverted ? rc.g_rhs(x, v[0]) : rc.f_rhs(x, v[0]));
                };
                integrate(f, 0.0, 1.0, y, opts.ode);
                acc += y[0] / e;
            }
            const cx fd = acc / (double(m) * r);
            c.aux = std::abs(fd - d1);
            out[i] = c;
        } catch (const Error& e) {
            why[i] = std::string(e.what()) + " at " + at_x(xs);
        }
    });
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (why[i].empty()) sol.samples.push_back(out[i]);
        else sol.dropped.push_back(why[i]);
    }
    summarize(sol);
    return sol;
}

// ---------------------------------------------------------------------------

LauricellaResult lauricella_locus_flow(const std::vector<cx>& theta, const std::vector<int>& eps,
                                       const DeformationPath& path, const std::vector<cx>& nu_init,
                                       const cx* theta_inf, double rho_tol, const GarnierFlowOptions& opts) {
    if (theta.size() < 3 || eps.size() != theta.size()) {
        throw Error(ErrorCode::parameter, "lauricella_locus_flow: need n+2 exponents and as many signs");
    }
    if (path.waypoints.empty()) throw Error(ErrorCode::parameter, "lauricella_locus_flow: empty path");
    GarnierState s;
    s.n = static_cast<int>(theta.size()) - 2;
    if (nu_init.size() != static_cast<std::size_t>(s.n)) {
        throw Error(ErrorCode::parameter, "lauricella_locus_flow: need n initial values of nu");
    }
    s.u = path.waypoints.front();
    s.nu = nu_init;
    s.rho.assign(s.n, 0.0);
    for (std::size_t k = 0; k < theta.size(); ++k) {
        if (eps[k] != 1 && eps[k] != -1) throw Error(ErrorCode::parameter, "lauricella_locus_flow: signs must be +-1");
        s.theta.push_back(double(eps[k]) * theta[k]);
    }
    s.theta_inf = std::accumulate(s.theta.begin(), s.theta.end(), cx(0.0));
    if (theta_inf) {
        const cx k = garnier_kappa(s.theta, *theta_inf);
        if (std::abs(k) > 1e-12 * (1.0 + std::norm(*theta_inf))) {
            std::ostringstream os;
            os << "lauricella_locus_flow: off the locus, kappa = (" << k.real() << ", " << k.imag() << ") != 0";
            throw Error(ErrorCode::inconsistent, os.str());
        }
        s.theta_inf = *theta_inf;
    }
    GarnierFlowOptions o = opts;
    o.record = true;
    if (o.samples < 16) o.samples = 16;
    LauricellaResult res;
    res.flow = garnier_flow(s, path, o);
    for (const auto& st : res.flow.trajectory) {
        for (const auto& r : st.rho) res.max_rho = std::max(res.max_rho, std::abs(r));
    }
    for (const auto& r : res.flow.state.rho) res.max_rho = std::max(res.max_rho, std::abs(r));
    if (!(res.max_rho < rho_tol)) {
        std::ostringstream os;
        os << "lauricella_locus_flow: rho drifted to " << res.max_rho << " (tolerance " << rho_tol << ")";
        throw Error(ErrorCode::integration, os.str());
    }
    return res;
}

ClassicalSolution transform_solution(const ClassicalSolution& sol, Okamoto which) {
    if (which == Okamoto::w2) throw Error(ErrorCode::unsupported, "transform_solution: w2 is not available");
    const PviParams pp = classical_params(sol.theta, sol.theta_inf);
    ClassicalSolution out = sol;
    out.samples.clear();
    out.aux_name = "momentum";
    out.aux_tolerance = 1e-8;
    std::array<cx, 4> b2{};
    for (const auto& s : sol.samples) {
        auto pt = okamoto_w({s.y, s.p, pp.b}, s.x, which);
        b2 = pt.b;
        const auto th = theta_from_b(pt.b);
        const std::array<cx, 3> t2{th[0], th[1], th[2]};
        const PviParams q = classical_params(t2, th[3]);
        ClassicalSample c = s;
        c.y = pt.y;
        c.p = pt.p;
        c.residual = std::abs(c.ypp - pvi_rhs(c.x, c.y, c.yp, q));
        c.aux = std::abs(c.p - pvi_momentum(c.x, c.y, c.yp, t2));
        out.samples.push_back(c);
    }
    if (!sol.samples.empty()) {
        const auto th = theta_from_b(b2);
        out.theta = {th[0], th[1], th[2]};
        out.theta_inf = th[3];
    }
    summarize(out);
    return out;
}

}  // namespace garnier
