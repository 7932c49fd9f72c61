#include "garnier/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "garnier/error.hpp"

namespace garnier {

namespace {

const Mat2 kSigma{0.0, 1.0, 1.0, 0.0};

std::string str(cx z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

void audit(const GaugeOptions& o, std::string op, std::vector<std::pair<std::string, std::string>> params,
           const FuchsianSystem& pre, const FuchsianSystem& post) {
    if (!o.audit) return;
    o.audit->push_back({std::move(op), std::move(params), pre.theta, post.theta, pre.theta_inf, post.theta_inf});
}

double residue_scale(const FuchsianSystem& s) {
    double t = 0.0;
    for (const auto& a : s.residues) t += norm(a);
    return t;
}

Mat2 power_sum(const FuchsianSystem& s, int p) {
    Mat2 out;
    for (std::size_t k = 0; k < s.poles.size(); ++k) out += std::pow(s.poles[k], p) * s.residues[k];
    return out;
}

double eigen_mismatch(const Mat2& a, cx theta) {
    auto ev = eigenvalues(a);
    cx h = 0.5 * theta;
    return std::min(std::max(std::abs(ev[0] - h), std::abs(ev[1] + h)),
                    std::max(std::abs(ev[1] - h), std::abs(ev[0] + h)));
}

bool near(cx a, cx b, double tol) { return std::abs(a - b) <= tol; }

// True when every residue has a vanishing (2,1) entry.
bool all_upper(const FuchsianSystem& s, double tol) {
    double sc = 1.0 + residue_scale(s);
    for (const auto& a : s.residues) {
        if (std::abs(a.a21) > tol * sc) return false;
    }
    return true;
}

FuchsianSystem up_step(const FuchsianSystem& s, const GaugeOptions& o) {
    LinearGauge g = shift_gauge_inf(s, o.a);
    FuchsianSystem out = apply_gauge(s, g, s.theta_inf + 2.0, o.constraint_tol);
    return to_normal_form(out, o.tol);
}

FuchsianSystem down_step(const FuchsianSystem& s, const GaugeOptions& o) {
    return sign_flip(up_step(sign_flip(s, o.tol), o), o.tol);
}

FuchsianSystem shift_inf_raw(FuchsianSystem s, int N, const GaugeOptions& o) {
    for (int q = 0; q < std::abs(N); ++q) s = N > 0 ? up_step(s, o) : down_step(s, o);
    return s;
}

ScalarClass monodromy_class(const FuchsianSystem& s, int k, const GaugeOptions& o) {
    auto data = compute_monodromy(s, o.monodromy);
    return scalar_class(k < 0 ? data.m_inf : data.m[k], o.scalar_tol);
}

void check_index(const FuchsianSystem& s, int k, const char* ctx) {
    if (k < 0 || k >= s.size()) throw Error(ErrorCode::parameter, std::string(ctx) + ": pole index out of range");
}

}  // namespace

FuchsianSystem apply_gauge(const FuchsianSystem& sys, const LinearGauge& g, cx theta_inf, double constraint_tol) {
    cx d0 = g.at(0.0).det(), d1 = g.at(1.0).det(), d2 = g.at(-1.0).det();
    if (std::abs(d0) < 1e-300 || std::abs(d1 - d0) > 1e-10 * std::abs(d0) || std::abs(d2 - d0) > 1e-10 * std::abs(d0)) {
        throw Error(ErrorCode::singular, "apply_gauge: gauge determinant must be a nonzero constant");
    }
    FuchsianSystem out = sys;
    out.theta_inf = theta_inf;
    for (std::size_t k = 0; k < sys.poles.size(); ++k) {
        Mat2 gk = g.at(sys.poles[k]);
        out.residues[k] = inverse(gk) * sys.residues[k] * gk;
    }
    // polynomial part of G^{-1} A G - G^{-1} G' is linear in lambda; sample it at +-R
    double r = 2.0;
    for (cx u : sys.poles) r = std::max(r, 4.0 * (1.0 + std::abs(u)));
    auto poly = [&](cx lam) {
        Mat2 gl = g.at(lam), gi = inverse(gl);
        return gi * rhs_at(sys, lam) * gl - gi * g.e - rhs_at(out, lam);
    };
    Mat2 fp = poly(r), fm = poly(-r);
    Mat2 p1 = (fp - fm) / (2.0 * r), p0 = 0.5 * (fp + fm);
    double resid = norm(p0) + r * norm(p1);
    double scale = 1.0 + residue_scale(out) + residue_scale(sys);
    if (!(resid <= constraint_tol * scale)) {
        std::ostringstream os;
        os << "apply_gauge: transformed system is not Fuchsian (polynomial part " << resid
           << "); the constraint on the residues fails";
        throw Error(ErrorCode::inconsistent, os.str());
    }
    return out;
}

LinearGauge shift_gauge_inf(const FuchsianSystem& s, cx a) {
    if (a == cx(0.0)) throw Error(ErrorCode::parameter, "shift_theta_inf: the free entry a must be nonzero");
    const cx t = s.theta_inf;
    Mat2 s1 = power_sum(s, 1), s2 = power_sum(s, 2);
    double sc = 1e-12 * (1.0 + norm(s1) + residue_scale(s));
    if (std::abs(s1.a21) <= sc) {
        throw Error(ErrorCode::singular,
                    "shift_theta_inf: gauge-singular, sum A_{l,21} u_l vanishes (residues upper-triangular)");
    }
    bool nilpotent = t == cx(0.0) && norm(s.infinity_residue()) > 1e-8;
    cx beta, c;
    if (nilpotent) {
        beta = -s1.a21;
        c = s1.a22 - s2.a21 / (2.0 * s1.a21) - 0.5 * s1.a21;
    } else {
        if (near(t, -1.0, 1e-12)) throw Error(ErrorCode::singular, "shift_theta_inf: gauge-singular at theta_inf = -1");
        beta = -s1.a21 / (t + 1.0);
        if (near(t, -2.0, 1e-12)) {
            c = 1.0;  // free; the residues must satisfy a quadratic constraint instead
        } else {
            c = ((s1.a22 - s1.a11) - (t + 1.0) * s2.a21 / s1.a21) / (t + 2.0);
        }
    }
    // G = [[lambda + c, a], [beta, 0]]; a only rescales the second column
    LinearGauge g;
    g.e = {1.0, 0.0, 0.0, 0.0};
    g.f = {c, a, beta, 0.0};
    return g;
}

FuchsianSystem to_normal_form(const FuchsianSystem& sys, double tol) {
    Mat2 ainf = sys.infinity_residue();
    double sc = 1.0 + residue_scale(sys);
    if (eigen_mismatch(ainf, sys.theta_inf) > 1e-6 * sc) {
        throw Error(ErrorCode::inconsistent, "to_normal_form: eigenvalues of -sum A_k differ from +-theta_inf/2");
    }
    if (std::abs(sys.theta_inf) <= tol) {
        if (norm(ainf) <= 1e-7 * sc) return sys;  // regular point at infinity
        auto ej = eig_jordan_ordered(ainf, 0.0, 1e-7 * sc, JordanConvention::residue);
        if (ej.diagonalizable) return sys;
        return conjugate(sys, ej.transform);
    }
    auto ej = eig_jordan_ordered(ainf, 0.5 * sys.theta_inf, tol, JordanConvention::residue);
    return conjugate(sys, ej.transform);
}

FuchsianSystem sign_flip(const FuchsianSystem& sys, double tol) {
    FuchsianSystem out = conjugate(sys, kSigma);
    out.theta_inf = -sys.theta_inf;
    return to_normal_form(out, tol);
}

FuchsianSystem shift_theta_inf(const FuchsianSystem& sys, int N, const GaugeOptions& opts) {
    require_valid(sys, 1e-8, "shift_theta_inf");
    FuchsianSystem out = shift_inf_raw(sys, N, opts);
    audit(opts, "shift_theta_inf", {{"N", std::to_string(N)}, {"a", str(opts.a)}}, sys, out);
    return out;
}

FuchsianSystem shift_theta(const FuchsianSystem& sys, int j, int N, const GaugeOptions& opts) {
    require_valid(sys, 1e-8, "shift_theta");
    if (j < 0) return shift_theta_inf(sys, N, opts);
    check_index(sys, j, "shift_theta");
    if (N == 0) return sys;
    FuchsianSystem w = mobius_swap(sys, j, opts.tol);
    w = shift_inf_raw(w, N, opts);
    w = translate_poles(mobius_swap(w, j, opts.tol), sys.poles[j]);
    audit(opts, "shift_theta", {{"pole", std::to_string(j + 1)}, {"N", std::to_string(N)}}, sys, w);
    return w;
}

FuchsianSystem shift_theta_down(const FuchsianSystem& sys, int j, int N, const GaugeOptions& opts) {
    cx th = j < 0 ? sys.theta_inf : (check_index(sys, j, "shift_theta_down"), sys.theta[j]);
    if (N > 0 && near(th, 2.0, 1e-10)) {
        throw Error(ErrorCode::parameter, "shift_theta_down: theta = 2 is excluded (use sign_flip)");
    }
    return shift_theta(sys, j, -N, opts);
}

FuchsianSystem mobius_swap(const FuchsianSystem& sys, int k, double tol) {
    check_index(sys, k, "mobius_swap");
    const Mat2& ak = sys.residues[k];
    double sc = 1.0 + residue_scale(sys);
    Mat2 g = Mat2::identity();
    if (norm(ak) > 1e-12 * sc) {
        auto ej = eig_jordan_ordered(ak, 0.5 * sys.theta[k], tol, JordanConvention::residue);
        if (!ej.diagonalizable && std::abs(sys.theta[k]) > tol) {
            throw Error(ErrorCode::ill_conditioned, "mobius_swap: residue A" + std::to_string(k + 1) + " is defective");
        }
        g = ej.transform;
    }
    Mat2 gi = inverse(g);
    FuchsianSystem out = sys;
    for (int l = 0; l < sys.size(); ++l) {
        if (l == k) {
            out.poles[l] = 0.0;
            out.residues[l] = gi * sys.infinity_residue() * g;
            out.theta[l] = sys.theta_inf;
        } else {
            out.poles[l] = 1.0 / (sys.poles[l] - sys.poles[k]);
            out.residues[l] = gi * sys.residues[l] * g;
        }
    }
    out.theta_inf = sys.theta[k];
    return out;
}

FuchsianSystem translate_poles(const FuchsianSystem& sys, cx shift) {
    FuchsianSystem out = sys;
    for (auto& u : out.poles) u += shift;
    return out;
}

FuchsianSystem insert_zero_pole(const FuchsianSystem& sys, cx u, int index) {
    if (index < 0 || index > sys.size()) throw Error(ErrorCode::parameter, "insert_zero_pole: index out of range");
    for (cx p : sys.poles) {
        if (std::abs(p - u) < 1e-10) throw Error(ErrorCode::parameter, "insert_zero_pole: pole already present");
    }
    FuchsianSystem out = sys;
    out.n += 1;
    out.poles.insert(out.poles.begin() + index, u);
    out.residues.insert(out.residues.begin() + index, Mat2::zero());
    out.theta.insert(out.theta.begin() + index, 0.0);
    return out;
}

FuchsianSystem remove_pole(const FuchsianSystem& sys, int k) {
    check_index(sys, k, "remove_pole");
    if (sys.n < 1) throw Error(ErrorCode::parameter, "remove_pole: at least two finite poles must remain");
    FuchsianSystem out = sys;
    out.n -= 1;
    out.poles.erase(out.poles.begin() + k);
    out.residues.erase(out.residues.begin() + k);
    out.theta.erase(out.theta.begin() + k);
    return out;
}

namespace {

FuchsianSystem reduce_pipeline(const FuchsianSystem& sys, int k, long m, int sign, const GaugeOptions& o) {
    // relabel theta_k to sign * 2|m| and move the swapped infinity to 0
    FuchsianSystem w = sys;
    w.theta[k] = 2.0 * sign * static_cast<double>(std::abs(m));
    w = mobius_swap(w, k, o.tol);
    w = shift_inf_raw(w, -sign * static_cast<int>(std::abs(m)), o);
    double sc = 1.0 + residue_scale(w);
    if (norm(w.infinity_residue()) > o.constraint_tol * sc) {
        throw Error(ErrorCode::inconsistent, "reduce_identity_pole: residue at infinity did not vanish");
    }
    w = translate_poles(mobius_swap(w, k, o.tol), sys.poles[k]);
    if (norm(w.residues[k]) > o.constraint_tol * sc) {
        throw Error(ErrorCode::inconsistent, "reduce_identity_pole: residue of the removed pole did not vanish");
    }
    return remove_pole(w, k);
}

}  // namespace

FuchsianSystem reduce_identity_pole(const FuchsianSystem& sys, int k, const GaugeOptions& opts) {
    require_valid(sys, 1e-8, "reduce_identity_pole");
    check_index(sys, k, "reduce_identity_pole");
    if (sys.n < 1) throw Error(ErrorCode::parameter, "reduce_identity_pole: nothing left to reduce");
    ScalarClass cls = monodromy_class(sys, k, opts);
    const std::string name = "M_" + std::to_string(k + 1);
    if (cls == ScalarClass::not_scalar) {
        throw Error(ErrorCode::inconsistent, "reduce_identity_pole: " + name + " is not +-1, pole is not removable");
    }
    if (cls == ScalarClass::minus_identity) {
        throw Error(ErrorCode::unsupported, "reduce_identity_pole: " + name + " = -1 is not supported");
    }
    long twice = 0;
    if (!is_integer(sys.theta[k], 1e-6, &twice) || twice % 2 != 0) {
        throw Error(ErrorCode::inconsistent, "reduce_identity_pole: " + name + " = 1 needs an even integer theta");
    }
    FuchsianSystem out;
    if (twice == 0) {
        if (norm(sys.residues[k]) > opts.constraint_tol * (1.0 + residue_scale(sys))) {
            throw Error(ErrorCode::inconsistent, "reduce_identity_pole: theta = 0 with nonzero residue");
        }
        out = remove_pole(sys, k);
    } else {
        long m = twice / 2;
        // upper-triangular data: label theta_k = +2|m| and lower it with the mirrored gauge
        int first = all_upper(sys, 1e-12) ? 1 : -1;
        try {
            out = reduce_pipeline(sys, k, m, first, opts);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::singular) throw;
            try {
                out = reduce_pipeline(sys, k, m, -first, opts);
            } catch (const Error& e2) {
                if (e2.code() != ErrorCode::singular) throw;
                throw Error(ErrorCode::singular, "reduce_identity_pole: every shift gauge is singular for pole " +
                                                     std::to_string(k + 1) +
                                                     " (the invariant line carries exponent -1 there)");
            }
        }
    }
    audit(opts, "reduce_identity_pole", {{"pole", std::to_string(k + 1)}}, sys, out);
    return out;
}

FuchsianSystem reduce_identity_poles(const FuchsianSystem& sys, std::vector<int> poles, const GaugeOptions& opts) {
    std::sort(poles.begin(), poles.end());
    poles.erase(std::unique(poles.begin(), poles.end()), poles.end());
    FuchsianSystem out = sys;
    int removed = 0;
    for (int k : poles) {
        out = reduce_identity_pole(out, k - removed, opts);
        ++removed;
    }
    return out;
}

FuchsianSystem extend_with_identity_pole(const FuchsianSystem& sys, cx u_new, cx family_param, int index,
                                         const GaugeOptions& opts) {
    require_valid(sys, 1e-8, "extend_with_identity_pole");
    if (index < 0) index = sys.n;
    FuchsianSystem w = insert_zero_pole(sys, u_new, index);
    w = mobius_swap(w, index, opts.tol);  // regular point at infinity now
    Mat2 gt{1.0, family_param, 1.0, 1.0 + family_param};
    w = conjugate(w, inverse(gt));
    w = shift_inf_raw(w, 1, opts);
    w = translate_poles(mobius_swap(w, index, opts.tol), u_new);
    w.theta[index] = -2.0;
    require_valid(w, 1e-6, "extend_with_identity_pole");
    audit(opts, "extend_with_identity_pole",
          {{"u_new", str(u_new)}, {"family_param", str(family_param)}, {"index", std::to_string(index + 1)}}, sys, w);
    return w;
}

FuchsianSystem reduce_infinity(const FuchsianSystem& sys, int k, const GaugeOptions& opts) {
    require_valid(sys, 1e-8, "reduce_infinity");
    check_index(sys, k, "reduce_infinity");
    if (sys.n < 1) throw Error(ErrorCode::parameter, "reduce_infinity: nothing left to reduce");
    long twice = 0;
    if (!is_integer(sys.theta_inf, 1e-6, &twice) || twice % 2 != 0) {
        throw Error(ErrorCode::parameter, "reduce_infinity: M_inf = 1 forces an even integer theta_inf");
    }
    ScalarClass cinf = monodromy_class(sys, -1, opts);
    if (cinf == ScalarClass::not_scalar) throw Error(ErrorCode::inconsistent, "reduce_infinity: M_inf is not +-1");
    if (cinf == ScalarClass::minus_identity) throw Error(ErrorCode::unsupported, "reduce_infinity: M_inf = -1 is not supported");
    if (monodromy_class(sys, k, opts) != ScalarClass::not_scalar) {
        throw Error(ErrorCode::parameter, "reduce_infinity: M_" + std::to_string(k + 1) + " must not be +-1");
    }
    long m = twice / 2;
    FuchsianSystem w;
    try {
        w = shift_inf_raw(sys, static_cast<int>(-m), opts);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::singular) throw;
        w = shift_inf_raw(sign_flip(sys, opts.tol), static_cast<int>(m), opts);
    }
    double sc = 1.0 + residue_scale(w);
    if (norm(w.infinity_residue()) > opts.constraint_tol * sc) {
        throw Error(ErrorCode::inconsistent, "reduce_infinity: residue at infinity did not vanish");
    }
    w = mobius_swap(w, k, opts.tol);
    if (norm(w.residues[k]) > opts.constraint_tol * sc) {
        throw Error(ErrorCode::inconsistent, "reduce_infinity: residue of the removed pole did not vanish");
    }
    FuchsianSystem out = remove_pole(w, k);
    audit(opts, "reduce_infinity", {{"pole", std::to_string(k + 1)}}, sys, out);
    return out;
}

std::optional<std::array<cx, 2>> common_eigenvector(const std::vector<Mat2>& residues, double tol) {
    std::vector<std::array<cx, 2>> cand{{1.0, 0.0}, {0.0, 1.0}};
    for (const auto& a : residues) {
        auto ev = eigenvalues(a);
        for (cx e : ev) {
            Mat2 b = a - Mat2::diag(e, e);
            // kernel of b from its larger row
            std::array<cx, 2> v = std::abs(b.a11) + std::abs(b.a12) >= std::abs(b.a21) + std::abs(b.a22)
                                      ? std::array<cx, 2>{b.a12, -b.a11}
                                      : std::array<cx, 2>{b.a22, -b.a21};
            double nv = std::hypot(std::abs(v[0]), std::abs(v[1]));
            if (nv > 0.0) cand.push_back({v[0] / nv, v[1] / nv});
        }
    }
    double best = INFINITY;
    std::optional<std::array<cx, 2>> out;
    for (const auto& v : cand) {
        double worst = 0.0;
        for (const auto& a : residues) {
            cx w0 = a.a11 * v[0] + a.a12 * v[1], w1 = a.a21 * v[0] + a.a22 * v[1];
            worst = std::max(worst, std::abs(w0 * v[1] - w1 * v[0]) / (1.0 + norm(a)));
        }
        if (worst < best) {
            best = worst;
            out = v;
        }
    }
    if (best > tol) return std::nullopt;
    return out;
}

namespace {

// Conjugate so that v becomes the first basis vector; exponents relabelled by A_11.
FuchsianSystem triangular_frame(const FuchsianSystem& s, const std::array<cx, 2>& v, Mat2& p) {
    Mat2 ainf = s.infinity_residue();
    std::array<cx, 2> w{-std::conj(v[1]), std::conj(v[0])};
    if (std::abs(s.theta_inf) > 1e-8) {
        cx mu = (ainf.a11 * v[0] + ainf.a12 * v[1]) * std::conj(v[0]) + (ainf.a21 * v[0] + ainf.a22 * v[1]) * std::conj(v[1]);
        Mat2 b = ainf + Mat2::diag(mu, mu);  // kernel gives the eigenvector for -mu
        w = std::abs(b.a11) + std::abs(b.a12) >= std::abs(b.a21) + std::abs(b.a22) ? std::array<cx, 2>{b.a12, -b.a11}
                                                                                 : std::array<cx, 2>{b.a22, -b.a21};
    }
    p = {v[0], w[0], v[1], w[1]};
    FuchsianSystem out = conjugate(s, p);
    Mat2 ai = out.infinity_residue();
    out.theta_inf = 2.0 * ai.a11;
    if (std::abs(out.theta_inf) <= 1e-8 && std::abs(ai.a12) > 1e-8) {
        Mat2 d = Mat2::diag(1.0, 1.0 / ai.a12);
        out = conjugate(out, d);
        p = p * d;
    }
    for (int k = 0; k < out.size(); ++k) out.theta[k] = -2.0 * out.residues[k].a11;
    return out;
}

struct Candidate {
    int i, j, ni, nj;
};

}  // namespace

TriangularResult triangularize_reducible(const FuchsianSystem& sys, const GaugeOptions& opts) {
    require_valid(sys, 1e-8, "triangularize_reducible");
    const int m = sys.size();
    const double vtol = 1e-8;
    TriangularResult res;
    auto finish = [&](const FuchsianSystem& s, const std::array<cx, 2>& v) {
        res.system = triangular_frame(s, v, res.conjugator);
        res.eps.assign(m, 1);
        for (int k = 0; k < m; ++k) {
            cx orig = sys.theta[k];
            for (const auto& sh : res.shifts) {
                if (sh.pole == k) orig += 2.0 * static_cast<double>(sh.N);
            }
            res.eps[k] = std::abs(res.system.theta[k] - orig) <= std::abs(res.system.theta[k] + orig) ? 1 : -1;
        }
        require_valid(res.system, 1e-6, "triangularize_reducible");
        audit(opts, "triangularize_reducible", {{"K", std::to_string(res.K)}}, sys, res.system);
        return res;
    };
    if (auto v = common_eigenvector(sys.residues, vtol)) return finish(sys, *v);

    auto data = compute_monodromy(sys, opts.monodromy);
    auto gc = classify_group(data, 1e-6);
    if (!gc.reducible || !gc.invariant_vector) {
        throw Error(ErrorCode::inconsistent, "triangularize_reducible: no invariant vector, the group is not reducible");
    }
    const auto& iv = *gc.invariant_vector;
    // theta'_k with exp(-i pi theta'_k) the eigenvalue of M_k on the invariant line
    std::vector<int> eps(m, 1);
    cx sum = 0.0;
    for (int k = 0; k < m; ++k) {
        const Mat2& mk = data.m[k];
        cx w0 = mk.a11 * iv[0] + mk.a12 * iv[1], w1 = mk.a21 * iv[0] + mk.a22 * iv[1];
        cx lam = (w0 * std::conj(iv[0]) + w1 * std::conj(iv[1])) / (std::norm(iv[0]) + std::norm(iv[1]));
        cx th = sys.theta[k];
        eps[k] = std::abs(lam - std::exp(-kI * kPi * th)) <= std::abs(lam - std::exp(kI * kPi * th)) ? 1 : -1;
        sum += static_cast<double>(eps[k]) * th;
    }
    std::vector<long> ks;
    for (int e : {1, -1}) {
        long kk = 0;
        if (is_integer(0.5 * (static_cast<double>(e) * sys.theta_inf - sum), 1e-6, &kk)) ks.push_back(kk);
    }
    if (ks.empty()) {
        throw Error(ErrorCode::inconsistent, "triangularize_reducible: exponent-sum defect K is not an integer");
    }
    std::sort(ks.begin(), ks.end(), [](long a, long b) { return std::labs(a) < std::labs(b); });
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    for (long K : ks) {
        // eps_i N_i + eps_j N_j = K lowers the defect to zero
        std::vector<Candidate> cands;
        for (int total = static_cast<int>(std::labs(K)); total <= static_cast<int>(std::labs(K)) + 4; ++total) {
            for (int i = 0; i < m; ++i) {
                for (int j = i + 1; j < m; ++j) {
                    for (int ni = -total; ni <= total; ++ni) {
                        long nj = eps[j] * (K - eps[i] * ni);
                        if (std::labs(ni) + std::labs(nj) != total) continue;
                        cands.push_back({i, j, ni, static_cast<int>(nj)});
                    }
                }
            }
        }
        for (const auto& c : cands) {
            try {
                FuchsianSystem w = sys;
                std::vector<PoleShift> sh;
                for (auto [pole, N] : {std::pair{c.i, c.ni}, std::pair{c.j, c.nj}}) {
                    if (N == 0) continue;
                    w = shift_theta(w, pole, N, GaugeOptions{opts.a, opts.tol, opts.constraint_tol, opts.scalar_tol,
                                                             opts.monodromy, nullptr});
                    sh.push_back({pole, N});
                }
                auto v = common_eigenvector(w.residues, vtol);
                if (!v) continue;
                res.K = K;
                res.shifts = sh;
                return finish(w, *v);
            } catch (const Error&) {
                continue;
            }
        }
    }
    throw Error(ErrorCode::inconsistent,
                "triangularize_reducible: no admissible shift pair makes the residues share an eigenvector");
}

}  // namespace garnier
