#include "garnier/fuchsian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "garnier/error.hpp"

namespace garnier {

Mat2 FuchsianSystem::infinity_residue() const {
    Mat2 s;
    for (const auto& a : residues) s -= a;
    return s;
}

Mat2 infinity_normal_form(cx theta_inf) {
    if (theta_inf == cx(0.0)) return {0.0, 1.0, 0.0, 0.0};
    return Mat2::diag(0.5 * theta_inf, -0.5 * theta_inf);
}

namespace {

std::string fmt(cx z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

bool finite(cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double eigen_mismatch(const Mat2& a, cx theta) {
    auto ev = eigenvalues(a);
    cx h = 0.5 * theta;
    double d1 = std::max(std::abs(ev[0] - h), std::abs(ev[1] + h));
    double d2 = std::max(std::abs(ev[1] - h), std::abs(ev[0] + h));
    return std::min(d1, d2);
}

}  // namespace

ValidationReport validate(const FuchsianSystem& sys, double tol) {
    ValidationReport rep;
    auto add = [&](std::string kind, std::string detail, double mag) {
        rep.violations.push_back({std::move(kind), std::move(detail), mag});
    };
    const std::size_t m = static_cast<std::size_t>(sys.n) + 2;
    if (sys.n < 0 || sys.poles.size() != m || sys.residues.size() != m || sys.theta.size() != m) {
        add("shape", "expected n >= 0 and n+2 poles, residues and exponents", 0.0);
        return rep;
    }
    bool bad = !finite(sys.theta_inf);
    for (std::size_t k = 0; k < m; ++k) {
        bad = bad || !finite(sys.poles[k]) || !finite(sys.theta[k]) || !sys.residues[k].finite();
    }
    if (bad) {
        add("non_finite", "non-finite pole, residue or exponent", 0.0);
        return rep;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            double d = std::abs(sys.poles[i] - sys.poles[j]);
            if (d <= tol) {
                add("poles_not_distinct",
                    "poles not pairwise distinct: u" + std::to_string(i + 1) + " = u" + std::to_string(j + 1), d);
            }
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        double e = eigen_mismatch(sys.residues[k], sys.theta[k]);
        if (e > tol * (1.0 + std::abs(sys.theta[k]))) {
            add("eigenvalue_mismatch",
                "eigenvalues of A" + std::to_string(k + 1) + " differ from +-" + fmt(0.5 * sys.theta[k]), e);
        }
    }
    Mat2 s = sys.infinity_residue();
    double r;
    if (std::abs(sys.theta_inf) <= tol) {
        r = std::min(norm(s - infinity_normal_form(0.0)), norm(s));
    } else {
        r = norm(s - infinity_normal_form(sys.theta_inf));
    }
    if (r > tol * (1.0 + std::abs(sys.theta_inf))) {
        add("infinity_normal_form", "-sum A_k is not in the normal form for theta_inf = " + fmt(sys.theta_inf), r);
    }
    return rep;
}

void require_valid(const FuchsianSystem& sys, double tol, const char* context) {
    auto rep = validate(sys, tol);
    if (!rep.ok()) {
        const auto& v = rep.violations.front();
        throw Error(ErrorCode::parameter, std::string(context) + ": invalid system (" + v.kind + ": " + v.detail + ")");
    }
}

Mat2 rhs_at(const FuchsianSystem& sys, cx lambda) {
    Mat2 out;
    for (std::size_t k = 0; k < sys.poles.size(); ++k) {
        cx d = lambda - sys.poles[k];
        if (std::abs(d) <= 1e-14 * (1.0 + std::abs(sys.poles[k]))) {
            throw Error(ErrorCode::singular, "rhs_at: evaluation at pole u" + std::to_string(k + 1));
        }
        out += sys.residues[k] / d;
    }
    return out;
}

std::vector<cx> off_diagonal_numerator(const FuchsianSystem& sys) {
    const std::size_t m = sys.poles.size();
    std::vector<cx> total(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<cx> p{1.0};
        for (std::size_t l = 0; l < m; ++l) {
            if (l == k) continue;
            std::vector<cx> q(p.size() + 1, 0.0);
            for (std::size_t i = 0; i < p.size(); ++i) {
                q[i + 1] += p[i];
                q[i] -= sys.poles[l] * p[i];
            }
            p.swap(q);
        }
        for (std::size_t i = 0; i < p.size(); ++i) total[i] += sys.residues[k].a12 * p[i];
    }
    return total;
}

namespace {

cx horner(const std::vector<cx>& c, cx z, cx* deriv = nullptr) {
    cx v = 0.0, d = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) {
        d = d * z + v;
        v = v * z + c[i];
    }
    if (deriv) *deriv = d;
    return v;
}

std::vector<cx> polynomial_roots(std::vector<cx> c) {
    const int deg = static_cast<int>(c.size()) - 1;
    std::vector<cx> roots;
    if (deg == 1) {
        roots.push_back(-c[0] / c[1]);
        return roots;
    }
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::ill_conditioned, "companion eigenvalue solver failed");
    for (int i = 0; i < deg; ++i) {
        cx z = es.eigenvalues()[i];
        for (int it = 0; it < 3; ++it) {
            cx d;
            cx v = horner(c, z, &d);
            if (d == cx(0.0)) break;
            cx step = v / d;
            if (!(std::abs(step) < 1e-3 * (1.0 + std::abs(z)))) break;
            z -= step;
        }
        roots.push_back(z);
    }
    return roots;
}

}  // namespace

GarnierCoordinates garnier_coordinates(const FuchsianSystem& sys) {
    const int n = sys.n;
    auto c = off_diagonal_numerator(sys);
    double amax = 0.0, umax = 1.0;
    for (std::size_t k = 0; k < sys.poles.size(); ++k) {
        amax = std::max(amax, std::abs(sys.residues[k].a12));
        umax = std::max(umax, std::abs(sys.poles[k]));
    }
    double scale = amax * std::pow(umax, n + 1);
    if (scale == 0.0) throw Error(ErrorCode::degenerate, "garnier_coordinates: all A_k,12 vanish");
    if (std::abs(c[n + 1]) > 1e-10 * scale) {
        throw Error(ErrorCode::degenerate, "garnier_coordinates: sum of A_k,12 is nonzero (numerator degree n+1)");
    }
    if (std::abs(c[n]) <= 1e-12 * scale) {
        throw Error(ErrorCode::degenerate, "garnier_coordinates: numerator degree below n");
    }
    c.resize(n + 1);
    GarnierCoordinates out;
    out.nu = polynomial_roots(c);
    std::sort(out.nu.begin(), out.nu.end(), [](cx a, cx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    for (cx nu : out.nu) {
        cx r = 0.0;
        for (std::size_t k = 0; k < sys.poles.size(); ++k) {
            cx d = nu - sys.poles[k];
            if (std::abs(d) <= 1e-12 * (1.0 + std::abs(sys.poles[k]))) {
                throw Error(ErrorCode::singular, "garnier_coordinates: nu coincides with pole u" + std::to_string(k + 1));
            }
            r += (sys.residues[k].a11 + 0.5 * sys.theta[k]) / d;
        }
        out.rho.push_back(r);
    }
    return out;
}

FuchsianSystem build_triangular_family(const std::vector<cx>& poles, const std::vector<cx>& theta,
                                       const std::vector<int>& eps, cx theta_inf, const std::vector<cx>& upper,
                                       double tol) {
    const std::size_t m = theta.size();
    if (m < 3 || poles.size() != m || eps.size() != m) {
        throw Error(ErrorCode::parameter, "build_triangular_family: need n+2 poles, exponents and signs");
    }
    cx sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        if (eps[k] != 1 && eps[k] != -1) throw Error(ErrorCode::parameter, "build_triangular_family: signs must be +-1");
        sum += static_cast<double>(eps[k]) * theta[k];
    }
    if (std::abs(theta_inf - sum) > tol * (1.0 + std::abs(theta_inf))) {
        throw Error(ErrorCode::parameter, "build_triangular_family: theta_inf - sum eps_k theta_k = " +
                                              fmt(theta_inf - sum) + " is not zero");
    }
    std::vector<cx> x(m, 0.0);
    if (upper.size() == m - 1) {
        cx s = 0.0;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            x[k] = upper[k];
            s += upper[k];
        }
        x[m - 1] = -s;
    } else if (upper.size() == m) {
        x = upper;
        cx s = 0.0;
        for (cx v : upper) s += v;
        if (std::abs(s) > tol * (1.0 + std::abs(theta_inf))) {
            throw Error(ErrorCode::parameter, "build_triangular_family: upper entries must sum to zero");
        }
    } else if (!upper.empty()) {
        throw Error(ErrorCode::parameter, "build_triangular_family: upper needs n+1 or n+2 entries");
    }
    FuchsianSystem sys;
    sys.n = static_cast<int>(m) - 2;
    sys.poles = poles;
    sys.theta_inf = theta_inf;
    for (std::size_t k = 0; k < m; ++k) {
        cx t = static_cast<double>(eps[k]) * theta[k];
        sys.theta.push_back(t);
        sys.residues.push_back({-0.5 * t, x[k], 0.0, 0.5 * t});
    }
    return sys;
}

FuchsianSystem normalize_poles(const FuchsianSystem& sys) {
    const std::size_t m = sys.poles.size();
    cx a = sys.poles[m - 2], b = sys.poles[m - 1];
    if (a == b) throw Error(ErrorCode::singular, "normalize_poles: u_{n+1} = u_{n+2}");
    FuchsianSystem out = sys;
    for (auto& u : out.poles) u = (u - a) / (b - a);
    out.poles[m - 2] = 0.0;
    out.poles[m - 1] = 1.0;
    return out;
}

FuchsianSystem conjugate(const FuchsianSystem& sys, const Mat2& p) {
    Mat2 pi = inverse(p);
    FuchsianSystem out = sys;
    for (auto& a : out.residues) a = pi * a * p;
    return out;
}

FuchsianSystem diagonal_representative(const FuchsianSystem& sys) {
    // near-ties (equal moduli up to rounding) go to the lowest pole index
    double m12 = 0.0, m21 = 0.0;
    for (const auto& a : sys.residues) {
        m12 = std::max(m12, std::abs(a.a12));
        m21 = std::max(m21, std::abs(a.a21));
    }
    cx top = 0.0, low = 0.0;
    for (const auto& a : sys.residues) {
        if (top == cx(0.0) && m12 > 0.0 && std::abs(a.a12) >= m12 * (1.0 - 1e-9)) top = a.a12;
        if (low == cx(0.0) && m21 > 0.0 && std::abs(a.a21) >= m21 * (1.0 - 1e-9)) low = a.a21;
    }
    cx d;
    if (top != cx(0.0)) {
        d = 1.0 / top;
    } else if (low != cx(0.0)) {
        d = low;
    } else {
        return sys;
    }
    FuchsianSystem out = sys;
    for (auto& a : out.residues) {
        a.a12 *= d;
        a.a21 /= d;
    }
    return out;
}

double residue_distance(const FuchsianSystem& a, const FuchsianSystem& b) {
    if (a.residues.size() != b.residues.size()) {
        throw Error(ErrorCode::parameter, "residue_distance: systems have different sizes");
    }
    double d = 0.0;
    for (std::size_t k = 0; k < a.residues.size(); ++k) d = std::max(d, norm(a.residues[k] - b.residues[k]));
    return d;
}

bool is_integer(cx z, double tol, long* value) {
    double r = std::round(z.real());
    bool ok = std::abs(z - cx(r, 0.0)) < tol;
    if (ok && value) *value = static_cast<long>(r);
    return ok;
}

FuchsianSystem random_system(int n, std::mt19937_64& rng, const RandomSystemOptions& opts) {
    if (n < 1) throw Error(ErrorCode::parameter, "random_system: n must be positive");
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> th(opts.theta_min, opts.theta_max);
    auto rcx = [&](double s) { return cx(s * uni(rng), s * uni(rng)); };
    const int m = n + 2;

    for (int attempt = 0; attempt < 1000; ++attempt) {
        FuchsianSystem sys;
        sys.n = n;
        while (static_cast<int>(sys.poles.size()) < m) {
            cx u = rcx(opts.pole_box);
            bool ok = true;
            for (cx v : sys.poles) ok = ok && std::abs(u - v) >= opts.min_pole_separation;
            if (ok) sys.poles.push_back(u);
        }
        for (int k = 0; k < m; ++k) sys.theta.push_back(th(rng));
        sys.theta_inf = th(rng) * (uni(rng) < 0 ? -1.0 : 1.0);
        if (!opts.theta.empty()) {
            if (static_cast<int>(opts.theta.size()) != m) {
                throw Error(ErrorCode::parameter, "random_system: need n+2 exponents");
            }
            sys.theta = opts.theta;
        }
        if (opts.theta_inf) sys.theta_inf = *opts.theta_inf;

        Mat2 c = -infinity_normal_form(sys.theta_inf);
        for (int k = 0; k < n; ++k) {
            Mat2 s = Mat2::identity() + Mat2{rcx(opts.entry_scale), rcx(opts.entry_scale), rcx(opts.entry_scale),
                                             rcx(opts.entry_scale)};
            if (std::abs(s.det()) < 0.2) continue;
            Mat2 j = sys.theta[k] == cx(0.0) ? Mat2{0.0, 1.0, 0.0, 0.0}
                                              : Mat2::diag(0.5 * sys.theta[k], -0.5 * sys.theta[k]);
            Mat2 a = s * j * inverse(s);
            sys.residues.push_back(a);
            c -= a;
        }
        if (static_cast<int>(sys.residues.size()) != n) continue;

        // X = [[a, b], [q, -a]] with det X = -t1^2/4 and det(C - X) = -t2^2/4.
        // For traceless C, det(C - X) = det C + tr(C X) + det X; solve for b.
        cx t1 = sys.theta[n], t2 = sys.theta[n + 1];
        cx a = rcx(0.5);
        cx kq = 0.25 * (t1 * t1 - t2 * t2) - c.det();
        if (std::abs(c.a12) < 1e-3) continue;
        cx qa = -c.a21;
        cx qb = kq - 2.0 * c.a11 * a;
        cx qc = c.a12 * (a * a - 0.25 * t1 * t1);
        cx b;
        if (std::abs(qa) < 1e-12) {
            if (std::abs(qb) < 1e-12) continue;
            b = -qc / qb;
        } else {
            cx disc = std::sqrt(qb * qb - 4.0 * qa * qc);
            b = (uni(rng) < 0 ? (-qb + disc) : (-qb - disc)) / (2.0 * qa);
        }
        cx q = (kq - 2.0 * c.a11 * a - c.a21 * b) / c.a12;
        Mat2 x{a, b, q, -a};
        sys.residues.push_back(x);
        sys.residues.push_back(c - x);

        bool tame = true;
        for (const auto& r : sys.residues) tame = tame && norm(r) < 3.0;
        if (!tame || !validate(sys, 1e-10).ok()) continue;
        // Keep (eql) generic: nonvanishing numerator and the nu's away from poles.
        try {
            auto gc = garnier_coordinates(sys);
            bool far = true;
            for (cx nu : gc.nu) {
                for (cx u : sys.poles) far = far && std::abs(nu - u) > 0.05;
            }
            if (!far) continue;
        } catch (const Error&) {
            continue;
        }
        return sys;
    }
    throw Error(ErrorCode::parameter, "random_system: failed to draw a valid system");
}

}  // namespace garnier
