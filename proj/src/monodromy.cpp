#include "garnier/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "garnier/error.hpp"

namespace garnier {

namespace {

cx rot(double eta) { return std::exp(kI * eta); }

double min_perp_separation(const std::vector<cx>& w) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = i + 1; j < w.size(); ++j) best = std::min(best, std::abs(w[i].imag() - w[j].imag()));
    }
    return best;
}

std::vector<cx> rotated(const FuchsianSystem& sys, cx center, double eta) {
    std::vector<cx> w;
    cx r = rot(-eta);
    for (cx u : sys.poles) w.push_back((u - center) * r);
    return w;
}

void fill_loops(LoopBasis& b, const FuchsianSystem& sys, const MonodromyOptions& opts) {
    const std::size_t m = sys.poles.size();
    auto w = rotated(sys, b.center, b.eta);
    b.circle_radius.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (i != j) d = std::min(d, std::abs(sys.poles[i] - sys.poles[j]));
        }
        if (!(d > 0.0)) throw Error(ErrorCode::singular, "loop basis: coinciding poles");
        b.circle_radius[j] = opts.radius_fraction * d;
    }
    b.order.resize(m);
    std::iota(b.order.begin(), b.order.end(), 0);
    std::stable_sort(b.order.begin(), b.order.end(), [&](int i, int j) { return w[i].imag() < w[j].imag(); });
    b.exclusion = 0.05 * *std::min_element(b.circle_radius.begin(), b.circle_radius.end());
}

double point_segment_distance(cx p, cx a, cx b) {
    cx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(std::real((p - a) * std::conj(d)) / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

}  // namespace

LoopBasis make_loop_basis(const FuchsianSystem& sys, const MonodromyOptions& opts) {
    if (sys.poles.size() < 2) throw Error(ErrorCode::parameter, "loop basis: need at least two poles");
    LoopBasis b;
    for (cx u : sys.poles) b.center += u;
    b.center /= static_cast<double>(sys.poles.size());
    double spread = 0.0, umax = 0.0;
    for (cx u : sys.poles) {
        spread = std::max(spread, std::abs(u - b.center));
        umax = std::max(umax, std::abs(u));
    }
    if (opts.eta) {
        b.eta = *opts.eta;
    } else {
        // Maximize the smallest perpendicular distance between parallel cuts.
        const int samples = 720;
        double best = -1.0;
        for (int s = 0; s < samples; ++s) {
            double eta = 2.0 * kPi * s / samples;
            double sep = min_perp_separation(rotated(sys, b.center, eta));
            if (sep > best * (1.0 + 1e-9)) {
                best = sep;
                b.eta = eta;
            }
        }
    }
    b.base_radius = opts.base_factor * std::max(spread, umax) * 1.05 + std::abs(b.center);
    b.base_point = b.center + b.base_radius * rot(b.eta + kPi);
    fill_loops(b, sys, opts);
    auto w = rotated(sys, b.center, b.eta);
    double left = std::numeric_limits<double>::infinity();
    double rmax = *std::max_element(b.circle_radius.begin(), b.circle_radius.end());
    for (std::size_t j = 0; j < w.size(); ++j) left = std::min(left, w[j].real() - b.circle_radius[j]);
    b.left_edge = left - std::max(0.25 * spread, rmax);
    return b;
}

LoopBasis rebase_loop_basis(const LoopBasis& basis, const FuchsianSystem& sys, const MonodromyOptions& opts) {
    LoopBasis b = basis;
    fill_loops(b, sys, opts);
    auto w = rotated(sys, b.center, b.eta);
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (w[j].real() - b.circle_radius[j] <= b.left_edge || std::abs(w[j]) * 10.0 > b.base_radius) {
            throw Error(ErrorCode::branch, "loop basis: pole u" + std::to_string(j + 1) + " left the loop region");
        }
    }
    if (b.order != basis.order) {
        throw Error(ErrorCode::branch, "loop basis: pole order along the cut direction changed");
    }
    return b;
}

std::vector<PathSegment> loop_path(const LoopBasis& basis, const FuchsianSystem& sys, int pole) {
    cx r = rot(basis.eta);
    cx u = sys.poles.at(pole);
    double rj = basis.circle_radius.at(pole);
    cx wj = (u - basis.center) * std::conj(r);
    cx p1 = basis.center + cx(basis.left_edge, wj.imag()) * r;
    cx p2 = u - rj * r;
    std::vector<PathSegment> path;
    path.push_back({PathSegment::line, basis.base_point, p1});
    path.push_back({PathSegment::line, p1, p2});
    PathSegment arc;
    arc.kind = PathSegment::arc;
    arc.center = u;
    arc.radius = rj;
    arc.t0 = basis.eta + kPi;
    arc.t1 = basis.eta + 3.0 * kPi;
    path.push_back(arc);
    path.push_back({PathSegment::line, p2, p1});
    path.push_back({PathSegment::line, p1, basis.base_point});
    return path;
}

std::vector<PathSegment> infinity_path(const LoopBasis& basis) {
    PathSegment arc;
    arc.kind = PathSegment::arc;
    arc.center = basis.center;
    arc.radius = basis.base_radius;
    arc.t0 = basis.eta + kPi;
    arc.t1 = basis.eta - kPi;
    return {arc};
}

Mat2 transport(const FuchsianSystem& sys, const std::vector<PathSegment>& path, const OdeOptions& ode,
               double exclusion) {
    CVec x{1.0, 0.0, 0.0, 1.0};
    for (const auto& seg : path) {
        for (std::size_t k = 0; k < sys.poles.size(); ++k) {
            double d = seg.kind == PathSegment::line ? point_segment_distance(sys.poles[k], seg.a, seg.b)
                                                      : std::abs(std::abs(sys.poles[k] - seg.center) - seg.radius);
            if (d <= exclusion) {
                throw Error(ErrorCode::branch, "loop passes within the exclusion radius of pole u" + std::to_string(k + 1));
            }
        }
        OdeRhs f;
        double t0, t1;
        if (seg.kind == PathSegment::line) {
            cx a = seg.a, dl = seg.b - seg.a;
            if (dl == cx(0.0)) continue;
            t0 = 0.0;
            t1 = 1.0;
            f = [&sys, a, dl](double t, const CVec& y, CVec& dy) {
                Mat2 m = rhs_at(sys, a + t * dl) * dl;
                dy[0] = m.a11 * y[0] + m.a12 * y[2];
                dy[1] = m.a11 * y[1] + m.a12 * y[3];
                dy[2] = m.a21 * y[0] + m.a22 * y[2];
                dy[3] = m.a21 * y[1] + m.a22 * y[3];
            };
        } else {
            cx c = seg.center;
            double rr = seg.radius;
            t0 = seg.t0;
            t1 = seg.t1;
            f = [&sys, c, rr](double t, const CVec& y, CVec& dy) {
                cx e = rr * std::exp(kI * t);
                Mat2 m = rhs_at(sys, c + e) * (kI * e);
                dy[0] = m.a11 * y[0] + m.a12 * y[2];
                dy[1] = m.a11 * y[1] + m.a12 * y[3];
                dy[2] = m.a21 * y[0] + m.a22 * y[2];
                dy[3] = m.a21 * y[1] + m.a22 * y[3];
            };
        }
        integrate(f, t0, t1, x, ode);
    }
    return {x[0], x[1], x[2], x[3]};
}

namespace {

// Model residue at infinity for the expansion: the exact normal form when
// theta_inf != 0, otherwise the (nilpotent or zero) matrix -sum A_k itself.
Mat2 model_a_inf(const FuchsianSystem& sys) {
    if (std::abs(sys.theta_inf) > 1e-12) return infinity_normal_form(sys.theta_inf);
    Mat2 s = sys.infinity_residue();
    if (norm(s) < 1e-10) return Mat2::zero();
    return s;
}

bool diagonal_model(const Mat2& a) { return a.a12 == cx(0.0) && a.a21 == cx(0.0); }

std::vector<Mat2> moments(const FuchsianSystem& sys, int count) {
    std::vector<Mat2> s(count + 1);
    std::vector<cx> pw(sys.poles.size(), 1.0);
    for (int j = 0; j <= count; ++j) {
        Mat2 acc;
        for (std::size_t k = 0; k < sys.poles.size(); ++k) {
            acc += pw[k] * sys.residues[k];
            pw[k] *= sys.poles[k];
        }
        s[j] = acc;
    }
    return s;
}

// Solve [A, Y] - m Y = X for diagonal A = diag(a1, a2); entries with a
// vanishing coefficient are left to the caller through `hole`.
Mat2 sylvester_diag(const Mat2& a, double m, const Mat2& x) {
    cx d = a.a11 - a.a22;
    return {-x.a11 / m, x.a12 / (d - m), x.a21 / (-d - m), -x.a22 / m};
}

Mat2 sylvester_nilpotent(const Mat2& nmat, double m, const Mat2& x) {
    Mat2 ad1 = commutator(nmat, x);
    Mat2 ad2 = commutator(nmat, ad1);
    return -(1.0 / m) * (x + ad1 / m + ad2 / (m * m));
}

int resonance(const Mat2& a_inf, cx theta_inf) {
    long p = 0;
    if (!diagonal_model(a_inf) || a_inf == Mat2::zero()) return 0;
    if (!is_integer(theta_inf, 1e-9, &p)) return 0;
    return static_cast<int>(p);
}

}  // namespace

Normalization normalization_series(const FuchsianSystem& sys, double radius, double tol, int max_terms) {
    Normalization nz;
    nz.a_inf = model_a_inf(sys);
    const int p = resonance(nz.a_inf, sys.theta_inf);
    const int ap = std::abs(p);
    const bool diag = diagonal_model(nz.a_inf);
    auto s = moments(sys, max_terms);
    nz.y.push_back(Mat2::identity());
    int quiet = 0;
    for (int m = 1; m <= max_terms; ++m) {
        Mat2 rhs;
        for (int j = 1; j <= m; ++j) rhs += s[j] * nz.y[m - j];
        if (ap > 0 && m > ap) rhs += nz.y[m - ap] * nz.r_inf;
        Mat2 ym;
        if (diag) {
            if (m == ap) {
                Mat2 hole = rhs;
                if (p > 0) {
                    nz.r_inf.a12 = -rhs.a12;
                    hole.a12 = 0.0;
                } else {
                    nz.r_inf.a21 = -rhs.a21;
                    hole.a21 = 0.0;
                }
                cx d = nz.a_inf.a11 - nz.a_inf.a22;
                ym = {-hole.a11 / double(m), p > 0 ? cx(0.0) : hole.a12 / (d - double(m)),
                      p > 0 ? hole.a21 / (-d - double(m)) : cx(0.0), -hole.a22 / double(m)};
            } else {
                ym = sylvester_diag(nz.a_inf, m, rhs);
            }
        } else {
            ym = sylvester_nilpotent(nz.a_inf, m, rhs);
        }
        if (!ym.finite()) throw Error(ErrorCode::ill_conditioned, "normalization series: non-finite coefficient");
        nz.y.push_back(ym);
        double size = norm(ym) * std::pow(radius, -m);
        if (m > ap && size < tol) {
            if (++quiet >= 3) return nz;
        } else {
            quiet = 0;
        }
    }
    throw Error(ErrorCode::ill_conditioned, "normalization series did not converge at the base point");
}

double branch_arg(cx lambda, double eta) {
    return eta - kPi + std::arg(lambda * std::exp(-kI * (eta - kPi)));
}

Mat2 phi_infinity(const Normalization& nz, cx lambda, double eta) {
    cx inv = 1.0 / lambda;
    Mat2 y;
    for (std::size_t m = nz.y.size(); m-- > 0;) y = y * inv + nz.y[m];
    cx lg(std::log(std::abs(lambda)), branch_arg(lambda, eta));
    return y * expm(-lg * nz.a_inf) * expm(-lg * nz.r_inf);
}

Mat2 r_matrix_infinity(const FuchsianSystem& sys) {
    Mat2 a = model_a_inf(sys);
    const int p = resonance(a, sys.theta_inf);
    if (p == 0) return Mat2::zero();
    const int ap = std::abs(p);
    auto s = moments(sys, ap);
    const cx d = a.a11 - a.a22;
    std::vector<Mat2> g{Mat2::identity()};
    for (int l = 1; l < ap; ++l) {
        Mat2 x = s[l];
        for (int q = 1; q < l; ++q) x += g[l - q] * s[q];
        // (d_ij - l) G_ij = -x_ij
        cx c11 = -double(l), c12 = d - double(l), c21 = -d - double(l);
        if (std::abs(c12) < 1e-12 || std::abs(c21) < 1e-12) {
            throw Error(ErrorCode::ill_conditioned, "resonance recursion at infinity is singular");
        }
        g.push_back({-x.a11 / c11, -x.a12 / c12, -x.a21 / c21, -x.a22 / c11});
    }
    Mat2 tot = s[ap];
    for (int l = 1; l < ap; ++l) tot += g[ap - l] * s[l];
    Mat2 r;
    if (p > 0) r.a12 = -tot.a12;
    else r.a21 = -tot.a21;
    return r;
}

Mat2 r_matrix_pole(const FuchsianSystem& sys, int k) {
    long p = 0;
    cx th = sys.theta.at(k);
    if (!is_integer(th, 1e-9, &p) || p == 0) return Mat2::zero();
    const int ap = static_cast<int>(std::labs(p));
    auto ej = eig_jordan_ordered(sys.residues[k], 0.5 * th, 1e-9, JordanConvention::residue);
    Mat2 gi = inverse(ej.transform);
    std::vector<Mat2> ahat(ap + 1);
    for (int l = 1; l <= ap; ++l) {
        Mat2 b;
        for (std::size_t j = 0; j < sys.poles.size(); ++j) {
            if (static_cast<int>(j) == k) continue;
            double sign = (l - 1) % 2 == 0 ? 1.0 : -1.0;
            b += sign * sys.residues[j] / std::pow(sys.poles[k] - sys.poles[j], l);
        }
        ahat[l] = gi * b * ej.transform;
    }
    const cx d = ej.jordan.a11 - ej.jordan.a22;
    std::vector<Mat2> h{Mat2::identity()};
    for (int l = 1; l < ap; ++l) {
        Mat2 x = ahat[l];
        for (int m = 1; m < l; ++m) x += ahat[l - m] * h[m];
        cx c11 = -double(l), c12 = d - double(l), c21 = -d - double(l);
        if (std::abs(c12) < 1e-12 || std::abs(c21) < 1e-12) {
            throw Error(ErrorCode::ill_conditioned, "resonance recursion at a pole is singular");
        }
        h.push_back({-x.a11 / c11, -x.a12 / c12, -x.a21 / c21, -x.a22 / c11});
    }
    Mat2 tot = ahat[ap];
    for (int l = 1; l < ap; ++l) tot += ahat[ap - l] * h[l];
    Mat2 r;
    if (p > 0) r.a12 = tot.a12;
    else r.a21 = tot.a21;
    return r;
}

Mat2 local_monodromy(cx theta, const Mat2& r) {
    Mat2 j = theta == cx(0.0) ? Mat2{0.0, 1.0, 0.0, 0.0} : Mat2::diag(0.5 * theta, -0.5 * theta);
    return expm(2.0 * kPi * kI * j) * expm(2.0 * kPi * kI * r);
}

MonodromyData compute_monodromy(const FuchsianSystem& sys, const LoopBasis& basis, const MonodromyOptions& opts) {
    require_valid(sys, 1e-8, "compute_monodromy");
    const int m = sys.size();
    if (static_cast<int>(basis.order.size()) != m) {
        throw Error(ErrorCode::parameter, "compute_monodromy: loop basis does not match the system");
    }
    Normalization nz = normalization_series(sys, std::abs(basis.base_point), opts.series_tol, opts.max_series_terms);
    Mat2 phi0 = phi_infinity(nz, basis.base_point, basis.eta);
    Mat2 phi0i = inverse(phi0);

    OdeOptions ode = opts.ode;
    ode.rtol *= opts.local_factor;
    ode.atol *= opts.local_factor;
    const int jobs = m + (opts.direct_infinity ? 1 : 0);
    std::vector<Mat2> out(jobs);
    std::vector<std::exception_ptr> errs(jobs);
    auto work = [&](int job) {
        try {
            auto path = job < m ? loop_path(basis, sys, job) : infinity_path(basis);
            out[job] = phi0i * transport(sys, path, ode, basis.exclusion) * phi0;
        } catch (...) {
            errs[job] = std::current_exception();
        }
    };
    const int threads = std::clamp(opts.threads, 1, jobs);
    if (threads == 1) {
        for (int j = 0; j < jobs; ++j) work(j);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int j = t; j < jobs; j += threads) work(j);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }

    MonodromyData d;
    d.n = sys.n;
    d.m.assign(out.begin(), out.begin() + m);
    d.order = basis.order;
    d.theta = sys.theta;
    d.theta_inf = sys.theta_inf;
    d.a_inf = nz.a_inf;
    d.r_inf = nz.r_inf;
    d.tolerance = opts.ode.rtol;
    for (int k = 0; k < m; ++k) d.r.push_back(r_matrix_pole(sys, k));
    d.m_inf_relation = inverse(ordered_product(d));
    d.m_inf = opts.direct_infinity ? out[m] : d.m_inf_relation;
    d.inf_agreement = norm(d.m_inf - d.m_inf_relation);
    return d;
}

MonodromyData compute_monodromy(const FuchsianSystem& sys, const MonodromyOptions& opts) {
    return compute_monodromy(sys, make_loop_basis(sys, opts), opts);
}

Mat2 ordered_product(const MonodromyData& data) {
    Mat2 p = Mat2::identity();
    for (int j : data.order) p = data.m.at(j) * p;
    return p;
}

MonodromyData connection_matrices(const MonodromyData& data, const std::vector<int>& indices, double tol) {
    MonodromyData out = data;
    const int m = static_cast<int>(data.m.size());
    out.c.assign(m, Mat2::zero());
    std::vector<int> idx = indices;
    if (idx.empty()) {
        idx.resize(m);
        std::iota(idx.begin(), idx.end(), 0);
    }
    for (int k : idx) {
        const Mat2& mk = data.m.at(k);
        if (scalar_class(mk, tol) != ScalarClass::not_scalar) {
            throw Error(ErrorCode::parameter,
                        "connection matrix C" + std::to_string(k + 1) + " is not unique: M" + std::to_string(k + 1) +
                            " = +-1");
        }
        cx th = data.theta.at(k);
        cx e1 = std::exp(kI * kPi * th), e2 = std::exp(-kI * kPi * th);
        Mat2 cinv;
        if (std::abs(e1 - e2) > 1e-4) {
            cinv = eig_jordan_ordered(mk, e1, 1e-12, JordanConvention::monodromy).transform;
        } else {
            auto ev = eigenvalues(mk);
            double t = std::max(1e-6, 10.0 * std::abs(ev[0] - ev[1]) / (1.0 + norm(mk)));
            auto ej = eig_jordan(mk, t, JordanConvention::monodromy);
            if (ej.diagonalizable) {
                throw Error(ErrorCode::inconsistent, "connection matrix: scalar block for a non-scalar M");
            }
            long p = 0;
            is_integer(th, 1e-6, &p);
            double s = p % 2 == 0 ? 1.0 : -1.0;
            const Mat2& r = data.r.at(k);
            cx rr = p > 0 ? r.a12 : r.a21;
            if (p == 0) {
                // theta = 0: e^{2 pi i J} is already the 2 pi i Jordan block.
                cinv = ej.transform;
            } else {
                if (std::abs(rr) < 1e-12) {
                    throw Error(ErrorCode::inconsistent,
                                "connection matrix: defective M" + std::to_string(k + 1) + " but R vanishes");
                }
                cinv = ej.transform * Mat2::diag(1.0, s * rr);
                if (p < 0) cinv = cinv * Mat2{0.0, 1.0, 1.0, 0.0};
            }
        }
        out.c[k] = inverse(cinv);
    }
    return out;
}

GroupClass classify_group(const MonodromyData& data, double tol) {
    GroupClass g;
    const int m = static_cast<int>(data.m.size());
    std::vector<std::array<cx, 2>> cand{{1.0, 0.0}, {0.0, 1.0}};
    for (int j = 0; j < m; ++j) {
        if (scalar_class(data.m[j], tol) != ScalarClass::not_scalar) {
            g.smaller_indices.push_back(j);
            continue;
        }
        try {
            auto ej = eig_jordan(data.m[j], std::sqrt(tol));
            cand.push_back({ej.transform.a11, ej.transform.a21});
            if (ej.diagonalizable) cand.push_back({ej.transform.a12, ej.transform.a22});
        } catch (const Error&) {
        }
    }
    g.l = static_cast<int>(g.smaller_indices.size());
    double best = std::numeric_limits<double>::infinity();
    for (auto v : cand) {
        double len = std::hypot(std::abs(v[0]), std::abs(v[1]));
        if (len == 0.0) continue;
        v = {v[0] / len, v[1] / len};
        double worst = 0.0;
        for (const auto& mj : data.m) {
            cx w0 = mj.a11 * v[0] + mj.a12 * v[1];
            cx w1 = mj.a21 * v[0] + mj.a22 * v[1];
            cx mu = std::conj(v[0]) * w0 + std::conj(v[1]) * w1;
            worst = std::max({worst, std::abs(w0 - mu * v[0]), std::abs(w1 - mu * v[1])});
        }
        if (worst < best) {
            best = worst;
            if (worst < tol) g.invariant_vector = v;
        }
    }
    g.reducible = g.invariant_vector.has_value();
    return g;
}

double RelationReport::max() const {
    double m = std::max(cyclic, inf_consistency);
    for (double e : eigen) m = std::max(m, e);
    return m;
}

RelationReport check_relations(const MonodromyData& data, const std::vector<cx>& theta) {
    RelationReport rep;
    rep.cyclic = norm(data.m_inf * ordered_product(data) - Mat2::identity());
    for (std::size_t j = 0; j < data.m.size(); ++j) {
        rep.eigen.push_back(std::abs(data.m[j].trace() - 2.0 * std::cos(kPi * theta.at(j))));
    }
    Mat2 model = expm(2.0 * kPi * kI * data.a_inf) * expm(2.0 * kPi * kI * data.r_inf);
    rep.inf_consistency = norm(data.m_inf - model);
    return rep;
}

RelationReport check_relations(const MonodromyData& data) { return check_relations(data, data.theta); }

IsomonodromyResult verify_isomonodromy(const FuchsianSystem& sys0, const FuchsianSystem& sys1, const LoopBasis& basis,
                                       const MonodromyOptions& opts) {
    LoopBasis b0 = rebase_loop_basis(basis, sys0, opts);
    LoopBasis b1 = rebase_loop_basis(basis, sys1, opts);
    MonodromyOptions o = opts;
    o.direct_infinity = false;
    auto d0 = compute_monodromy(sys0, b0, o);
    auto d1 = compute_monodromy(sys1, b1, o);

    IsomonodromyResult res;
    long p = 0;
    bool resonant = is_integer(sys0.theta_inf, 1e-9, &p) && !(d0.a_inf == Mat2::zero());
    Mat2 e;
    if (resonant) {
        if (p > 0) e = {0.0, 1.0, 0.0, 0.0};
        else if (p < 0) e = {0.0, 0.0, 1.0, 0.0};
        else e = d0.a_inf;
    }
    auto aligned = [&](cx c, std::size_t j) {
        Mat2 l = Mat2::identity() + c * e;
        Mat2 li = Mat2::identity() - c * e;
        return li * d1.m[j] * l;
    };
    cx c = 0.0;
    if (resonant) {
        // Gauss-Newton on the residual r(c) = M1 + c [M1, E] - c^2 E M1 E - M0.
        for (int it = 0; it < 30; ++it) {
            cx num = 0.0;
            double den = 0.0;
            for (std::size_t j = 0; j < d0.m.size(); ++j) {
                Mat2 r = aligned(c, j) - d0.m[j];
                Mat2 jac = d1.m[j] * e - e * d1.m[j] - 2.0 * c * (e * d1.m[j] * e);
                cx jr[4] = {jac.a11, jac.a12, jac.a21, jac.a22};
                cx rr[4] = {r.a11, r.a12, r.a21, r.a22};
                for (int q = 0; q < 4; ++q) {
                    num += std::conj(jr[q]) * rr[q];
                    den += std::norm(jr[q]);
                }
            }
            if (den == 0.0) break;
            cx step = num / den;
            c -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(c))) break;
        }
    }
    res.alignment = c;
    for (std::size_t j = 0; j < d0.m.size(); ++j) res.deviation = std::max(res.deviation, norm(aligned(c, j) - d0.m[j]));
    return res;
}

}  // namespace garnier
