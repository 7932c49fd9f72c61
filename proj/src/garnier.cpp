#include "garnier/garnier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "garnier/error.hpp"

namespace garnier {

namespace {

std::string fmt(cx z) {
    std::ostringstream os;
    os.precision(8);
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

}  // namespace

cx garnier_kappa(const std::vector<cx>& theta, cx theta_inf) {
    cx s = std::accumulate(theta.begin(), theta.end(), cx(0.0));
    return 0.25 * ((s - 1.0) * (s - 1.0) - (theta_inf - 1.0) * (theta_inf - 1.0));
}

cx GarnierState::kappa() const { return garnier_kappa(theta, theta_inf); }

bool GarnierState::normalized(double tol) const {
    return u.size() == static_cast<std::size_t>(n) + 2 && std::abs(u[n]) <= tol && std::abs(u[n + 1] - 1.0) <= tol;
}

void require_state(const GarnierState& s, const char* context) {
    const std::size_t n = static_cast<std::size_t>(s.n);
    if (s.n < 1 || s.nu.size() != n || s.rho.size() != n || s.u.size() != n + 2 || s.theta.size() != n + 2) {
        throw Error(ErrorCode::parameter, std::string(context) + ": state needs n coordinates, n+2 poles and exponents");
    }
    for (std::size_t i = 0; i < n + 2; ++i) {
        for (std::size_t j = i + 1; j < n + 2; ++j) {
            if (s.u[i] == s.u[j]) throw Error(ErrorCode::singular, std::string(context) + ": poles not distinct");
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n + 2; ++m) {
            if (s.nu[k] == s.u[m]) {
                throw Error(ErrorCode::singular, std::string(context) + ": nu_" + std::to_string(k + 1) +
                                                     " sits on pole u_" + std::to_string(m + 1));
            }
        }
        for (std::size_t l = k + 1; l < n; ++l) {
            if (s.nu[k] == s.nu[l]) {
                throw Error(ErrorCode::singular, std::string(context) + ": coinciding nu's (Lambda'(nu) = 0)");
            }
        }
    }
}

GarnierState garnier_state(const FuchsianSystem& sys) {
    auto c = garnier_coordinates(sys);
    GarnierState s;
    s.n = sys.n;
    s.nu = c.nu;
    s.rho = c.rho;
    s.u = sys.poles;
    s.theta = sys.theta;
    s.theta_inf = sys.theta_inf;
    return s;
}

namespace {

// Pieces of K_i = sum_k F_ik B_ik shared by the value and the gradient.
struct HamTerms {
    std::vector<cx> f, b;
};

HamTerms ham_terms(const GarnierState& s, int i) {
    const int n = s.n;
    const cx ui = s.u[i];
    cx lam_ui = 1.0, tp_ui = 1.0;
    for (int k = 0; k < n; ++k) lam_ui *= ui - s.nu[k];
    for (int m = 0; m < n + 2; ++m) {
        if (m != i) tp_ui *= ui - s.u[m];
    }
    const cx kap = s.kappa();
    HamTerms h;
    for (int k = 0; k < n; ++k) {
        cx nk = s.nu[k];
        cx t_nk = 1.0, lp = 1.0, lin = 0.0;
        for (int m = 0; m < n + 2; ++m) {
            t_nk *= nk - s.u[m];
            lin += (s.theta[m] - (m == i ? 1.0 : 0.0)) / (nk - s.u[m]);
        }
        for (int l = 0; l < n; ++l) {
            if (l != k) lp *= nk - s.nu[l];
        }
        h.f.push_back(-lam_ui * t_nk / (tp_ui * (nk - ui) * lp));
        h.b.push_back(s.rho[k] * s.rho[k] - lin * s.rho[k] + kap / ((nk - s.u[n]) * (nk - s.u[n + 1])));
    }
    return h;
}

void check_index(const GarnierState& s, int i, const char* context) {
    if (i < 0 || i >= s.n) throw Error(ErrorCode::parameter, std::string(context) + ": index out of range");
}

}  // namespace

cx hamiltonian(const GarnierState& s, int i) {
    require_state(s, "hamiltonian");
    check_index(s, i, "hamiltonian");
    auto h = ham_terms(s, i);
    cx k = 0.0;
    for (int q = 0; q < s.n; ++q) k += h.f[q] * h.b[q];
    return k;
}

HamiltonianGradient hamiltonian_gradient(const GarnierState& s, int i) {
    check_index(s, i, "hamiltonian_gradient");
    const int n = s.n;
    auto h = ham_terms(s, i);
    const cx kap = s.kappa();
    HamiltonianGradient g;
    g.d_nu.assign(n, 0.0);
    g.d_rho.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        cx nj = s.nu[j];
        cx lin = 0.0, lin2 = 0.0;
        for (int m = 0; m < n + 2; ++m) {
            cx c = s.theta[m] - (m == i ? 1.0 : 0.0);
            lin += c / (nj - s.u[m]);
            lin2 += c / ((nj - s.u[m]) * (nj - s.u[m]));
        }
        g.d_rho[j] = h.f[j] * (2.0 * s.rho[j] - lin);

        cx q = (nj - s.u[n]) * (nj - s.u[n + 1]);
        cx db = lin2 * s.rho[j] - kap * (2.0 * nj - s.u[n] - s.u[n + 1]) / (q * q);
        cx dn = h.f[j] * db;
        for (int k = 0; k < n; ++k) {
            cx dlog = 1.0 / (nj - s.u[i]);
            if (k == j) {
                for (int m = 0; m < n + 2; ++m) dlog += 1.0 / (nj - s.u[m]);
                dlog -= 1.0 / (nj - s.u[i]);
                for (int l = 0; l < n; ++l) {
                    if (l != k) dlog -= 1.0 / (nj - s.nu[l]);
                }
            } else {
                dlog += 1.0 / (s.nu[k] - nj);
            }
            dn += dlog * h.f[k] * h.b[k];
        }
        g.d_nu[j] = dn;
    }
    return g;
}

namespace {

void check_singular(const GarnierState& s, double dist, double where) {
    for (int k = 0; k < s.n; ++k) {
        for (int m = 0; m < s.n + 2; ++m) {
            if (std::abs(s.nu[k] - s.u[m]) < dist) {
                std::ostringstream os;
                os << "garnier_flow: movable singularity, nu_" << k + 1 << " meets u_" << m + 1
                   << " near t=" << where << " (nu = " << fmt(s.nu[k]) << ")";
                throw Error(ErrorCode::singular, os.str());
            }
        }
        for (int l = k + 1; l < s.n; ++l) {
            if (std::abs(s.nu[k] - s.nu[l]) < dist) {
                std::ostringstream os;
                os << "garnier_flow: movable singularity, nu_" << k + 1 << " and nu_" << l + 1
                   << " collide near t=" << where << " (nu = " << fmt(s.nu[k]) << ")";
                throw Error(ErrorCode::singular, os.str());
            }
        }
    }
}

// Integrates state s over curve parameter [t0, t1]; t_map converts the curve
// parameter to the reported global parameter.
void flow_piece(GarnierState& s, const PoleCurve& curve, double t0, double t1, const GarnierFlowOptions& opts,
                const std::function<double(double)>& t_map, GarnierFlowResult& res, bool record_end) {
    const int n = s.n;
    CVec y(2 * n);
    for (int k = 0; k < n; ++k) {
        y[k] = s.nu[k];
        y[n + k] = s.rho[k];
    }
    GarnierState work = s;
    std::vector<cx> du;
    OdeRhs f = [&](double t, const CVec& yy, CVec& dy) {
        curve(t, work.u, du);
        for (int k = 0; k < n; ++k) {
            work.nu[k] = yy[k];
            work.rho[k] = yy[n + k];
        }
        dy.assign(2 * n, 0.0);
        for (int i = 0; i < n; ++i) {
            if (du[i] == cx(0.0)) continue;
            auto g = hamiltonian_gradient(work, i);
            for (int j = 0; j < n; ++j) {
                dy[j] += g.d_rho[j] * du[i];
                dy[n + j] -= g.d_nu[j] * du[i];
            }
        }
    };
    try {
        res.steps += integrate(f, t0, t1, y, opts.ode).steps;
    } catch (const Error& e) {
        std::string msg = e.what();
        double t = t0;
        auto pos = msg.find("t=");
        if (pos != std::string::npos) t = std::stod(msg.substr(pos + 2));
        std::ostringstream os;
        os << "garnier_flow: movable singularity encountered near t=" << t_map(t);
        throw Error(ErrorCode::singular, os.str());
    }
    for (int k = 0; k < n; ++k) {
        s.nu[k] = y[k];
        s.rho[k] = y[n + k];
    }
    curve(t1, s.u, du);
    for (cx z : y) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw Error(ErrorCode::singular, "garnier_flow: coordinates overflowed near t=" + std::to_string(t_map(t1)));
        }
    }
    check_singular(s, opts.singular_distance, t_map(t1));
    if (record_end && opts.record) {
        res.t.push_back(t_map(t1));
        res.trajectory.push_back(s);
    }
}

}  // namespace

GarnierFlowResult garnier_flow_curve(const GarnierState& s, const PoleCurve& curve, const GarnierFlowOptions& opts) {
    require_state(s, "garnier_flow");
    GarnierFlowResult res;
    res.state = s;
    if (opts.record) {
        res.t.push_back(0.0);
        res.trajectory.push_back(s);
    }
    int pieces = opts.record ? std::max(1, opts.samples + 1) : 1;
    auto id = [](double t) { return t; };
    for (int q = 0; q < pieces; ++q) {
        flow_piece(res.state, curve, double(q) / pieces, double(q + 1) / pieces, opts, id, res, true);
    }
    return res;
}

GarnierFlowResult garnier_flow(const GarnierState& s, const DeformationPath& path, const GarnierFlowOptions& opts) {
    require_state(s, "garnier_flow");
    const int n = s.n;
    check_path(path, n + 2);
    for (int k = 0; k < n + 2; ++k) {
        if (std::abs(path.waypoints.front()[k] - s.u[k]) > 1e-12 * (1.0 + std::abs(s.u[k]))) {
            throw Error(ErrorCode::parameter, "garnier_flow: path does not start at the poles of the state");
        }
    }
    for (const auto& w : path.waypoints) {
        if (w[n] != s.u[n] || w[n + 1] != s.u[n + 1]) {
            throw Error(ErrorCode::parameter, "garnier_flow: u_{n+1} and u_{n+2} are fixed; only u_1..u_n may move");
        }
    }
    GarnierFlowResult res;
    res.state = s;
    if (opts.record) {
        res.t.push_back(0.0);
        res.trajectory.push_back(s);
    }
    const double total = path.length();
    if (total == 0.0) return res;
    double acc = 0.0;
    for (std::size_t w = 1; w < path.waypoints.size(); ++w) {
        const auto& a = path.waypoints[w - 1];
        const auto& b = path.waypoints[w];
        double l = 0.0;
        for (int k = 0; k < n + 2; ++k) l += std::norm(b[k] - a[k]);
        l = std::sqrt(l);
        if (l == 0.0) continue;
        PoleCurve curve = [&](double t, std::vector<cx>& u, std::vector<cx>& du) {
            u.resize(n + 2);
            du.resize(n + 2);
            for (int k = 0; k < n + 2; ++k) {
                u[k] = a[k] + t * (b[k] - a[k]);
                du[k] = b[k] - a[k];
            }
        };
        auto t_map = [&](double t) { return (acc + t * l) / total; };
        int pieces = opts.record ? std::max(1, opts.samples + 1) : 1;
        for (int q = 0; q < pieces; ++q) {
            flow_piece(res.state, curve, double(q) / pieces, double(q + 1) / pieces, opts, t_map, res, true);
        }
        acc += l;
    }
    res.state.u = path.waypoints.back();
    return res;
}

std::vector<int> match_roots(const std::vector<cx>& a, const std::vector<cx>& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::parameter, "match_roots: size mismatch");
    std::vector<int> p(a.size()), best;
    std::iota(p.begin(), p.end(), 0);
    double best_cost = INFINITY;
    if (a.size() <= 8) {
        do {
            double c = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) c += std::abs(b[p[k]] - a[k]);
            if (c < best_cost) {
                best_cost = c;
                best = p;
            }
        } while (std::next_permutation(p.begin(), p.end()));
        return best;
    }
    // greedy fallback for large n
    std::vector<bool> used(b.size(), false);
    for (std::size_t k = 0; k < a.size(); ++k) {
        int arg = -1;
        for (std::size_t q = 0; q < b.size(); ++q) {
            if (!used[q] && (arg < 0 || std::abs(b[q] - a[k]) < std::abs(b[arg] - a[k]))) arg = static_cast<int>(q);
        }
        used[arg] = true;
        p[k] = arg;
    }
    return p;
}

std::vector<cx> symmetry_T_poles(const std::vector<cx>& u, int which) {
    const int n = static_cast<int>(u.size()) - 2;
    std::vector<cx> out = u;
    if (which >= 1 && which <= n) {
        cx uj = u[which - 1];
        if (uj == cx(1.0)) throw Error(ErrorCode::singular, "symmetry_T: u_j = 1");
        for (int i = 0; i < n; ++i) out[i] = (i == which - 1) ? uj / (uj - 1.0) : (uj - u[i]) / (uj - 1.0);
    } else if (which == n + 2) {
        for (int i = 0; i < n; ++i) out[i] = 1.0 - u[i];
    } else if (which == n + 3) {
        for (int i = 0; i < n; ++i) {
            if (u[i] == cx(1.0)) throw Error(ErrorCode::singular, "symmetry_T: u_i = 1");
            out[i] = u[i] / (u[i] - 1.0);
        }
    } else {
        throw Error(ErrorCode::parameter, "symmetry_T: which must be 1..n, n+2 or n+3");
    }
    return out;
}

GarnierState symmetry_T(const GarnierState& s, int which) {
    require_state(s, "symmetry_T");
    if (!s.normalized(1e-14)) throw Error(ErrorCode::parameter, "symmetry_T: state must have u_{n+1} = 0, u_{n+2} = 1");
    const int n = s.n;
    GarnierState t = s;
    t.u = symmetry_T_poles(s.u, which);
    if (which >= 1 && which <= n) {
        cx uj = s.u[which - 1];
        for (int i = 0; i < n; ++i) {
            t.nu[i] = (uj - s.nu[i]) / (uj - 1.0);
            t.rho[i] = -(uj - 1.0) * s.rho[i];
        }
        std::swap(t.theta[which - 1], t.theta[n]);
    } else if (which == n + 2) {
        for (int i = 0; i < n; ++i) {
            t.nu[i] = 1.0 - s.nu[i];
            t.rho[i] = -s.rho[i];
        }
        std::swap(t.theta[n + 1], t.theta[n]);
    } else {
        // The point 1 goes to infinity; this exponent table and shift make the
        // map an involution that commutes with the flow (checked numerically).
        cx shift = -s.theta_inf;
        for (cx th : s.theta) shift += th;
        shift *= 0.5;
        for (int i = 0; i < n; ++i) {
            cx v = s.nu[i] - 1.0;
            if (v == cx(0.0)) throw Error(ErrorCode::singular, "symmetry_T: nu_i = 1");
            t.nu[i] = s.nu[i] / v;
            t.rho[i] = -v * v * s.rho[i] + shift * v;
        }
        t.theta_inf = 1.0 - s.theta[n + 1];
        t.theta[n + 1] = 1.0 - s.theta_inf;
    }
    return t;
}

PviParams pvi_from_theta(const std::array<cx, 4>& th, PviLabeling labeling) {
    PviParams p;
    if (labeling == PviLabeling::garnier) {
        p.theta_x = th[0];
        p.theta_0 = th[1];
    } else {
        p.theta_0 = th[0];
        p.theta_x = th[1];
    }
    p.theta_1 = th[2];
    p.theta_inf = th[3];
    p.alpha = 0.5 * (p.theta_inf - 1.0) * (p.theta_inf - 1.0);
    p.beta = -0.5 * p.theta_0 * p.theta_0;
    p.gamma = 0.5 * p.theta_1 * p.theta_1;
    p.delta = 0.5 * (1.0 - p.theta_x * p.theta_x);
    p.b = {0.5 * (p.theta_0 + p.theta_1), 0.5 * (p.theta_0 - p.theta_1), 0.5 * (p.theta_x + p.theta_inf) - 1.0,
           0.5 * (p.theta_x - p.theta_inf)};
    return p;
}

std::array<cx, 4> theta_from_b(const std::array<cx, 4>& b) {
    return {b[0] + b[1], b[2] + b[3] + 1.0, b[0] - b[1], b[2] - b[3] + 1.0};
}

cx pvi_rhs(cx x, cx y, cx yp, const PviParams& p) {
    if (x == cx(0.0) || x == cx(1.0)) throw Error(ErrorCode::singular, "pvi: x at a fixed singularity 0 or 1");
    if (y == cx(0.0) || y == cx(1.0) || y == x) throw Error(ErrorCode::singular, "pvi: y at 0, 1 or x");
    cx a = 0.5 * (1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - x)) * yp * yp;
    cx b = -(1.0 / x + 1.0 / (x - 1.0) + 1.0 / (y - x)) * yp;
    cx c = y * (y - 1.0) * (y - x) / (x * x * (x - 1.0) * (x - 1.0)) *
           (p.alpha + p.beta * x / (y * y) + p.gamma * (x - 1.0) / ((y - 1.0) * (y - 1.0)) +
            p.delta * x * (x - 1.0) / ((y - x) * (y - x)));
    return a + b + c;
}

double pvi_residual(const std::vector<PviSample>& samples, const PviParams& p) {
    double r = 0.0;
    for (const auto& s : samples) r = std::max(r, std::abs(s.ypp - pvi_rhs(s.x, s.y, s.yp, p)));
    return r;
}

OkamotoPoint okamoto_w(const OkamotoPoint& pt, cx x, Okamoto which) {
    OkamotoPoint o = pt;
    const auto& b = pt.b;
    auto den = [](cx d, const char* what) {
        if (d == cx(0.0)) throw Error(ErrorCode::singular, std::string("okamoto_w: ") + what);
        return d;
    };
    switch (which) {
        case Okamoto::w0:
            o.p = pt.p - (b[2] + b[3] + 1.0) / den(pt.y - x, "y = x");
            o.b = {b[0], b[1], -1.0 - b[3], -1.0 - b[2]};
            break;
        case Okamoto::w1:
            o.p = pt.p - (b[0] - b[1]) / den(pt.y - 1.0, "y = 1");
            o.b = {b[1], b[0], b[2], b[3]};
            break;
        case Okamoto::w2:
            throw Error(ErrorCode::unsupported, "okamoto_w: w2 changes (y, p) by formulas not available here");
        case Okamoto::w3:
            o.b = {b[0], b[1], b[3], b[2]};
            break;
        case Okamoto::w4:
            o.p = pt.p - (b[0] + b[1]) / den(pt.y, "y = 0");
            o.b = {-b[1], -b[0], b[2], b[3]};
            break;
    }
    return o;
}

const std::vector<std::array<int, 4>>& d4_roots() {
    static const std::vector<std::array<int, 4>> roots = [] {
        std::vector<std::array<int, 4>> r;
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                for (int si : {1, -1}) {
                    for (int sj : {1, -1}) {
                        std::array<int, 4> v{};
                        v[i] = si;
                        v[j] = sj;
                        r.push_back(v);
                    }
                }
            }
        }
        return r;
    }();
    return roots;
}

namespace {

int rank_of(const std::vector<std::array<int, 4>>& rows) {
    std::vector<std::array<double, 4>> m;
    for (const auto& r : rows) m.push_back({double(r[0]), double(r[1]), double(r[2]), double(r[3])});
    int rank = 0;
    for (int col = 0; col < 4 && rank < static_cast<int>(m.size()); ++col) {
        std::size_t piv = rank;
        for (std::size_t q = rank; q < m.size(); ++q) {
            if (std::abs(m[q][col]) > std::abs(m[piv][col])) piv = q;
        }
        if (std::abs(m[piv][col]) < 1e-12) continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t q = 0; q < m.size(); ++q) {
            if (q == static_cast<std::size_t>(rank)) continue;
            double f = m[q][col] / m[rank][col];
            for (int c = 0; c < 4; ++c) m[q][c] -= f * m[rank][c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace

StratumReport classify_parameters(const std::array<cx, 4>& b, double int_tol) {
    StratumReport rep;
    std::vector<std::array<int, 4>> rows;
    for (const auto& r : d4_roots()) {
        cx s = 0.0;
        for (int q = 0; q < 4; ++q) s += double(r[q]) * b[q];
        long k = 0;
        if (is_integer(s, int_tol, &k)) {
            rep.witnesses.push_back({r, k});
            rows.push_back(r);
        }
    }
    rep.rank = rank_of(rows);
    rep.in_M = rep.rank >= 1;
    rep.in_P = rep.rank >= 2;
    rep.in_L = rep.rank >= 3;
    rep.in_D = rep.rank >= 4;
    return rep;
}

std::array<cx, 4> symmetry_T_b(const std::array<cx, 4>& b, int which) {
    // G_1 exponents: theta_1 at x, theta_2 at 0, theta_3 at 1.
    auto tc = theta_from_b(b);  // (theta at 0, at x, at 1, inf)
    GarnierState s;
    s.n = 1;
    s.nu = {cx(0.3, 0.1)};
    s.rho = {0.0};
    s.u = {cx(0.5, 0.5), 0.0, 1.0};
    s.theta = {tc[1], tc[0], tc[2]};
    s.theta_inf = tc[3];
    auto t = symmetry_T(s, which);
    return pvi_from_theta({t.theta[0], t.theta[1], t.theta[2], t.theta_inf}).b;
}

}  // namespace garnier
