#include "garnier/schlesinger.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "garnier/error.hpp"

namespace garnier {

namespace {

double seg_length(const std::vector<cx>& a, const std::vector<cx>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(b[k] - a[k]);
    return std::sqrt(s);
}

std::vector<cx> lerp(const std::vector<cx>& a, const std::vector<cx>& b, double s) {
    std::vector<cx> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + s * (b[k] - a[k]);
    return out;
}

std::string fmt_poles(const std::vector<cx>& u) {
    std::ostringstream os;
    os.precision(8);
    os << "(";
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (k) os << ", ";
        os << u[k].real() << (u[k].imag() < 0 ? "" : "+") << u[k].imag() << "i";
    }
    os << ")";
    return os.str();
}

void pack(const std::vector<Mat2>& a, CVec& y) {
    y.resize(4 * a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        y[4 * k] = a[k].a11;
        y[4 * k + 1] = a[k].a12;
        y[4 * k + 2] = a[k].a21;
        y[4 * k + 3] = a[k].a22;
    }
}

void unpack(const CVec& y, std::vector<Mat2>& a) {
    a.resize(y.size() / 4);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = {y[4 * k], y[4 * k + 1], y[4 * k + 2], y[4 * k + 3]};
}

}  // namespace

double DeformationPath::length() const {
    double s = 0.0;
    for (std::size_t w = 1; w < waypoints.size(); ++w) s += seg_length(waypoints[w - 1], waypoints[w]);
    return s;
}

std::vector<cx> DeformationPath::at(double t) const {
    if (waypoints.empty()) throw Error(ErrorCode::parameter, "DeformationPath: no waypoints");
    double total = length();
    if (total == 0.0 || t <= 0.0) return waypoints.front();
    double target = std::min(t, 1.0) * total, acc = 0.0;
    for (std::size_t w = 1; w < waypoints.size(); ++w) {
        double l = seg_length(waypoints[w - 1], waypoints[w]);
        if (l > 0.0 && acc + l >= target) return lerp(waypoints[w - 1], waypoints[w], (target - acc) / l);
        acc += l;
    }
    return waypoints.back();
}

std::vector<int> DeformationPath::moving() const {
    std::vector<int> out;
    if (waypoints.empty()) return out;
    for (std::size_t k = 0; k < waypoints.front().size(); ++k) {
        for (const auto& w : waypoints) {
            if (w[k] != waypoints.front()[k]) {
                out.push_back(static_cast<int>(k));
                break;
            }
        }
    }
    return out;
}

DeformationPath straight_path(const std::vector<cx>& start, const std::vector<cx>& end, double clearance) {
    return DeformationPath{{start, end}, clearance};
}

double path_min_separation(const DeformationPath& path) {
    double best = INFINITY;
    auto pair_min = [](cx d0, cx d1) {
        cx dd = d1 - d0;
        double a = std::norm(dd);
        double s = a > 0.0 ? std::clamp(-std::real(std::conj(d0) * dd) / a, 0.0, 1.0) : 0.0;
        return std::abs(d0 + s * dd);
    };
    for (std::size_t w = 0; w < path.waypoints.size(); ++w) {
        const auto& a = path.waypoints[w];
        const auto& b = w + 1 < path.waypoints.size() ? path.waypoints[w + 1] : a;
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = i + 1; j < a.size(); ++j) best = std::min(best, pair_min(a[i] - a[j], b[i] - b[j]));
        }
    }
    return best;
}

void check_path(const DeformationPath& path, int size) {
    if (path.waypoints.empty()) throw Error(ErrorCode::parameter, "deformation path: no waypoints");
    for (const auto& w : path.waypoints) {
        if (static_cast<int>(w.size()) != size) {
            throw Error(ErrorCode::parameter, "deformation path: every waypoint needs " + std::to_string(size) + " poles");
        }
        for (cx u : w) {
            if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
                throw Error(ErrorCode::parameter, "deformation path: non-finite waypoint");
            }
        }
    }
    if (!(path.clearance > 0.0)) throw Error(ErrorCode::parameter, "deformation path: clearance must be positive");
    double sep = path_min_separation(path);
    if (sep < path.clearance) {
        std::ostringstream os;
        os << "deformation path: poles approach to " << sep << " < clearance " << path.clearance;
        throw Error(ErrorCode::branch, os.str());
    }
}

std::vector<std::vector<Mat2>> schlesinger_rhs(const FuchsianSystem& sys) {
    const std::size_t m = sys.poles.size();
    std::vector<std::vector<Mat2>> d(m, std::vector<Mat2>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            cx du = sys.poles[i] - sys.poles[j];
            if (du == cx(0.0)) {
                throw Error(ErrorCode::singular, "schlesinger_rhs: poles u" + std::to_string(i + 1) + " and u" +
                                                     std::to_string(j + 1) + " collide");
            }
            d[i][j] = commutator(sys.residues[i], sys.residues[j]) / du;
            d[i][i] -= d[i][j];
        }
    }
    return d;
}

FlowResult schlesinger_flow(const FuchsianSystem& sys, const DeformationPath& path, const FlowOptions& opts) {
    require_valid(sys, 1e-8, "schlesinger_flow");
    const int m = sys.size();
    check_path(path, m);
    if (seg_length(path.waypoints.front(), sys.poles) > 1e-12 * (1.0 + seg_length(sys.poles, std::vector<cx>(m)))) {
        throw Error(ErrorCode::parameter, "schlesinger_flow: path does not start at the poles of the system");
    }

    FlowResult res;
    res.system = sys;
    if (opts.monodromy_check) {
        bool candidate = false;
        for (cx t : sys.theta) candidate = candidate || is_integer(t, 1e-9);
        if (candidate) {
            try {
                auto data = compute_monodromy(sys);
                for (int j = 0; j < m; ++j) {
                    if (scalar_class(data.m[j], opts.scalar_tol) != ScalarClass::not_scalar) {
                        res.warnings.push_back("scalar_monodromy: M_" + std::to_string(j + 1) +
                                               " = +-1, the Schlesinger deformation is not the only isomonodromic one");
                    }
                }
            } catch (const Error& e) {
                res.warnings.push_back(std::string("monodromy_check_failed: ") + e.what());
            }
        }
    }

    const double total = path.length();
    auto record = [&](double t, const std::vector<cx>& u, const std::vector<Mat2>& a) {
        if (opts.record) res.trajectory.push_back({t, u, a});
    };
    record(0.0, sys.poles, sys.residues);
    if (total == 0.0) return res;

    CVec y;
    pack(sys.residues, y);
    FuchsianSystem work = sys;
    double acc = 0.0;
    for (std::size_t w = 1; w < path.waypoints.size(); ++w) {
        const auto& a = path.waypoints[w - 1];
        const auto& b = path.waypoints[w];
        double l = seg_length(a, b);
        if (l == 0.0) continue;
        std::vector<cx> du(m);
        for (int k = 0; k < m; ++k) du[k] = b[k] - a[k];
        OdeRhs f = [&](double s, const CVec& yy, CVec& dy) {
            work.poles = lerp(a, b, s);
            unpack(yy, work.residues);
            auto d = schlesinger_rhs(work);
            dy.assign(yy.size(), 0.0);
            for (int i = 0; i < m; ++i) {
                Mat2 v;
                for (int j = 0; j < m; ++j) {
                    if (du[j] != cx(0.0)) v += du[j] * d[i][j];
                }
                dy[4 * i] = v.a11;
                dy[4 * i + 1] = v.a12;
                dy[4 * i + 2] = v.a21;
                dy[4 * i + 3] = v.a22;
            }
        };
        int pieces = opts.record ? std::max(1, opts.samples_per_segment + 1) : 1;
        for (int q = 0; q < pieces; ++q) {
            double s0 = static_cast<double>(q) / pieces, s1 = static_cast<double>(q + 1) / pieces;
            OdeOptions o = opts.ode;
            o.h_min_rel = opts.ode.h_min_rel * pieces;  // relative to the whole segment
            try {
                res.steps += integrate(f, s0, s1, y, o).steps;
            } catch (const Error& e) {
                std::string msg = e.what();
                double s = s0;
                auto pos = msg.find("t=");
                if (pos != std::string::npos) s = std::stod(msg.substr(pos + 2));
                std::ostringstream os;
                os << "schlesinger_flow: movable singularity encountered near path parameter t="
                   << (acc + s * l) / total << ", poles " << fmt_poles(lerp(a, b, s));
                throw Error(ErrorCode::singular, os.str());
            }
            std::vector<Mat2> cur;
            unpack(y, cur);
            for (const auto& r : cur) {
                if (!r.finite()) {
                    throw Error(ErrorCode::singular, "schlesinger_flow: residues overflowed near poles " +
                                                         fmt_poles(lerp(a, b, s1)));
                }
            }
            record((acc + s1 * l) / total, lerp(a, b, s1), cur);
        }
        acc += l;
    }
    unpack(y, res.system.residues);
    res.system.poles = path.waypoints.back();
    return res;
}

IsomonodromyResult verify_flow_isomonodromy(const FuchsianSystem& sys0, const FlowResult& flowed,
                                            const DeformationPath& path, const MonodromyOptions& opts) {
    check_path(path, sys0.size());
    LoopBasis basis = make_loop_basis(sys0, opts);
    return verify_isomonodromy(sys0, flowed.system, basis, opts);
}

}  // namespace garnier
