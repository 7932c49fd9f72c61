#pragma once

#include <string>
#include <vector>

#include "garnier/fuchsian.hpp"
#include "garnier/monodromy.hpp"
#include "garnier/ode.hpp"

namespace garnier {

// Polyline in pole space. Every waypoint lists all n+2 poles; the segment
// between consecutive waypoints is straight and t in [0, 1] is distributed
// over the segments proportionally to their Euclidean length.
struct DeformationPath {
    std::vector<std::vector<cx>> waypoints;
    double clearance = 0.0;

    double length() const;
    std::vector<cx> at(double t) const;
    // Indices whose coordinate changes somewhere along the path.
    std::vector<int> moving() const;
};

// Straight path from the poles of sys to `end`.
DeformationPath straight_path(const std::vector<cx>& start, const std::vector<cx>& end, double clearance);

// Minimal pairwise pole distance along the path (exact on each segment).
double path_min_separation(const DeformationPath& path);

// Throws Error(branch) when the path comes closer than its clearance to a
// collision, Error(parameter) for malformed waypoints.
void check_path(const DeformationPath& path, int size);

// d[i][j] = dA_i/du_j.
std::vector<std::vector<Mat2>> schlesinger_rhs(const FuchsianSystem& sys);

struct FlowOptions {
    OdeOptions ode{};
    int samples_per_segment = 0;  // trajectory points per segment besides the endpoints
    bool record = false;
    bool monodromy_check = true;  // computes monodromy when some theta_j is an integer
    double scalar_tol = 1e-6;
};

struct TrajectoryPoint {
    double t = 0.0;
    std::vector<cx> poles;
    std::vector<Mat2> residues;
};

struct FlowResult {
    FuchsianSystem system;
    std::vector<std::string> warnings;
    std::vector<TrajectoryPoint> trajectory;
    long steps = 0;
};

FlowResult schlesinger_flow(const FuchsianSystem& sys, const DeformationPath& path, const FlowOptions& opts = {});

// verify_isomonodromy with a path-clearance precondition on the start system.
IsomonodromyResult verify_flow_isomonodromy(const FuchsianSystem& sys0, const FlowResult& flowed,
                                            const DeformationPath& path, const MonodromyOptions& opts = {});

}  // namespace garnier
