#pragma once

#include <string>

#include "json.hpp"

#include "garnier/classical.hpp"
#include "garnier/fuchsian.hpp"
#include "garnier/garnier.hpp"
#include "garnier/gauge.hpp"
#include "garnier/monodromy.hpp"
#include "garnier/schlesinger.hpp"

namespace garnier {

using Json = nlohmann::json;

// Complex numbers are [re, im]; matrices are [a11, a12, a21, a22].
Json to_json(cx z);
cx cx_from_json(const Json& j);
Json to_json(const Mat2& m);
Mat2 mat2_from_json(const Json& j);

// Throws Error(schema) unless j["schema"] == expected.
void require_schema(const Json& j, const char* expected);

Json to_json(const FuchsianSystem& sys);            // fuchsian-v1
FuchsianSystem fuchsian_from_json(const Json& j);

Json to_json(const MonodromyData& m);               // monodromy-v1
MonodromyData monodromy_from_json(const Json& j);

Json to_json(const GarnierState& s);                // garnier-state-v1, kappa informational
GarnierState garnier_state_from_json(const Json& j);

// path-v1: either {"waypoints": [[u...], ...]} or {"start": [u...], "index": k, "points": [z...]},
// the latter moving only coordinate k through the listed points.
Json to_json(const DeformationPath& p);
DeformationPath path_from_json(const Json& j);

Json to_json(const ValidationReport& r);
Json to_json(const GroupClass& g);
Json to_json(const RelationReport& r);
Json to_json(const AuditLog& log);                  // audit-v1 entries of one pipeline
Json to_json(const StratumReport& r);

// classical-v1 header with samples. Refused (Error(inconsistent)) when the solution
// is not verified, unless `force` is set; a forced export carries "verified": false.
Json to_json(const ClassicalSolution& s, bool force = false);
ClassicalSolution classical_from_json(const Json& j);
// Columns x_re,x_im,y_re,y_im,p_re,p_im,residual,aux with 17 significant digits.
std::string classical_csv(const ClassicalSolution& s, bool force = false);

std::string format17(double v);

}  // namespace garnier
