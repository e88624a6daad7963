#pragma once

#include "cmablb/bounds.hpp"
#include "cmablb/instance.hpp"
#include "cmablb/sim.hpp"
#include "cmablb/smoothness.hpp"
#include "cmablb/verify.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace cmablb {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const DisjointInstance& inst);
/// Throws std::invalid_argument on schema mismatch or a structurally invalid
/// instance.
DisjointInstance instance_from_json(const Json& j);

Json to_json(const BoundReport& report);
Json to_json(const SmoothnessReport& report);
Json to_json(const SubsetOptimum& optimum, Measure measure, Objective objective, SearchMethod method);
Json to_json(const BoundComparison& cmp);
Json to_json(const VerifyReport& report);

/// Comma-separated doubles, e.g. "0.25,0.5".
Vector parse_csv_vector(std::string_view text);
std::vector<std::size_t> parse_csv_indices(std::string_view text);

/// Pretty-printed JSON followed by a newline.
std::string dump(const Json& j);

}  // namespace cmablb
