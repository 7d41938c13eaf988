#pragma once

#include <json.hpp>
#include <string>

#include "lipset/constructions.hpp"
#include "lipset/counterexample.hpp"
#include "lipset/udt.hpp"

namespace lipset {

using Json = nlohmann::ordered_json;

// Every number goes out as an exact "p/q" string. Readers accept "p/q",
// integers, finite decimals, and JSON integers; anything else is a ParseError.

Json to_json(const Rational& q);
Rational rational_from_json(const Json& j);

/// {"intervals": [["a","b"], ...]}
Json to_json(const IntervalSet& s);
IntervalSet set_from_json(const Json& j);

/// {"breakpoints": [...], "values": [...]}
Json to_json(const PiecewiseLinear& f);
PiecewiseLinear function_from_json(const Json& j);

Json to_json(const Interval& iv);
Interval interval_from_json(const Json& j);

/// {"window": [a,b], "E": set, "F": [set, ...]}
Json to_json(const NestedClosedSystem& s);
NestedClosedSystem system_from_json(const Json& j);

/// {"gammas": [...], "deltas": [...]}
Json to_json(const UDTWitness& w);
UDTWitness witness_from_json(const Json& j);

/// {"window": [a,b], "E1": set, "E0": set, "Em1": set}
Json to_json(const TernaryDecomposition& t);
TernaryDecomposition ternary_from_json(const Json& j);

Json to_json(const StageDiagnostics& d);
Json to_json(const AdversarialTrace& t);
Json to_json(const SymbolPath& p);

Json read_json_file(const std::string& path);
/// Two-space indent and a trailing newline.
std::string dump(const Json& j);

}  // namespace lipset
